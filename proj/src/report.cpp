#include "aeq/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "aeq/errors.hpp"

namespace aeq {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + table.header[i];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const CsvTable& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) obj[table.header[i]] = number(row[i]);
    rows.push_back(std::move(obj));
  }
  return rows;
}

Json to_json(const Verdict& v) {
  Json j = Json::object();
  j["condition"] = v.condition;
  j["pass"] = v.pass;
  j["worst_value"] = number(v.worst_value);
  j["at_t"] = number(v.at_t);
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

bool Artifacts::all_pass() const {
  for (const auto& v : verdicts)
    if (!v.pass) return false;
  return true;
}

Json verdicts_document(const Artifacts& a, const std::string& command, const std::string& scenario) {
  Json doc = Json::object();
  doc["command"] = command;
  doc["scenario"] = scenario;
  doc["all_pass"] = a.all_pass();
  Json list = Json::array();
  for (const auto& v : a.verdicts) list.push_back(to_json(v));
  doc["verdicts"] = std::move(list);
  doc["details"] = a.details;
  return doc;
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw InputError("write to '" + p.string() + "' failed");
}

}  // namespace

std::vector<std::filesystem::path> write_artifacts(const Artifacts& a, const std::filesystem::path& dir,
                                                   TableFormat format, const std::string& command,
                                                   const std::string& scenario) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const auto& [stem, table] : a.tables) {
    const auto p = dir / (stem + (format == TableFormat::csv ? ".csv" : ".json"));
    write_file(p, format == TableFormat::csv ? to_csv(table) : to_json(table).dump(1) + "\n");
    written.push_back(p);
  }
  const auto p = dir / "verdicts.json";
  write_file(p, verdicts_document(a, command, scenario).dump(2) + "\n");
  written.push_back(p);
  return written;
}

}  // namespace aeq
