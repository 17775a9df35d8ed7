#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aeq/matrix_function.hpp"
#include "aeq/verdict.hpp"

namespace aeq {

using Json = nlohmann::ordered_json;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double v);
std::string to_csv(const CsvTable& table);
/// Array of row objects keyed by the header; non-finite values become null.
Json to_json(const CsvTable& table);

/// Non-finite values become null.
Json number(double v);
Json to_json(const Verdict& v);
Json to_json(const Matrix& m);
Json to_json(const Vector& v);

/// Everything a pipeline run produces.
struct Artifacts {
  std::vector<Verdict> verdicts;
  Json details = Json::object();
  std::vector<std::pair<std::string, CsvTable>> tables;  ///< file stem -> table

  bool all_pass() const;
  void add(Verdict v) { verdicts.push_back(std::move(v)); }
};

enum class TableFormat { csv, json };

Json verdicts_document(const Artifacts& a, const std::string& command, const std::string& scenario);

/// Writes <stem>.csv (or .json) per table plus verdicts.json into `dir`.
/// Returns the written paths.
std::vector<std::filesystem::path> write_artifacts(const Artifacts& a, const std::filesystem::path& dir,
                                                   TableFormat format, const std::string& command,
                                                   const std::string& scenario);

}  // namespace aeq
