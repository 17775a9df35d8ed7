#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run aeq(const std::string& args) {
  const fs::path dir = fs::temp_directory_path() / "aeq_cli_test";
  fs::create_directories(dir);
  const std::string cmd = std::string(AEQ_BIN) + " " + args + " > " + (dir / "out").string() + " 2> " +
                          (dir / "err").string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "out");
  r.err = slurp(dir / "err");
  return r;
}

nlohmann::json verdict(const nlohmann::json& doc, const std::string& condition) {
  for (const auto& v : doc["verdicts"])
    if (v["condition"] == condition) return v;
  return nullptr;
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "aeq_cli_test" / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("C1 and C2 on an unperturbed system pass trivially") {
  const auto out = fresh("zero_b");
  const auto r = aeq("check --scenario " AEQ_DATA_DIR "/zero_b.aeq --conditions C1,C2 --out-dir " + out.string());
  CHECK(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp(out / "verdicts.json"));
  CHECK(doc["all_pass"] == true);
  CHECK(verdict(doc, "C1")["pass"] == true);
  CHECK(verdict(doc, "C2")["pass"] == true);
  CHECK(doc["verdicts"].size() == 2);
}

TEST_CASE("example 1 writes its artifacts") {
  const auto out = fresh("ex1");
  const auto r = aeq("example 1 --alpha 3 --out-dir " + out.string());
  CHECK(r.code == 0);
  for (const char* f : {"psi.csv", "equiv.csv", "verdicts.json"}) CHECK(fs::exists(out / f));
  const auto doc = nlohmann::json::parse(slurp(out / "verdicts.json"));
  CHECK(doc["all_pass"] == true);
  CHECK(slurp(out / "psi.csv").rfind("t,", 0) == 0);
}

TEST_CASE("weaker-condition witness") {
  const auto out = fresh("witness");
  const auto r = aeq("quasi --builtin weaker_witness --out-dir " + out.string());
  CHECK(r.code == 1);
  const auto doc = nlohmann::json::parse(slurp(out / "verdicts.json"));
  CHECK(verdict(doc, "C4")["pass"] == true);
  CHECK(verdict(doc, "C5")["pass"] == true);
  CHECK(verdict(doc, "Eq14")["pass"] == false);
  CHECK(fs::exists(out / "c5.csv"));
}

TEST_CASE("json tables") {
  const auto out = fresh("json");
  const auto r = aeq("psi --builtin scalar_oracle --format json --out-dir " + out.string());
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "psi.json"));
  CHECK(nlohmann::json::parse(slurp(out / "psi.json")).is_array());
}

TEST_CASE("located scenario errors go to stderr as JSON") {
  const auto r = aeq("check --scenario " AEQ_DATA_DIR "/broken.aeq");
  CHECK(r.code == 2);
  const auto e = nlohmann::json::parse(r.err);
  CHECK(e["error"] == "input_error");
  CHECK(e["line"] == 5);
  CHECK(e["column"] == 9);
}

TEST_CASE("parameter constraint errors") {
  const auto r = aeq("example 2 --alpha 1 --beta 0.6");
  CHECK(r.code == 2);
  CHECK(r.err.find("alpha - 2 beta") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(aeq("").code == 2);
  CHECK(aeq("example 7").code == 2);
  CHECK(aeq("check").code == 2);
}

}
