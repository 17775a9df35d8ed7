// aeq: asymptotic equivalence toolkit command line.
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "aeq/errors.hpp"
#include "aeq/pipeline.hpp"

namespace {

struct Common {
  std::string scenario;
  std::string builtin;
  std::string out_dir = ".";
  std::string format = "csv";
  std::optional<double> tol, horizon, eps, report_tol;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool needs_scenario) {
  auto* file = cmd->add_option("--scenario", c.scenario, "scenario file (.aeq)");
  auto* named = cmd->add_option("--builtin", c.builtin, "built-in scenario name");
  if (needs_scenario) {
    file->excludes(named);
    named->excludes(file);
  }
  cmd->add_option("--tol", c.tol, "construction tolerance");
  cmd->add_option("--horizon", c.horizon, "horizon T");
  cmd->add_option("--eps", c.eps, "series smallness bound");
  cmd->add_option("--report-tol", c.report_tol, "threshold of decay verdicts");
  cmd->add_option("--seed", c.seed, "jitter seed for certificate validation grids");
  cmd->add_option("--out-dir", c.out_dir, "output directory");
  cmd->add_option("--format", c.format, "table format")->check(CLI::IsMember({"csv", "json"}));
}

aeq::RunConfig config(const Common& c) {
  aeq::RunConfig cfg;
  cfg.tol = c.tol;
  cfg.horizon = c.horizon;
  cfg.eps = c.eps;
  cfg.report_tol = c.report_tol;
  cfg.seed = c.seed;
  return cfg;
}

aeq::Scenario load(const Common& c) {
  if (!c.builtin.empty()) return aeq::builtin(c.builtin);
  if (c.scenario.empty()) throw aeq::InputError("give --scenario <file> or --builtin <name>");
  return aeq::load_scenario(c.scenario);
}

int finish(const aeq::Artifacts& a, const Common& c, const std::string& command, const std::string& name) {
  aeq::write_artifacts(a, c.out_dir, c.format == "json" ? aeq::TableFormat::json : aeq::TableFormat::csv, command,
                       name);
  for (const auto& v : a.verdicts)
    std::cout << (v.pass ? "PASS " : "FAIL ") << v.condition << " worst=" << aeq::format_number(v.worst_value)
              << " at_t=" << aeq::format_number(v.at_t) << "\n";
  return a.all_pass() ? 0 : 1;
}

void report_error(const char* kind, const std::string& message, int line = 0, int column = 0) {
  aeq::Json j = aeq::Json::object();
  j["error"] = kind;
  j["message"] = message;
  if (line > 0) {
    j["line"] = line;
    j["column"] = column;
  }
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic and biasymptotic equivalence of linear and quasilinear ODE systems"};
  app.require_subcommand(1);
  Common common;
  std::string conditions;
  int example = 0;
  aeq::BuiltinParams params;

  auto* check = app.add_subcommand("check", "verdicts for conditions C1..C7 and Eq14");
  add_common(check, common, true);
  check->add_option("--conditions", conditions, "comma-separated subset, e.g. C1,C2");
  auto* psi = app.add_subcommand("psi", "construct Ψ and write psi.csv");
  add_common(psi, common, true);
  auto* equiv = app.add_subcommand("equiv", "equivalence map and paired-solution gaps");
  add_common(equiv, common, true);
  auto* quasi = app.add_subcommand("quasi", "quasilinear pipeline: c_u, C3..C5, Eq14");
  add_common(quasi, common, true);
  auto* biasym = app.add_subcommand("biasym", "two-sided Ψ, parity and biequivalence");
  add_common(biasym, common, true);
  auto* classify = app.add_subcommand("classify", "AP decomposition of mapped solutions");
  add_common(classify, common, true);
  auto* ex = app.add_subcommand("example", "reproduce built-in example 1, 2 or 3");
  add_common(ex, common, false);
  ex->add_option("which", example, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  ex->add_option("--alpha", params.alpha, "decay rate alpha");
  ex->add_option("--beta", params.beta, "example 2: growth rate beta");
  ex->add_option("--K1", params.K1, "amplitude K1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage_error", e.what());
    return 2;
  }

  try {
    const aeq::RunConfig base = config(common);
    if (ex->parsed()) {
      const auto a = aeq::run_example(example, params, base);
      return finish(a, common, "example", "example" + std::to_string(example));
    }
    const aeq::Scenario s = load(common);
    aeq::RunConfig cfg = base;
    if (check->parsed()) {
      std::stringstream ss(conditions);
      for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) cfg.conditions.push_back(item);
      return finish(aeq::run_check(s, cfg), common, "check", s.name);
    }
    if (psi->parsed()) return finish(aeq::run_psi(s, cfg), common, "psi", s.name);
    if (equiv->parsed()) return finish(aeq::run_equiv(s, cfg), common, "equiv", s.name);
    if (quasi->parsed()) return finish(aeq::run_quasi(s, cfg), common, "quasi", s.name);
    if (biasym->parsed()) return finish(aeq::run_biasym(s, cfg), common, "biasym", s.name);
    if (classify->parsed()) return finish(aeq::run_classify(s, cfg), common, "classify", s.name);
  } catch (const aeq::InputError& e) {
    report_error(e.kind(), e.message(), e.line(), e.column());
    return 2;
  } catch (const aeq::IntegrationFailure& e) {
    report_error(e.kind(), e.what() + std::string(" (last t = ") + aeq::format_number(e.last_t()) + ")");
    return 2;
  } catch (const aeq::Error& e) {
    report_error(e.kind(), e.what());
    return 2;
  } catch (const std::exception& e) {
    report_error("internal_error", e.what());
    return 2;
  }
  return 2;
}
