#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aeq/ap.hpp"
#include "aeq/certificates.hpp"
#include "aeq/matrix_function.hpp"

namespace aeq {

struct CertDef {
  std::string name;
  TailCertificate cert;
  bool auto_K = false;  ///< K is to be fitted before use
  bool operator==(const CertDef&) const = default;
};

struct APDef {
  std::string name;
  APSignal signal;
  bool operator==(const APDef&) const = default;
};

struct RunDirectives {
  std::optional<double> horizon;
  double tol = 1e-8;
  double eps = 0.5;
  int kmax = 60;
  bool two_sided = false;
  std::optional<double> t_start;
  std::optional<std::string> p_cert;
  std::optional<std::string> eta_cert;
  std::optional<std::string> ap;
  bool operator==(const RunDirectives&) const = default;
};

/// A parsed and validated `.aeq` file. Either the linear pair (A, B) or the
/// quasilinear pair (C, f) with η, or both.
struct Scenario {
  std::string name;
  int dim = 0;
  std::optional<MatrixFunction> A;
  std::optional<MatrixFunction> B;
  std::optional<Matrix> C;
  std::optional<StateMap> f;
  std::optional<Expr> eta;
  std::vector<CertDef> certs;
  std::vector<APDef> signals;
  RunDirectives run;
  std::vector<Vector> initial;

  const CertDef* cert(std::string_view name) const;
  const APDef* signal(std::string_view name) const;
  /// Sampling horizon used for parity validation and defaults.
  double nominal_horizon() const { return run.horizon.value_or(10.0); }
  bool operator==(const Scenario& o) const;
};

/// Throws InputError with line and column on any syntax, dimension or reference problem.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical text; parse_scenario(serialize(s)) == s.
std::string serialize(const Scenario& s);

struct BuiltinParams {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> K1;
};

/// example1, example2, example3, example3_odd, scalar_oracle, quasi_scalar, weaker_witness.
Scenario builtin(std::string_view name, const BuiltinParams& params = {});
const std::vector<std::string>& builtin_names();

}  // namespace aeq
