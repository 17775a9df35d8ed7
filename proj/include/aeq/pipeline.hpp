#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aeq/biasymptotic.hpp"
#include "aeq/quasilinear.hpp"
#include "aeq/report.hpp"
#include "aeq/scenario.hpp"

namespace aeq {

/// Overrides and report settings shared by every subcommand.
struct RunConfig {
  std::optional<double> tol;      ///< construction tolerance (default: run.tol)
  std::optional<double> horizon;  ///< default: run.horizon, else from the certificate
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;  ///< jitter of certificate validation grids
  std::optional<double> report_tol;   ///< threshold of the decay verdicts (default 1e-4)
  double x_tol = 1e-11;               ///< integrator tolerance for X and paired solutions
  std::vector<std::string> conditions;

  double report(double fallback = 1e-4) const { return report_tol.value_or(fallback); }
};

/// X, P and the resolved certificate of a linear scenario.
struct LinearContext {
  MatrixFunction A;
  MatrixFunction B;
  std::shared_ptr<const FundamentalMatrix> X;
  std::shared_ptr<const PerturbationMatrix> P;
  TailCertificate cert;
  CertificateReport cert_report;
  bool fitted = false;
  double horizon = 0.0;
  double tol = 1e-8;
  bool two_sided = false;
  PsiOptions psi_options;
  std::vector<Vector> initial;  ///< c vectors, x(0) = c

  double envelope(double t) const;  ///< ‖P(t)‖, or max over ±t when two-sided
};

LinearContext prepare_linear(const Scenario& s, const RunConfig& cfg);

Verdict c1_verdict(const LinearContext& ctx);
CsvTable psi_table(const PsiSolution& psi);

Artifacts run_check(const Scenario& s, const RunConfig& cfg);
Artifacts run_psi(const Scenario& s, const RunConfig& cfg);
Artifacts run_equiv(const Scenario& s, const RunConfig& cfg);
Artifacts run_quasi(const Scenario& s, const RunConfig& cfg);
Artifacts run_biasym(const Scenario& s, const RunConfig& cfg);
Artifacts run_classify(const Scenario& s, const RunConfig& cfg);

/// End-to-end reproduction of the built-in examples 1, 2 and 3.
Artifacts run_example(int which, const BuiltinParams& params, const RunConfig& cfg);

}  // namespace aeq
