#pragma once

#include <vector>

#include "aeq/equivalence.hpp"

namespace aeq {

struct ParityCheck {
  bool pass = false;
  double worst_deviation = 0.0;
  double scale = 0.0;
};

/// Sampled parity statements over a symmetric grid. B_odd and P_even are
/// diagnostics for the opposite parities.
struct ParityReport {
  ParityCheck A_odd;
  ParityCheck B_even;
  ParityCheck X_even;
  ParityCheck P_odd;
  ParityCheck B_odd;
  ParityCheck P_even;
  /// Hypotheses the two-sided construction relies on.
  bool construction_ready() const { return A_odd.pass && P_odd.pass; }
};

/// Samples `samples` points of (0, horizon]; a check passes iff the worst
/// deviation is ≤ 1e-9·scale, scale = max(1, max ‖F(±t)‖).
ParityReport check_parity(const MatrixFunction& a, const MatrixFunction& b, const FundamentalMatrix& x,
                          const PerturbationMatrix& p, double horizon, int samples = 64);

struct TwoSidedPsi {
  PsiSolution psi;                         ///< glued Ψ on [-T, T]
  detail::SeriesResult plus;               ///< Ψ_k on [t1, T]
  detail::SeriesResult minus;              ///< mirrored-series levels on [-T, -t1]
  PanelGrid plus_grid;
  PanelGrid minus_grid;
  double glue_mismatch = 0.0;
  double glue_at = 0.0;
  double symmetry_error = 0.0;             ///< max over edges of ‖Ψ(-t) - Ψ(t)‖
};

/// Series towards +∞ on [t1, T], mirrored series from -∞ on [-T, -t1], both
/// continued across [-t1, t1] by integrating Ψ' = P(I + Ψ). The certificate
/// bounds ‖P(t)‖ for |t| ≥ t*. Throws GlueMismatch when the two continuations
/// disagree by more than `glue_tol` (default: opt.tol·1e2).
TwoSidedPsi psi_two_sided(const MatrixFn& p, const TailCertificate& cert, const PsiOptions& opt,
                          std::optional<double> glue_tol = std::nullopt);

/// The solution with Ψ → 0 as t → +∞ continued over all of [-T, T], with no
/// parity assumption.
PsiSolution psi_plus_continued(const MatrixFn& p, const TailCertificate& cert, const PsiOptions& opt);

/// max over grid edges of ‖Ψ(-t) - Ψ(t)‖_F for a grid symmetric about 0.
double symmetry_error(const PsiSolution& psi);

struct EndVerdicts {
  Verdict negative;
  Verdict positive;
  bool pass() const { return negative.pass && positive.pass; }
};

/// C2 on both half-axes via the certified envelope ‖X(t)‖(e^{tail(|t|)} - 1).
struct TwoSidedC2 {
  DecayCurve curve;
  EndVerdicts ends;
};
TwoSidedC2 check_C2_two_sided(const FundamentalMatrix& x, const PsiSolution& psi, const TailCertificate& cert,
                              double tol = 1e-4, int samples = 801);

struct BiequivalenceReport {
  std::vector<double> t;
  std::vector<std::vector<double>> gaps;
  EndVerdicts ends;
  Verdict verdict;
};

/// x' = Ax and y' = (A + B)y from t2 with y(t2) = M x(t2), integrated to ±T.
/// PASS iff the gap decays on both [-T, -T/2] and [T/2, T].
BiequivalenceReport biequivalence_report(const MatrixFunction& a, const MatrixFunction& b, const EquivalenceMap& map,
                                         const std::vector<Vector>& initial, double horizon,
                                         const ReportOptions& opt = {});

}  // namespace aeq
