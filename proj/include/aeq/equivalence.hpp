#pragma once

#include <vector>

#include "aeq/psi.hpp"
#include "aeq/verdict.hpp"

namespace aeq {

/// Constant matrix M = X(t2)[I + Ψ(t2)]X^{-1}(t2) pairing initial data at t2:
/// y(t2) = M x(t2).
struct EquivalenceMap {
  double t2 = 0.0;
  Matrix M;
  Matrix M_inv;
  double condition = 1.0;
  // provenance
  double psi_horizon = 0.0;
  int psi_levels = 0;
  double psi_residual = 0.0;
  double x_tol = 0.0;
};

EquivalenceMap build_map(const FundamentalMatrix& x, const PsiSolution& psi);

enum class MapDirection { x_to_y, y_to_x };

Vector map_solution(const EquivalenceMap& map, const Vector& v, MapDirection dir);

/// Rank of the mapped family {M v}: the transported family keeps its dimension.
int transported_rank(const EquivalenceMap& map, const std::vector<Vector>& basis, double rel_tol = 1e-10);

struct DecayCurve {
  std::vector<double> t;
  std::vector<double> value;     ///< computed ‖X(t)Ψ(t)‖_F
  std::vector<double> envelope;  ///< certified ‖X(t)‖_F (e^{tail(t)} - 1)
};

struct C2Report {
  DecayCurve curve;
  Verdict verdict;
};

/// lim X(t)Ψ(t) = 0, judged on the certified envelope over [t_begin, T]
/// (the computed Ψ is truncated at T, so its own values near T prove nothing).
C2Report check_C2(const FundamentalMatrix& x, const PsiSolution& psi, const TailCertificate& cert,
                  double tol = 1e-4, int samples = 401);

struct EquivalenceReport {
  std::vector<double> t;
  std::vector<std::vector<double>> gaps;  ///< ‖x(t) - y(t)‖ per initial vector
  std::vector<double> worst_per_vector;   ///< sup over [T - Δ, T]
  Verdict verdict;
};

struct ReportOptions {
  double tol = 1e-4;         ///< PASS threshold
  double integrator_tol = 1e-11;
  int samples = 401;
  double window = 0.1;       ///< Δ as a fraction of T - t2
};

/// Integrates x' = A x and y' = (A + B) y from t2 with y(t2) = M x(t2) for each
/// x(t2) in `initial`, and reports ‖x - y‖.
EquivalenceReport equivalence_report(const MatrixFunction& a, const MatrixFunction& b, const EquivalenceMap& map,
                                     const std::vector<Vector>& initial, double horizon,
                                     const ReportOptions& opt = {});

MatrixFunction operator+(const MatrixFunction& a, const MatrixFunction& b);

}  // namespace aeq
