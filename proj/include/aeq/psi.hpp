#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "aeq/certificates.hpp"
#include "aeq/fundamental.hpp"
#include "aeq/panel_grid.hpp"

namespace aeq {

using MatrixFn = std::function<Matrix(double)>;

/// P(t) = X^{-1}(t) B(t) X(t), the coefficient of the transformed system u' = P(t)u.
class PerturbationMatrix {
 public:
  PerturbationMatrix(std::shared_ptr<const FundamentalMatrix> x, MatrixFunction b);

  int dim() const { return b_.dim(); }
  Matrix operator()(double t) const;
  double norm(double t) const { return (*this)(t).norm(); }
  /// ‖P(t)‖_F on the grid, for certificate fitting.
  std::vector<double> norm_samples(const GridSpec& grid) const;
  const FundamentalMatrix& fundamental() const { return *x_; }
  const MatrixFunction& perturbation() const { return b_; }
  MatrixFn as_function() const;

 private:
  std::shared_ptr<const FundamentalMatrix> x_;
  MatrixFunction b_;
};

PerturbationMatrix build_P(std::shared_ptr<const FundamentalMatrix> x, const MatrixFunction& b);

/// Ψ sampled on a panel grid, with the bookkeeping of its construction.
struct PsiSolution {
  PanelGrid grid;
  std::vector<Matrix> edge_values;
  std::vector<Matrix> node_values;
  double horizon = 0.0;  ///< T
  double eps = 0.5;
  double t1 = 0.0;       ///< smallness point of the certificate
  double t2 = 0.0;       ///< first grid edge ≥ t1 with ‖Ψ‖_F < 1/2
  int k_used = 0;
  double residual = 0.0;
  double tail_at_horizon = 0.0;
  bool two_sided = false;  ///< Ψ → 0 at both ends (the residual then uses ∫_{-∞}^t for t < 0)
  /// ‖Ψ_k‖_F at each grid edge, for k = 1..k_used (series constructions only).
  std::vector<std::vector<double>> level_edge_norms;
  /// Ψ_k at each edge for the first few k (series constructions only).
  std::vector<std::vector<Matrix>> kept_levels;

  int dim() const { return edge_values.empty() ? 0 : static_cast<int>(edge_values.front().rows()); }
  double t_begin() const { return grid.begin(); }
  double t_end() const { return grid.end(); }
  const std::vector<double>& times() const { return grid.edges(); }
  Matrix at(double t) const;
};

struct PsiOptions {
  double eps = 0.5;
  std::optional<double> horizon;  ///< default: find_smallness_point(cert, tol/2)
  int k_max = 60;
  double tol = 1e-8;
  std::optional<double> t_start;  ///< default: t1
  double panel_width = 0.25;
  int order = 8;
  int keep_levels = 3;
};

/// Resolved horizon for the options: explicit, or where the certified tail drops below tol/2.
double psi_horizon(const TailCertificate& cert, const PsiOptions& opt);

/// Successive approximations Ψ_k(t) = -∫_t^∞ P Ψ_{k-1}, Ψ = Σ_{k≥1} Ψ_k, on [t_start, T].
PsiSolution psi_series(const MatrixFn& p, const TailCertificate& cert, const PsiOptions& opt);

/// Independent construction: Ψ' = P(Ψ + I) integrated backward from Ψ(T) = 0.
PsiSolution psi_backward(const MatrixFn& p, const TailCertificate& cert, const PsiOptions& opt);

/// max over grid edges of ‖Ψ(t) + ∫_t^∞ P(s)[I + Ψ(s)] ds‖_F, with the part
/// beyond T bounded through the certificate. Two-sided solutions use
/// ∫_{-∞}^t on the negative axis.
double psi_residual(const PsiSolution& psi, const MatrixFn& p, const TailCertificate& cert);

/// Gronwall-type majorant e^{tail(t)} - 1 for ‖Ψ(t)‖.
double psi_majorant(const TailCertificate& cert, double t);

// Building blocks shared with the two-sided construction.
namespace detail {

enum class SeriesDirection { to_plus_infinity, from_minus_infinity };

struct SeriesResult {
  std::vector<Matrix> edge_values;
  std::vector<Matrix> node_values;
  int k_used = 0;
  std::vector<std::vector<double>> level_edge_norms;
  std::vector<std::vector<Matrix>> kept_levels;
};

SeriesResult run_series(const MatrixFn& p, const PanelGrid& grid, SeriesDirection dir, double tol, int k_max,
                        int keep_levels);

/// t2 selection on a solution whose edges/values are filled.
double select_t2(const PsiSolution& psi);

}  // namespace detail

}  // namespace aeq
