#pragma once

#include <optional>

#include "aeq/integrator.hpp"

namespace aeq {

/// X(t) with X(0) = I for x' = A(t)x, on [0, horizon] and optionally [-horizon, 0].
class FundamentalMatrix {
 public:
  FundamentalMatrix(MatrixFunction a, Trajectory forward, std::optional<Trajectory> backward, double tol);

  int dim() const { return a_.dim(); }
  const MatrixFunction& system() const { return a_; }
  double t_min() const { return backward_ ? backward_->t_begin() : 0.0; }
  double t_max() const { return forward_.t_end(); }
  bool two_sided() const { return backward_.has_value(); }
  double tol() const { return tol_; }

  Matrix operator()(double t) const;
  /// Column j as a trajectory of its own (forward half-axis).
  Trajectory column(int j) const;
  /// Node times of the underlying integration (both halves, increasing).
  std::vector<double> grid() const;

 private:
  MatrixFunction a_;
  Trajectory forward_;
  std::optional<Trajectory> backward_;
  double tol_;
};

FundamentalMatrix fundamental_matrix(const MatrixFunction& a, double horizon, double tol, bool two_sided = false);

/// X(t)^{-1} by LU; throws NumericalError naming t if X(t) is numerically singular.
Matrix inverse_at(const FundamentalMatrix& x, double t);

/// e^{Ct}
Matrix mat_exp(const Matrix& c, double t);

/// Largest |log|det X(t)| - ∫_0^t trace A| over the integration grid.
double liouville_defect(const FundamentalMatrix& x);

/// Frobenius-norm residual ‖X'(t) - A(t)X(t)‖ estimated by central differences of the dense output.
double ode_residual(const FundamentalMatrix& x, double t);

}  // namespace aeq
