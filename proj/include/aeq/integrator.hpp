#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include "aeq/trajectory.hpp"

namespace aeq {

using Rhs = std::function<void(double t, const Vector& x, Vector& dx)>;

struct IntegrateOptions {
  /// Per-step local error bound, applied as absolute and relative tolerance.
  double tol = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 4'000'000;
};

/// Adaptive Dormand–Prince 5(4) from t_a to t_b; t_b < t_a integrates backward.
/// Throws IntegrationFailure (with the last reached t) on step-size underflow.
Trajectory integrate(const Rhs& rhs, const Vector& x0, double t_a, double t_b, const IntegrateOptions& opt);

/// x' = A(t) x
Trajectory integrate(const MatrixFunction& a, const Vector& x0, double t_a, double t_b, double tol);
/// x' = A(t) x + f(t, x)
Trajectory integrate(const MatrixFunction& a, const StateMap& forcing, const Vector& x0, double t_a, double t_b,
                     double tol);

}  // namespace aeq
