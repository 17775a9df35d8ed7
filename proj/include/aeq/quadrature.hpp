#pragma once

#include <functional>
#include <vector>

namespace aeq {

/// Gauss–Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes by Newton iteration on P_n; cached per order.
const GaussLegendre& gauss_legendre(int order);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Globally adaptive Gauss–Kronrod 7–15 on [a, b] (a > b allowed, sign flips).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                                    int max_intervals = 4000);

}  // namespace aeq
