#pragma once

#include <vector>

#include "aeq/matrix_function.hpp"

namespace aeq {

/// Continuous extension of one accepted step: y(θ) with θ = (t - origin)/h in [0, 1].
struct DenseSegment {
  double origin = 0.0;
  double h = 0.0;
  Eigen::Matrix<double, Eigen::Dynamic, 5> coeffs;

  void eval(double t, Eigen::Ref<Vector> out) const;
};

/// Solution of an ODE on a strictly increasing grid with a dense interpolant
/// between nodes (4th-order Dormand–Prince continuous extension).
class Trajectory {
 public:
  Trajectory() = default;
  /// `segments[i]` covers [times[i], times[i+1]].
  Trajectory(std::vector<double> times, std::vector<Vector> states, std::vector<DenseSegment> segments);

  int dim() const { return states_.empty() ? 0 : static_cast<int>(states_.front().size()); }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  bool contains(double t) const { return !times_.empty() && t >= t_begin() && t <= t_end(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vector>& states() const { return states_; }
  std::size_t size() const { return times_.size(); }
  static constexpr int interpolation_order() { return 4; }

  /// Dense evaluation; node times return the stored state exactly.
  Vector at(double t) const;
  void at(double t, Eigen::Ref<Vector> out) const;

  /// Components [offset, offset+count) as a trajectory of their own.
  Trajectory slice(int offset, int count) const;

 private:
  std::size_t segment_index(double t) const;

  std::vector<double> times_;
  std::vector<Vector> states_;
  std::vector<DenseSegment> segments_;
};

}  // namespace aeq
