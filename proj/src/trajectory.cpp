#include "aeq/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aeq/errors.hpp"

namespace aeq {

void DenseSegment::eval(double t, Eigen::Ref<Vector> out) const {
  const double th = (t - origin) / h;
  const double th1 = 1.0 - th;
  out = coeffs.col(0) +
        th * (coeffs.col(1) + th1 * (coeffs.col(2) + th * (coeffs.col(3) + th1 * coeffs.col(4))));
}

Trajectory::Trajectory(std::vector<double> times, std::vector<Vector> states, std::vector<DenseSegment> segments)
    : times_(std::move(times)), states_(std::move(states)), segments_(std::move(segments)) {
  if (times_.empty() || times_.size() != states_.size() ||
      (times_.size() > 1 && segments_.size() + 1 != times_.size()))
    throw InputError("trajectory: inconsistent node/segment counts");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1])) throw InputError("trajectory: times must be strictly increasing");
  for (const auto& s : states_)
    if (!s.allFinite()) throw NumericalError("trajectory: non-finite state");
}

std::size_t Trajectory::segment_index(double t) const {
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, segments_.size() - 1);
}

void Trajectory::at(double t, Eigen::Ref<Vector> out) const {
  if (!contains(t))
    throw PreconditionError("trajectory evaluated at t=" + std::to_string(t) + " outside [" +
                            std::to_string(t_begin()) + ", " + std::to_string(t_end()) + "]");
  if (times_.size() == 1) {
    out = states_.front();
    return;
  }
  const std::size_t i = segment_index(t);
  if (t == times_[i]) {
    out = states_[i];
  } else if (t == times_[i + 1]) {
    out = states_[i + 1];
  } else {
    segments_[i].eval(t, out);
  }
}

Vector Trajectory::at(double t) const {
  Vector v(dim());
  at(t, v);
  return v;
}

Trajectory Trajectory::slice(int offset, int count) const {
  std::vector<Vector> states;
  states.reserve(states_.size());
  for (const auto& s : states_) states.push_back(s.segment(offset, count));
  std::vector<DenseSegment> segs;
  segs.reserve(segments_.size());
  for (const auto& s : segments_) segs.push_back({s.origin, s.h, s.coeffs.middleRows(offset, count)});
  return Trajectory(times_, std::move(states), std::move(segs));
}

}  // namespace aeq
