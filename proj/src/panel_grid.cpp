#include "aeq/panel_grid.hpp"

#include <algorithm>
#include <cmath>

#include "aeq/errors.hpp"
#include "aeq/quadrature.hpp"

namespace aeq {
namespace {

double lagrange(const std::vector<double>& x, std::size_t s, double t) {
  double v = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (j != s) v *= (t - x[j]) / (x[s] - x[j]);
  return v;
}

}  // namespace

PanelGrid::PanelGrid(std::vector<double> edges, int order) : edges_(std::move(edges)), order_(order) {
  if (edges_.size() < 2 || order_ < 2) throw PreconditionError("panel grid needs at least one panel");
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (!(edges_[i] > edges_[i - 1])) throw PreconditionError("panel edges must increase strictly");
  const auto& rule = gauss_legendre(order_);
  ref_nodes_ = rule.nodes;
  ref_weights_ = rule.weights;
  const std::size_t q = static_cast<std::size_t>(order_);
  nodes_.reserve(panels() * q);
  for (std::size_t p = 0; p < panels(); ++p) {
    const double c = 0.5 * (edges_[p] + edges_[p + 1]);
    const double h = half_width(p);
    for (double x : ref_nodes_) nodes_.push_back(c + h * x);
  }
  bary_.resize(q);
  for (std::size_t s = 0; s < q; ++s) {
    double w = 1.0;
    for (std::size_t j = 0; j < q; ++j)
      if (j != s) w /= (ref_nodes_[s] - ref_nodes_[j]);
    bary_[s] = w;
  }
  // exact for the degree q-1 basis polynomials
  right_.resize(order_, order_);
  left_.resize(order_, order_);
  for (std::size_t r = 0; r < q; ++r) {
    const double xr = ref_nodes_[r];
    for (std::size_t s = 0; s < q; ++s) {
      double acc_r = 0.0, acc_l = 0.0;
      for (std::size_t g = 0; g < q; ++g) {
        const double ur = 0.5 * (xr + 1.0) + 0.5 * (1.0 - xr) * ref_nodes_[g];
        const double ul = 0.5 * (xr - 1.0) + 0.5 * (xr + 1.0) * ref_nodes_[g];
        acc_r += ref_weights_[g] * lagrange(ref_nodes_, s, ur);
        acc_l += ref_weights_[g] * lagrange(ref_nodes_, s, ul);
      }
      right_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = 0.5 * (1.0 - xr) * acc_r;
      left_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) = 0.5 * (xr + 1.0) * acc_l;
    }
  }
}

PanelGrid PanelGrid::uniform(double a, double b, double max_width, int order) {
  if (!(b > a)) throw PreconditionError("panel grid: empty interval");
  const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / max_width - 1e-12)));
  std::vector<double> edges(count + 1);
  for (std::size_t i = 0; i <= count; ++i) edges[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count);
  edges.back() = b;
  return PanelGrid(std::move(edges), order);
}

std::size_t PanelGrid::panel_of(double t) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - edges_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, panels() - 1);
}

Vector PanelGrid::interpolation_weights(std::size_t p, double t) const {
  const double x = (t - 0.5 * (edges_[p] + edges_[p + 1])) / half_width(p);
  const auto q = static_cast<std::size_t>(order_);
  Vector w(order_);
  for (std::size_t s = 0; s < q; ++s) {
    if (x == ref_nodes_[s]) {
      w.setZero();
      w(static_cast<Eigen::Index>(s)) = 1.0;
      return w;
    }
  }
  double denom = 0.0;
  for (std::size_t s = 0; s < q; ++s) {
    w(static_cast<Eigen::Index>(s)) = bary_[s] / (x - ref_nodes_[s]);
    denom += w(static_cast<Eigen::Index>(s));
  }
  return w / denom;
}

}  // namespace aeq
