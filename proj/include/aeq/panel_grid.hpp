#pragma once

#include <vector>

#include "aeq/matrix_function.hpp"

namespace aeq {

/// Composite Gauss–Legendre discretization: panels between `edges`, each with
/// `order` nodes. Carries the reference spectral-integration matrices used to
/// integrate nodal data from a node to either end of its panel.
class PanelGrid {
 public:
  PanelGrid() = default;
  PanelGrid(std::vector<double> edges, int order);
  /// Uniform panels no wider than max_width.
  static PanelGrid uniform(double a, double b, double max_width, int order = 8);

  int order() const { return order_; }
  std::size_t panels() const { return edges_.size() - 1; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double begin() const { return edges_.front(); }
  double end() const { return edges_.back(); }
  double half_width(std::size_t p) const { return 0.5 * (edges_[p + 1] - edges_[p]); }
  std::size_t panel_of(double t) const;

  const std::vector<double>& ref_nodes() const { return ref_nodes_; }
  const std::vector<double>& ref_weights() const { return ref_weights_; }
  /// (r, s) = ∫_{x_r}^{1} ℓ_s on [-1, 1]
  const Matrix& right_integration() const { return right_; }
  /// (r, s) = ∫_{-1}^{x_r} ℓ_s on [-1, 1]
  const Matrix& left_integration() const { return left_; }
  /// Lagrange weights for evaluating nodal data of panel p at t.
  Vector interpolation_weights(std::size_t p, double t) const;

 private:
  std::vector<double> edges_;
  std::vector<double> nodes_;
  int order_ = 8;
  std::vector<double> ref_nodes_;
  std::vector<double> ref_weights_;
  std::vector<double> bary_;
  Matrix right_;
  Matrix left_;
};

}  // namespace aeq
