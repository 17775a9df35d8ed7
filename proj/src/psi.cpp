#include "aeq/psi.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "aeq/errors.hpp"
#include "aeq/kernels.hpp"
#include "aeq/quadrature.hpp"

namespace aeq {

PerturbationMatrix::PerturbationMatrix(std::shared_ptr<const FundamentalMatrix> x, MatrixFunction b)
    : x_(std::move(x)), b_(std::move(b)) {
  if (!x_ || x_->dim() != b_.dim()) throw PreconditionError("build_P: dimension mismatch between X and B");
}

Matrix PerturbationMatrix::operator()(double t) const {
  if (t < x_->t_min() || t > x_->t_max())
    throw PreconditionError("P(t) requested at t=" + std::to_string(t) + " outside the fundamental-matrix horizon");
  if (b_.is_zero()) return Matrix::Zero(dim(), dim());
  const Matrix xt = (*x_)(t);
  const Matrix bx = b_(t) * xt;
  if (t == 0.0) return bx;
  Eigen::PartialPivLU<Matrix> lu(xt);
  if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon()))
    throw NumericalError("X(t) numerically singular at t=" + std::to_string(t));
  return lu.solve(bx);
}

std::vector<double> PerturbationMatrix::norm_samples(const GridSpec& grid) const {
  std::vector<double> out;
  for (double t : grid.points()) out.push_back(norm(t));
  return out;
}

MatrixFn PerturbationMatrix::as_function() const {
  return [self = *this](double t) { return self(t); };
}

PerturbationMatrix build_P(std::shared_ptr<const FundamentalMatrix> x, const MatrixFunction& b) {
  return PerturbationMatrix(std::move(x), b);
}

Matrix PsiSolution::at(double t) const {
  if (!(t >= t_begin() && t <= t_end()))
    throw PreconditionError("Ψ requested at t=" + std::to_string(t) + " outside its grid");
  const auto& edges = grid.edges();
  auto it = std::lower_bound(edges.begin(), edges.end(), t);
  if (it != edges.end() && *it == t) return edge_values[static_cast<std::size_t>(it - edges.begin())];
  const std::size_t p = grid.panel_of(t);
  const Vector w = grid.interpolation_weights(p, t);
  const std::size_t q = static_cast<std::size_t>(grid.order());
  Matrix out = Matrix::Zero(dim(), dim());
  for (std::size_t s = 0; s < q; ++s) out += w(static_cast<Eigen::Index>(s)) * node_values[p * q + s];
  return out;
}

double psi_majorant(const TailCertificate& cert, double t) { return std::expm1(tail_integral(cert, t)); }

double psi_horizon(const TailCertificate& cert, const PsiOptions& opt) {
  if (opt.horizon) return *opt.horizon;
  return find_smallness_point(cert, 0.5 * opt.tol);
}

namespace detail {
namespace {

using Soa = std::vector<std::vector<double>>;

Soa make_soa(int entries, std::size_t len) { return Soa(static_cast<std::size_t>(entries), std::vector<double>(len, 0.0)); }

}  // namespace

SeriesResult run_series(const MatrixFn& p_fn, const PanelGrid& grid, SeriesDirection dir, double tol, int k_max,
                        int keep_levels) {
  const auto& nodes = grid.nodes();
  const std::size_t count = nodes.size();
  const std::size_t q = static_cast<std::size_t>(grid.order());
  const std::size_t panels = grid.panels();
  const Matrix p0 = p_fn(nodes.front());
  const int n = static_cast<int>(p0.rows());
  const int nn = n * n;

  // P at nodes, entry (i, l) -> pn[i*n + l]
  Soa pn = make_soa(nn, count);
  for (std::size_t k = 0; k < count; ++k) {
    const Matrix pk = k == 0 ? p0 : p_fn(nodes[k]);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) pn[static_cast<std::size_t>(i * n + l)][k] = pk(i, l);
  }

  std::vector<double> right(q * q), left(q * q);
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t s = 0; s < q; ++s) {
      right[r * q + s] = grid.right_integration()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
      left[r * q + s] = grid.left_integration()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
    }
  const std::span<const double> w(grid.ref_weights());

  SeriesResult out;
  Soa prev;  // Ψ_{k-1} at nodes; empty means identity
  Soa sum = make_soa(nn, count);
  std::vector<Matrix> edge_sum(panels + 1, Matrix::Zero(n, n));
  Soa f = make_soa(nn, count);
  Soa level = make_soa(nn, count);
  std::vector<double> panel_int(panels), acc(panels);
  std::vector<Matrix> level_edges(panels + 1);
  std::vector<double> sq(count);

  for (int k = 1; k <= k_max; ++k) {
    if (prev.empty()) {
      f = pn;
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          auto& fij = f[static_cast<std::size_t>(i * n + j)];
          std::fill(fij.begin(), fij.end(), 0.0);
          for (int l = 0; l < n; ++l)
            kernels::multiply_accumulate(fij, pn[static_cast<std::size_t>(i * n + l)],
                                         prev[static_cast<std::size_t>(l * n + j)]);
        }
    }
    for (auto& m : level_edges) m.setZero(n, n);
    for (int e = 0; e < nn; ++e) {
      const auto& fe = f[static_cast<std::size_t>(e)];
      auto& le = level[static_cast<std::size_t>(e)];
      for (std::size_t p = 0; p < panels; ++p)
        panel_int[p] = grid.half_width(p) * kernels::dot(w, std::span<const double>(fe).subspan(p * q, q));
      const int i = e / n, j = e % n;
      if (dir == SeriesDirection::to_plus_infinity) {
        double suffix = 0.0;
        for (std::size_t pp = panels; pp-- > 0;) {
          acc[pp] = suffix;
          suffix += panel_int[pp];
        }
        for (std::size_t p = 0; p < panels; ++p) {
          const auto fp = std::span<const double>(fe).subspan(p * q, q);
          for (std::size_t r = 0; r < q; ++r)
            le[p * q + r] = -(grid.half_width(p) * kernels::dot(std::span<const double>(right).subspan(r * q, q), fp) +
                              acc[p]);
          level_edges[p](i, j) = -(panel_int[p] + acc[p]);
        }
        level_edges[panels](i, j) = 0.0;
      } else {
        double prefix = 0.0;
        level_edges[0](i, j) = 0.0;
        for (std::size_t p = 0; p < panels; ++p) {
          const auto fp = std::span<const double>(fe).subspan(p * q, q);
          for (std::size_t r = 0; r < q; ++r)
            le[p * q + r] = grid.half_width(p) * kernels::dot(std::span<const double>(left).subspan(r * q, q), fp) +
                            prefix;
          prefix += panel_int[p];
          level_edges[p + 1](i, j) = prefix;
        }
      }
    }

    // level norms
    std::fill(sq.begin(), sq.end(), 0.0);
    for (const auto& le : level) kernels::accumulate_square(sq, le);
    double sup = std::sqrt(std::max(0.0, kernels::max_value(sq)));
    std::vector<double> edge_norms(panels + 1);
    for (std::size_t e = 0; e <= panels; ++e) {
      edge_norms[e] = level_edges[e].norm();
      sup = std::max(sup, edge_norms[e]);
      edge_sum[e] += level_edges[e];
    }
    for (int e = 0; e < nn; ++e) kernels::axpy(1.0, level[static_cast<std::size_t>(e)], sum[static_cast<std::size_t>(e)]);
    out.level_edge_norms.push_back(std::move(edge_norms));
    if (k <= keep_levels) out.kept_levels.push_back(level_edges);
    out.k_used = k;
    if (!std::isfinite(sup)) throw NumericalError("Ψ series produced non-finite values at level " + std::to_string(k));
    if (sup < tol) break;
    if (k == k_max)
      throw NumericalError("Ψ series did not converge within k_max=" + std::to_string(k_max) +
                           " levels (last level sup " + std::to_string(sup) +
                           "); start the grid later (larger t1, i.e. smaller eps)");
    prev = level;
  }

  out.edge_values = std::move(edge_sum);
  out.node_values.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = sum[static_cast<std::size_t>(i * n + j)][k];
    out.node_values[k] = std::move(m);
  }
  return out;
}

double select_t2(const PsiSolution& psi) {
  const auto& edges = psi.grid.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (edges[e] < psi.t1 || edges[e] < 0.0) continue;
    if (psi.edge_values[e].norm() < 0.5) return edges[e];
  }
  throw NumericalError("no grid point t2 ≥ t1 with ‖Ψ(t2)‖_F < 1/2");
}

}  // namespace detail

namespace {

struct Setup {
  double t1;
  double horizon;
  double t_start;
};

Setup setup(const TailCertificate& cert, const PsiOptions& opt) {
  cert.check();
  if (!(opt.eps > 0.0 && opt.eps < 1.0)) throw PreconditionError("psi: eps must lie in (0, 1)");
  if (opt.k_max < 1) throw PreconditionError("psi: k_max must be at least 1");
  if (!(opt.tol > 0.0)) throw PreconditionError("psi: tol must be positive");
  Setup s;
  s.t1 = find_smallness_point(cert, opt.eps);
  s.horizon = psi_horizon(cert, opt);
  s.t_start = opt.t_start.value_or(s.t1);
  if (!(s.t1 <= s.horizon))
    throw PreconditionError("psi: smallness point t1=" + std::to_string(s.t1) + " exceeds horizon T=" +
                            std::to_string(s.horizon));
  if (!(s.t_start < s.horizon)) throw PreconditionError("psi: grid start must precede the horizon");
  return s;
}

}  // namespace

PsiSolution psi_series(const MatrixFn& p, const TailCertificate& cert, const PsiOptions& opt) {
  const Setup s = setup(cert, opt);
  PsiSolution psi;
  psi.grid = PanelGrid::uniform(s.t_start, s.horizon, opt.panel_width, opt.order);
  auto res = detail::run_series(p, psi.grid, detail::SeriesDirection::to_plus_infinity, opt.tol, opt.k_max,
                                opt.keep_levels);
  psi.edge_values = std::move(res.edge_values);
  psi.node_values = std::move(res.node_values);
  psi.level_edge_norms = std::move(res.level_edge_norms);
  psi.kept_levels = std::move(res.kept_levels);
  psi.k_used = res.k_used;
  psi.horizon = s.horizon;
  psi.eps = opt.eps;
  psi.t1 = s.t1;
  psi.tail_at_horizon = tail_integral(cert, s.horizon);
  psi.t2 = detail::select_t2(psi);
  psi.residual = psi_residual(psi, p, cert);
  return psi;
}

PsiSolution psi_backward(const MatrixFn& p, const TailCertificate& cert, const PsiOptions& opt) {
  const Setup s = setup(cert, opt);
  PsiSolution psi;
  psi.grid = PanelGrid::uniform(s.t_start, s.horizon, opt.panel_width, opt.order);
  const int n = static_cast<int>(p(s.horizon).rows());
  Rhs rhs = [&p, n](double t, const Vector& x, Vector& dx) {
    Eigen::Map<const Matrix> psi_m(x.data(), n, n);
    const Matrix pt = p(t);
    dx.resize(n * n);
    Eigen::Map<Matrix> d(dx.data(), n, n);
    d.noalias() = pt * psi_m;
    d += pt;
  };
  const Trajectory traj =
      integrate(rhs, Vector::Zero(n * n), s.horizon, s.t_start, IntegrateOptions{1e-2 * opt.tol});
  auto sample = [&](double t) {
    const Vector v = traj.at(t);
    return Matrix(Eigen::Map<const Matrix>(v.data(), n, n));
  };
  for (double t : psi.grid.edges()) psi.edge_values.push_back(sample(t));
  for (double t : psi.grid.nodes()) psi.node_values.push_back(sample(t));
  psi.horizon = s.horizon;
  psi.eps = opt.eps;
  psi.t1 = s.t1;
  psi.tail_at_horizon = tail_integral(cert, s.horizon);
  psi.t2 = detail::select_t2(psi);
  psi.residual = psi_residual(psi, p, cert);
  return psi;
}

double psi_residual(const PsiSolution& psi, const MatrixFn& p, const TailCertificate& cert) {
  const auto& rule = gauss_legendre(12);
  const auto& edges = psi.grid.edges();
  const std::size_t panels = psi.grid.panels();
  const int n = psi.dim();
  const Matrix id = Matrix::Identity(n, n);
  std::vector<Matrix> contrib(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    const double c = 0.5 * (edges[k] + edges[k + 1]);
    const double h = 0.5 * (edges[k + 1] - edges[k]);
    Matrix acc = Matrix::Zero(n, n);
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      const double s = c + h * rule.nodes[g];
      acc += rule.weights[g] * (p(s) * (id + psi.at(s)));
    }
    contrib[k] = h * acc;
  }
  double worst = 0.0;
  // Ψ(t) = -∫_t^∞ P(I+Ψ) where t ≥ 0 (or on one-sided grids)
  Matrix suffix = Matrix::Zero(n, n);
  for (std::size_t e = edges.size(); e-- > 0;) {
    if (e < panels) suffix += contrib[e];
    if (psi.two_sided && edges[e] < 0.0) break;
    worst = std::max(worst, (psi.edge_values[e] + suffix).norm());
  }
  if (psi.two_sided) {
    // Ψ(t) = ∫_{-∞}^t P(I+Ψ) for t < 0
    Matrix prefix = Matrix::Zero(n, n);
    for (std::size_t e = 0; e < edges.size() && edges[e] < 0.0; ++e) {
      if (e > 0) prefix += contrib[e - 1];
      worst = std::max(worst, (psi.edge_values[e] - prefix).norm());
    }
  }
  const double tail = tail_integral(cert, psi.horizon);
  return worst + tail * std::exp(tail);
}

}  // namespace aeq
