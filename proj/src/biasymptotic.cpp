#include "aeq/biasymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aeq/errors.hpp"
#include "aeq/integrator.hpp"

namespace aeq {
namespace {

template <class F>
ParityCheck sample_parity(F&& f, double sign, double horizon, int samples) {
  ParityCheck c;
  c.scale = 1.0;
  for (int i = 1; i <= samples; ++i) {
    const double t = horizon * i / samples;
    const Matrix plus = f(t);
    const Matrix minus = f(-t);
    c.scale = std::max({c.scale, plus.norm(), minus.norm()});
    c.worst_deviation = std::max(c.worst_deviation, (minus - sign * plus).norm());
  }
  c.pass = c.worst_deviation <= 1e-9 * c.scale;
  return c;
}

/// Ψ' = P(I + Ψ) from (t0, Ψ0) to t1 at tolerance tol.
Trajectory continue_psi(const MatrixFn& p, const Matrix& psi0, double t0, double t1, double tol) {
  const int n = static_cast<int>(psi0.rows());
  Rhs rhs = [&p, n](double t, const Vector& x, Vector& dx) {
    Eigen::Map<const Matrix> m(x.data(), n, n);
    const Matrix pt = p(t);
    dx.resize(n * n);
    Eigen::Map<Matrix> d(dx.data(), n, n);
    d.noalias() = pt * m;
    d += pt;
  };
  const Vector x0 = Eigen::Map<const Vector>(psi0.data(), n * n);
  return integrate(rhs, x0, t0, t1, IntegrateOptions{tol});
}

Matrix sample(const Trajectory& traj, double t, int n) {
  const Vector v = traj.at(t);
  return Matrix(Eigen::Map<const Matrix>(v.data(), n, n));
}

std::vector<double> mirrored(const std::vector<double>& edges) {
  std::vector<double> out(edges.rbegin(), edges.rend());
  for (double& e : out) e = -e;
  return out;
}

/// Edges of [-T, T]: mirror of the positive grid, then [-t1, 0], [0, t1], then the positive grid.
std::vector<double> symmetric_edges(const PanelGrid& plus, double t1, double width) {
  std::vector<double> edges = mirrored(plus.edges());
  if (t1 > 0.0) {
    const auto mid = PanelGrid::uniform(0.0, t1, width, 2).edges();
    const auto left = mirrored(mid);
    edges.insert(edges.end(), left.begin() + 1, left.end());
    edges.insert(edges.end(), mid.begin() + 1, mid.end());
  }
  edges.insert(edges.end(), plus.edges().begin() + 1, plus.edges().end());
  return edges;
}

struct Setup {
  double t1;
  double horizon;
};

Setup setup(const TailCertificate& cert, const PsiOptions& opt) {
  cert.check();
  if (!(opt.eps > 0.0 && opt.eps < 1.0)) throw PreconditionError("psi: eps must lie in (0, 1)");
  Setup s;
  s.t1 = find_smallness_point(cert, opt.eps);
  s.horizon = psi_horizon(cert, opt);
  if (!(s.t1 < s.horizon))
    throw PreconditionError("psi: smallness point t1=" + std::to_string(s.t1) + " exceeds horizon T=" +
                            std::to_string(s.horizon));
  return s;
}

}  // namespace

ParityReport check_parity(const MatrixFunction& a, const MatrixFunction& b, const FundamentalMatrix& x,
                          const PerturbationMatrix& p, double horizon, int samples) {
  if (!x.two_sided() || x.t_min() > -horizon || x.t_max() < horizon)
    throw PreconditionError("check_parity: the fundamental matrix must cover [-T, T]");
  ParityReport r;
  r.A_odd = sample_parity([&](double t) { return a(t); }, -1.0, horizon, samples);
  r.B_even = sample_parity([&](double t) { return b(t); }, 1.0, horizon, samples);
  r.B_odd = sample_parity([&](double t) { return b(t); }, -1.0, horizon, samples);
  r.X_even = sample_parity([&](double t) { return x(t); }, 1.0, horizon, samples);
  r.P_odd = sample_parity([&](double t) { return p(t); }, -1.0, horizon, samples);
  r.P_even = sample_parity([&](double t) { return p(t); }, 1.0, horizon, samples);
  // sampled X and P carry integration error
  const double x_floor = 1e3 * x.tol();
  for (ParityCheck* c : {&r.X_even, &r.P_odd, &r.P_even})
    c->pass = c->worst_deviation <= std::max(1e-9, x_floor) * c->scale;
  return r;
}

TwoSidedPsi psi_two_sided(const MatrixFn& p, const TailCertificate& cert, const PsiOptions& opt,
                          std::optional<double> glue_tol) {
  const Setup s = setup(cert, opt);
  const double rk_tol = 1e-2 * opt.tol;
  TwoSidedPsi out;
  out.plus_grid = PanelGrid::uniform(s.t1, s.horizon, opt.panel_width, opt.order);
  out.minus_grid = PanelGrid(mirrored(out.plus_grid.edges()), opt.order);
  out.plus = detail::run_series(p, out.plus_grid, detail::SeriesDirection::to_plus_infinity, opt.tol, opt.k_max,
                                opt.keep_levels);
  out.minus = detail::run_series(p, out.minus_grid, detail::SeriesDirection::from_minus_infinity, opt.tol,
                                 opt.k_max, opt.keep_levels);
  const int n = static_cast<int>(out.plus.edge_values.front().rows());
  const Matrix plus_t1 = out.plus.edge_values.front();
  const Matrix minus_t1 = out.minus.edge_values.back();

  std::optional<Trajectory> plus_c, minus_c;
  if (s.t1 > 0.0) {
    plus_c = continue_psi(p, plus_t1, s.t1, -s.t1, rk_tol);
    minus_c = continue_psi(p, minus_t1, -s.t1, s.t1, rk_tol);
    const double d_left = (sample(*plus_c, -s.t1, n) - minus_t1).norm();
    const double d_right = (sample(*minus_c, s.t1, n) - plus_t1).norm();
    const double d_zero = (sample(*plus_c, 0.0, n) - sample(*minus_c, 0.0, n)).norm();
    out.glue_mismatch = d_left;
    out.glue_at = -s.t1;
    if (d_right > out.glue_mismatch) {
      out.glue_mismatch = d_right;
      out.glue_at = s.t1;
    }
    if (d_zero > out.glue_mismatch) {
      out.glue_mismatch = d_zero;
      out.glue_at = 0.0;
    }
  } else {
    out.glue_mismatch = (plus_t1 - minus_t1).norm();
    out.glue_at = 0.0;
  }
  const double limit = glue_tol.value_or(1e2 * opt.tol);
  if (!(out.glue_mismatch <= limit))
    throw GlueMismatch("two-sided Ψ: continuations of the half-axis solutions disagree by " +
                           std::to_string(out.glue_mismatch) + " at t=" + std::to_string(out.glue_at) +
                           " (is P(t) odd?)",
                       out.glue_mismatch, out.glue_at);

  PsiSolution& psi = out.psi;
  psi.grid = PanelGrid(symmetric_edges(out.plus_grid, s.t1, opt.panel_width), opt.order);
  const auto& edges = psi.grid.edges();
  const auto& nodes = psi.grid.nodes();
  const std::size_t q = static_cast<std::size_t>(opt.order);
  const std::size_t minus_panels = out.minus_grid.panels();
  const std::size_t plus_panels = out.plus_grid.panels();
  const std::size_t mid_panels = psi.grid.panels() - minus_panels - plus_panels;

  auto middle = [&](double t) { return t < 0.0 ? sample(*minus_c, t, n) : sample(*plus_c, t, n); };
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (e <= minus_panels)
      psi.edge_values.push_back(out.minus.edge_values[e]);
    else if (e < minus_panels + mid_panels)
      psi.edge_values.push_back(middle(edges[e]));
    else
      psi.edge_values.push_back(out.plus.edge_values[e - minus_panels - mid_panels]);
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::size_t panel = k / q;
    if (panel < minus_panels)
      psi.node_values.push_back(out.minus.node_values[k]);
    else if (panel < minus_panels + mid_panels)
      psi.node_values.push_back(middle(nodes[k]));
    else
      psi.node_values.push_back(out.plus.node_values[k - (minus_panels + mid_panels) * q]);
  }
  psi.horizon = s.horizon;
  psi.eps = opt.eps;
  psi.t1 = s.t1;
  psi.two_sided = true;
  psi.k_used = std::max(out.plus.k_used, out.minus.k_used);
  psi.level_edge_norms = out.plus.level_edge_norms;
  psi.kept_levels = out.plus.kept_levels;
  psi.tail_at_horizon = tail_integral(cert, s.horizon);
  psi.t2 = detail::select_t2(psi);
  psi.residual = psi_residual(psi, p, cert);
  out.symmetry_error = symmetry_error(psi);
  return out;
}

PsiSolution psi_plus_continued(const MatrixFn& p, const TailCertificate& cert, const PsiOptions& opt) {
  const Setup s = setup(cert, opt);
  const auto plus_grid = PanelGrid::uniform(s.t1, s.horizon, opt.panel_width, opt.order);
  auto plus = detail::run_series(p, plus_grid, detail::SeriesDirection::to_plus_infinity, opt.tol, opt.k_max,
                                 opt.keep_levels);
  const int n = static_cast<int>(plus.edge_values.front().rows());
  const Trajectory cont = continue_psi(p, plus.edge_values.front(), s.t1, -s.horizon, 1e-2 * opt.tol);

  PsiSolution psi;
  psi.grid = PanelGrid(symmetric_edges(plus_grid, s.t1, opt.panel_width), opt.order);
  const std::size_t q = static_cast<std::size_t>(opt.order);
  const std::size_t offset = psi.grid.panels() - plus_grid.panels();
  const auto& edges = psi.grid.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    psi.edge_values.push_back(e < offset ? sample(cont, edges[e], n) : plus.edge_values[e - offset]);
  const auto& nodes = psi.grid.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k)
    psi.node_values.push_back(k < offset * q ? sample(cont, nodes[k], n) : plus.node_values[k - offset * q]);
  psi.horizon = s.horizon;
  psi.eps = opt.eps;
  psi.t1 = s.t1;
  psi.two_sided = false;
  psi.k_used = plus.k_used;
  psi.level_edge_norms = std::move(plus.level_edge_norms);
  psi.kept_levels = std::move(plus.kept_levels);
  psi.tail_at_horizon = tail_integral(cert, s.horizon);
  psi.t2 = detail::select_t2(psi);
  psi.residual = psi_residual(psi, p, cert);
  return psi;
}

double symmetry_error(const PsiSolution& psi) {
  const auto& edges = psi.grid.edges();
  double worst = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::size_t m = edges.size() - 1 - e;
    const Matrix mirror =
        std::fabs(edges[m] + edges[e]) <= 1e-12 * std::max(1.0, std::fabs(edges[e])) ? psi.edge_values[m]
                                                                                      : psi.at(-edges[e]);
    worst = std::max(worst, (mirror - psi.edge_values[e]).norm());
  }
  return worst;
}

namespace {

EndVerdicts end_verdicts(const std::vector<double>& t, const std::vector<double>& v, double horizon, double tol,
                         const std::string& name) {
  EndVerdicts out;
  auto make = [&](double end) {
    const auto w = decay_windows(t, v, 0.0, end);
    Verdict verdict;
    verdict.condition = name;
    verdict.pass = decays(w, tol);
    verdict.worst_value = w.final_max;
    verdict.at_t = w.at_t;
    verdict.note = end < 0.0 ? "t -> -inf" : "t -> +inf";
    return verdict;
  };
  out.negative = make(-horizon);
  out.positive = make(horizon);
  return out;
}

}  // namespace

TwoSidedC2 check_C2_two_sided(const FundamentalMatrix& x, const PsiSolution& psi, const TailCertificate& cert,
                              double tol, int samples) {
  const double h = std::min({psi.t_end(), -psi.t_begin(), x.t_max(), -x.t_min()});
  if (!(h > 0.0)) throw PreconditionError("two-sided C2 needs Ψ and X on a symmetric interval");
  TwoSidedC2 r;
  std::vector<double> judged;
  for (int i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? h : -h + 2.0 * h * i / (samples - 1);
    const Matrix xt = x(t);
    const double value = (xt * psi.at(t)).norm();
    const double env = xt.norm() * psi_majorant(cert, std::fabs(t));
    r.curve.t.push_back(t);
    r.curve.value.push_back(value);
    r.curve.envelope.push_back(env);
    judged.push_back(std::max(value, env));
  }
  r.ends = end_verdicts(r.curve.t, judged, h, tol, "C2");
  return r;
}

BiequivalenceReport biequivalence_report(const MatrixFunction& a, const MatrixFunction& b, const EquivalenceMap& map,
                                         const std::vector<Vector>& initial, double horizon,
                                         const ReportOptions& opt) {
  if (!(horizon > std::fabs(map.t2))) throw PreconditionError("biequivalence_report: horizon must exceed |t2|");
  const MatrixFunction ab = a + b;
  BiequivalenceReport rep;
  const int samples = 2 * opt.samples - 1;
  for (int i = 0; i < samples; ++i)
    rep.t.push_back(i + 1 == samples ? horizon : -horizon + 2.0 * horizon * i / (samples - 1));
  std::vector<double> worst(rep.t.size(), 0.0);
  for (const auto& x0 : initial) {
    const Vector y0 = map.M * x0;
    const Trajectory xf = integrate(a, x0, map.t2, horizon, opt.integrator_tol);
    const Trajectory yf = integrate(ab, y0, map.t2, horizon, opt.integrator_tol);
    const Trajectory xb = integrate(a, x0, map.t2, -horizon, opt.integrator_tol);
    const Trajectory yb = integrate(ab, y0, map.t2, -horizon, opt.integrator_tol);
    std::vector<double> gap;
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
      const double t = rep.t[i];
      const double g = t >= map.t2 ? (xf.at(t) - yf.at(t)).norm() : (xb.at(t) - yb.at(t)).norm();
      gap.push_back(g);
      worst[i] = std::max(worst[i], g);
    }
    rep.gaps.push_back(std::move(gap));
  }
  rep.ends = end_verdicts(rep.t, worst, horizon, opt.tol, "biequivalence");
  rep.verdict.condition = "biequivalence";
  rep.verdict.pass = rep.ends.pass();
  const bool neg_worse = rep.ends.negative.worst_value >= rep.ends.positive.worst_value;
  rep.verdict.worst_value = neg_worse ? rep.ends.negative.worst_value : rep.ends.positive.worst_value;
  rep.verdict.at_t = neg_worse ? rep.ends.negative.at_t : rep.ends.positive.at_t;
  rep.verdict.note = "gap ‖x - y‖ on both half-axes";
  return rep;
}

}  // namespace aeq
