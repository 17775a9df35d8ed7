#include "aeq/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aeq/errors.hpp"

namespace aeq {

DecayWindows decay_windows(const std::vector<double>& t, const std::vector<double>& v, double origin, double end) {
  DecayWindows w;
  const double span = end - origin;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double f = (t[i] - origin) / span;
    if (f >= 0.9 - 1e-12 && f <= 1.0 + 1e-12 && v[i] >= w.final_max) {
      w.final_max = v[i];
      w.at_t = t[i];
    }
    if (f >= 0.45 - 1e-12 && f <= 0.5 + 1e-12) w.mid_max = std::max(w.mid_max, v[i]);
  }
  return w;
}

bool decays(const DecayWindows& w, double tol) {
  return w.final_max < tol && w.final_max <= w.mid_max + 1e-3 * tol;
}

MatrixFunction operator+(const MatrixFunction& a, const MatrixFunction& b) {
  if (a.dim() != b.dim()) throw PreconditionError("matrix function sum: dimension mismatch");
  std::vector<Expr> e;
  for (std::size_t k = 0; k < a.entries().size(); ++k) {
    auto terms = a.entries()[k].terms();
    const auto& tb = b.entries()[k].terms();
    terms.insert(terms.end(), tb.begin(), tb.end());
    e.emplace_back(std::move(terms));
  }
  const Parity p = a.parity() == b.parity() ? a.parity() : Parity::none;
  return MatrixFunction(a.dim(), std::move(e), p);
}

EquivalenceMap build_map(const FundamentalMatrix& x, const PsiSolution& psi) {
  const double t2 = psi.t2;
  if (t2 < x.t_min() || t2 > x.t_max()) throw PreconditionError("build_map: t2 outside the fundamental-matrix horizon");
  const Matrix psi2 = psi.at(t2);
  if (!(psi2.norm() < 1.0)) throw PreconditionError("build_map: ‖Ψ(t2)‖ must be below 1");
  const int n = x.dim();
  const Matrix xt = x(t2);
  Eigen::JacobiSVD<Matrix> svd_x(xt);
  const auto sx = svd_x.singularValues();
  const double cond_x = sx(0) / sx(sx.size() - 1);
  if (!(cond_x < 1e12)) throw NumericalError("build_map: X(t2) ill-conditioned (cond " + std::to_string(cond_x) + ")");
  const Matrix x_inv = inverse_at(x, t2);
  const Matrix id = Matrix::Identity(n, n);
  EquivalenceMap map;
  map.t2 = t2;
  map.M = xt * (id + psi2) * x_inv;
  map.M_inv = xt * (id + psi2).inverse() * x_inv;
  Eigen::JacobiSVD<Matrix> svd(map.M);
  const auto s = svd.singularValues();
  map.condition = s(0) / s(s.size() - 1);
  const double defect = (map.M * map.M_inv - id).norm();
  if (!(defect <= 1e-10 * map.condition))
    throw NumericalError("build_map: M·M_inv deviates from I by " + std::to_string(defect));
  map.psi_horizon = psi.horizon;
  map.psi_levels = psi.k_used;
  map.psi_residual = psi.residual;
  map.x_tol = x.tol();
  return map;
}

Vector map_solution(const EquivalenceMap& map, const Vector& v, MapDirection dir) {
  return dir == MapDirection::x_to_y ? Vector(map.M * v) : Vector(map.M_inv * v);
}

int transported_rank(const EquivalenceMap& map, const std::vector<Vector>& basis, double rel_tol) {
  if (basis.empty()) return 0;
  Matrix m(map.M.rows(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = map.M * basis[j];
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++rank;
  return rank;
}

C2Report check_C2(const FundamentalMatrix& x, const PsiSolution& psi, const TailCertificate& cert, double tol,
                  int samples) {
  C2Report r;
  const double a = std::max(psi.t_begin(), 0.0);
  const double b = std::min(psi.t_end(), x.t_max());
  for (int i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? b : a + (b - a) * i / (samples - 1);
    const Matrix xt = x(t);
    r.curve.t.push_back(t);
    r.curve.value.push_back((xt * psi.at(t)).norm());
    r.curve.envelope.push_back(xt.norm() * psi_majorant(cert, t));
  }
  const DecayWindows w = decay_windows(r.curve.t, r.curve.envelope, a, b);
  const double at_end = r.curve.envelope.back();
  // "decreasing over the last decade": the final window does not exceed the one before it
  double prev_window = 0.0;
  for (std::size_t i = 0; i < r.curve.t.size(); ++i) {
    const double f = (r.curve.t[i] - a) / (b - a);
    if (f >= 0.8 - 1e-12 && f <= 0.9 + 1e-12) prev_window = std::max(prev_window, r.curve.envelope[i]);
  }
  r.verdict.condition = "C2";
  r.verdict.worst_value = at_end;
  r.verdict.at_t = b;
  r.verdict.pass = at_end < tol && w.final_max <= prev_window + 1e-3 * tol;
  r.verdict.note = "certified envelope ‖X(t)‖(e^{tail(t)}-1)";
  return r;
}

EquivalenceReport equivalence_report(const MatrixFunction& a, const MatrixFunction& b, const EquivalenceMap& map,
                                     const std::vector<Vector>& initial, double horizon, const ReportOptions& opt) {
  if (!(horizon > map.t2)) throw PreconditionError("equivalence_report: horizon must exceed t2");
  const MatrixFunction ab = a + b;
  EquivalenceReport rep;
  for (int i = 0; i < opt.samples; ++i)
    rep.t.push_back(i + 1 == opt.samples ? horizon : map.t2 + (horizon - map.t2) * i / (opt.samples - 1));
  const double window_start = horizon - opt.window * (horizon - map.t2);
  rep.verdict.condition = "equivalence";
  rep.verdict.pass = true;
  rep.verdict.at_t = horizon;
  for (const auto& x0 : initial) {
    const Vector y0 = map.M * x0;
    const Trajectory xs = integrate(a, x0, map.t2, horizon, opt.integrator_tol);
    const Trajectory ys = integrate(ab, y0, map.t2, horizon, opt.integrator_tol);
    std::vector<double> gap;
    double worst = 0.0;
    double worst_t = horizon;
    for (double t : rep.t) {
      const double g = (xs.at(t) - ys.at(t)).norm();
      gap.push_back(g);
      if (t >= window_start && g >= worst) {
        worst = g;
        worst_t = t;
      }
    }
    rep.gaps.push_back(std::move(gap));
    rep.worst_per_vector.push_back(worst);
    if (worst >= rep.verdict.worst_value) {
      rep.verdict.worst_value = worst;
      rep.verdict.at_t = worst_t;
    }
    if (!(worst < opt.tol)) rep.verdict.pass = false;
  }
  return rep;
}

}  // namespace aeq
