#include "aeq/quasilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aeq/errors.hpp"
#include "aeq/integrator.hpp"
#include "aeq/quadrature.hpp"

namespace aeq {
namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double ipow(double x, int p) { return p == 0 ? 1.0 : std::pow(x, p); }

/// Certificates for (1+s)^p · e^{shift·s} · η(s) (one_plus) or s^p · e^{shift·s} · η(s).
/// Empty when the combined exponent does not decay.
std::vector<TailCertificate> weighted_envelope(const TailCertificate& eta, int p, double shift, bool one_plus) {
  const double lam = eta.lambda - shift;
  if (!(lam > 0.0)) return {};
  if (!one_plus) return {TailCertificate{eta.K, p + eta.m, lam, eta.t_star}};
  std::vector<TailCertificate> out;
  for (int j = 0; j <= p; ++j) out.push_back({eta.K * binomial(p, j), j + eta.m, lam, eta.t_star});
  return out;
}

/// η(s)·e^{shift·s} without forming e^{shift·s} separately.
std::function<double(double)> shifted_eta(const Eta& eta, double shift) {
  if (eta.function) {
    Expr e = eta.function->times_exp(shift);
    return [e](double s) { return e(s); };
  }
  const TailCertificate c = eta.cert;
  return [c, shift](double s) { return c.K * ipow(s, c.m) * std::exp(-(c.lambda - shift) * s); };
}

int matrix_rank(const Eigen::MatrixXcd& m, double threshold, std::vector<std::string>& warnings,
                const std::string& label) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > threshold) ++rank;
    if (s(i) > 1e-2 * threshold && s(i) < 1e2 * threshold)
      warnings.push_back("rank decision near tolerance for " + label + " (singular value " +
                         std::to_string(s(i)) + ")");
  }
  return rank;
}

}  // namespace

double quasi_horizon_limit(const SpectralData& spec) {
  const double r = std::max(std::fabs(spec.alpha), std::fabs(spec.beta));
  return r > 0.0 ? 600.0 / r : std::numeric_limits<double>::infinity();
}

SpectralData spectral_data(const Matrix& c, double fit_horizon, int samples) {
  if (c.rows() != c.cols() || c.rows() == 0) throw PreconditionError("spectral_data: C must be square");
  const int n = static_cast<int>(c.rows());
  SpectralData out;
  Eigen::EigenSolver<Matrix> es(c, false);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_data: eigenvalue computation failed");
  const Eigen::VectorXcd ev = es.eigenvalues();
  const double scale = std::max(1.0, c.norm());
  const double cluster_tol = 1e-5 * scale;

  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int i = 0; i < n; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    std::complex<double> sum = 0.0;
    int mult = 0;
    for (int j = i; j < n; ++j)
      if (!used[static_cast<std::size_t>(j)] && std::abs(ev(j) - ev(i)) <= cluster_tol) {
        used[static_cast<std::size_t>(j)] = true;
        sum += ev(j);
        ++mult;
      }
    const std::complex<double> lam = sum / static_cast<double>(mult);
    out.eigenvalues.push_back(lam);
    out.multiplicities.push_back(mult);
    const Eigen::MatrixXcd shifted =
        c.cast<std::complex<double>>() - lam * Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd power = shifted;
    int index = mult;
    for (int k = 1; k <= mult; ++k) {
      const double threshold = 1e-8 * std::pow(scale, k);
      const int r = matrix_rank(power, threshold, out.warnings,
                                "(C - λI)^" + std::to_string(k) + " at λ=" + std::to_string(lam.real()) + "+" +
                                    std::to_string(lam.imag()) + "i");
      if (r == n - mult) {
        index = k;
        break;
      }
      power = power * shifted;
    }
    out.indices.push_back(index);
  }

  out.alpha = std::numeric_limits<double>::infinity();
  out.beta = -std::numeric_limits<double>::infinity();
  for (const auto& l : out.eigenvalues) {
    out.alpha = std::min(out.alpha, l.real());
    out.beta = std::max(out.beta, l.real());
  }
  out.m_alpha = out.m_beta = 1;
  for (std::size_t k = 0; k < out.eigenvalues.size(); ++k) {
    const double re = out.eigenvalues[k].real();
    if (std::fabs(re - out.alpha) <= cluster_tol) out.m_alpha = std::max(out.m_alpha, out.indices[k]);
    if (std::fabs(re - out.beta) <= cluster_tol) out.m_beta = std::max(out.m_beta, out.indices[k]);
  }

  out.fit_horizon = fit_horizon;
  out.kappa1 = out.kappa2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = fit_horizon * i / std::max(1, samples - 1);
    const double fwd = mat_exp(c, t).stableNorm();
    const double bwd = mat_exp(c, -t).stableNorm();
    out.kappa1 = std::max(out.kappa1, fwd / (ipow(1.0 + t, out.m_beta - 1) * std::exp(out.beta * t)));
    out.kappa2 = std::max(out.kappa2, bwd / (ipow(1.0 + t, out.m_alpha - 1) * std::exp(-out.alpha * t)));
  }
  return out;
}

Verdict check_C3(const StateMap& f, const Eta& eta, const GridSpec& grid) {
  Verdict v;
  v.condition = "C3";
  v.pass = true;
  v.worst_value = -std::numeric_limits<double>::infinity();
  for (double t : grid.points()) {
    const double lip = f.lipschitz_bound(t);
    const double e = eta(t);
    const double excess = lip - e;
    if (excess > v.worst_value) {
      v.worst_value = excess;
      v.at_t = t;
    }
    if (!(lip <= e * (1.0 + 1e-12) + 1e-300)) v.pass = false;
  }
  if (eta.function) {
    const auto rep = validate_certificate([&](double t) { return std::fabs((*eta.function)(t)); }, eta.cert, grid);
    if (!rep.pass) {
      v.pass = false;
      v.note = "eta exceeds its certificate at t=" + std::to_string(rep.worst_t);
    }
  }
  if (v.note.empty()) v.note = "Lipschitz bound of f vs eta; worst_value = max(lip - eta)";
  return v;
}

C4Report check_C4(const SpectralData& spec, const Eta& eta, double tol) {
  C4Report r;
  r.verdict.condition = "C4";
  const int p = spec.poly_degree();
  const double shift = spec.beta - spec.alpha;
  const auto certs = weighted_envelope(eta.cert, p, shift, false);
  r.finite = !certs.empty();
  if (!r.finite) {
    r.L = std::numeric_limits<double>::infinity();
    r.verdict.pass = false;
    r.verdict.worst_value = r.L;
    r.verdict.note = "integrand envelope exponent beta - alpha - lambda_eta >= 0";
    return r;
  }
  const auto eta_shift = shifted_eta(eta, shift);
  const auto q = improper_integral([&](double t) { return ipow(t, p) * eta_shift(t); }, 0.0, certs, tol);
  r.L = q.value;
  r.error_bound = q.quadrature_error + q.tail_bound;
  r.verdict.pass = true;
  r.verdict.worst_value = r.L;
  r.verdict.at_t = q.cutoff;
  r.verdict.note = "L value; at_t is the quadrature cutoff";
  return r;
}

QuasiState integrate_u(const Matrix& c, const StateMap& f, const Vector& u0, double horizon, double tol,
                       const SpectralData& spec, const Eta& eta, double t0) {
  if (f.dim() != c.rows() || u0.size() != c.rows()) throw PreconditionError("integrate_u: dimension mismatch");
  if (!(t0 >= 0.0 && horizon > t0)) throw PreconditionError("integrate_u: need 0 <= t0 < T");
  if (std::max(std::fabs(spec.alpha), std::fabs(spec.beta)) * horizon > 700.0)
    throw PreconditionError("integrate_u: e^{Ct} overflows before T=" + std::to_string(horizon) +
                            "; use a horizon below " + std::to_string(quasi_horizon_limit(spec)));
  const int p = spec.poly_degree();
  const double shift = spec.beta - spec.alpha;
  const auto certs = weighted_envelope(eta.cert, p, shift, true);
  if (certs.empty()) throw PreconditionError("integrate_u: C4 fails for the supplied eta certificate");
  const auto eta_shift = shifted_eta(eta, shift);
  const auto lq = improper_integral([&](double s) { return ipow(1.0 + s, p) * eta_shift(s); }, t0, certs, 1e-10);

  QuasiState st;
  st.t0 = t0;
  st.k1 = spec.k1();
  st.L_gronwall = lq.value + lq.quadrature_error + lq.tail_bound;

  Rhs rhs = [&](double t, const Vector& u, Vector& du) {
    const Matrix e = mat_exp(c, t);
    const Matrix e_inv = mat_exp(c, -t);
    du = e_inv * f(t, e * u);
  };
  const IntegrateOptions io{1e-2 * tol};
  st.u = integrate(rhs, u0, t0, horizon, io);
  double m0 = 0.0;
  if (t0 > 0.0) {
    const Trajectory back = integrate(rhs, u0, t0, 0.0, io);
    for (const auto& s : back.states()) m0 = std::max(m0, s.norm());
  }
  st.gronwall_bound = std::max(m0, u0.norm() * std::exp(st.k1 * st.L_gronwall));
  for (std::size_t i = 0; i < st.u.size(); ++i) {
    const double un = st.u.states()[i].norm();
    if (un > 1.1 * st.gronwall_bound)
      throw NumericalError("integrate_u: |u| = " + std::to_string(un) + " exceeds the Gronwall bound " +
                           std::to_string(st.gronwall_bound) + " at t=" + std::to_string(st.u.times()[i]) +
                           "; the eta certificate is likely wrong");
  }
  st.c_u = st.u.states().back();
  st.tail_estimate = st.gronwall_bound * st.k1 * tail_integral(certs, horizon);
  return st;
}

LimitVector c_u_limit(const QuasiState& state, const SpectralData& spec, const Eta& eta) {
  const auto certs = weighted_envelope(eta.cert, spec.poly_degree(), spec.beta - spec.alpha, true);
  if (certs.empty()) throw PreconditionError("c_u_limit: C4 fails; the limit vector is not certified");
  LimitVector out;
  out.c_u = state.u.states().back();
  out.tail_bound = state.gronwall_bound * state.k1 * tail_integral(certs, state.u.t_end());
  return out;
}

AsymptoticRepresentation asymptotic_representation(const Matrix& c, const StateMap& f, const Vector& y0,
                                                   double horizon, double tol, const SpectralData& spec,
                                                   const Eta& eta, int samples) {
  AsymptoticRepresentation rep;
  rep.state = integrate_u(c, f, y0, horizon, tol, spec, eta, 0.0);
  rep.c = c_u_limit(rep.state, spec, eta).c_u;
  const int n = static_cast<int>(c.rows());
  auto g = [&](double s) -> Vector {
    const Matrix e = mat_exp(c, s);
    return mat_exp(c, -s) * f(s, e * rep.state.u.at(s));
  };
  for (int i = 0; i < samples; ++i) rep.t.push_back(i + 1 == samples ? horizon : horizon * i / (samples - 1));
  const auto& rule = gauss_legendre(16);
  std::vector<Vector> pieces(rep.t.size(), Vector::Zero(n));
  for (std::size_t i = 0; i + 1 < rep.t.size(); ++i) {
    const double a = rep.t[i], b = rep.t[i + 1];
    const int chunks = std::max(1, static_cast<int>(std::ceil((b - a) / 0.25)));
    const double w = (b - a) / chunks;
    for (int k = 0; k < chunks; ++k) {
      const double lo = a + k * w;
      const double mid = lo + 0.5 * w;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        pieces[i] += (0.5 * w * rule.weights[q]) * g(mid + 0.5 * w * rule.nodes[q]);
    }
  }
  rep.remainder.assign(rep.t.size(), Vector::Zero(n));
  Vector suffix = Vector::Zero(n);
  for (std::size_t i = rep.t.size(); i-- > 0;) {
    suffix += pieces[i];
    rep.remainder[i] = -suffix;
  }
  for (const auto& r : rep.remainder) rep.remainder_norm.push_back(r.norm());
  return rep;
}

GapCurve quasi_equivalence_gap(const Matrix& c, const StateMap& f, const QuasiState& state, const LimitVector& limit,
                               double tol, int samples) {
  GapCurve out;
  const double a = state.u.t_begin(), b = state.u.t_end();
  const int n = static_cast<int>(c.rows());
  for (int i = 0; i < samples; ++i) out.t.push_back(i + 1 == samples ? b : a + (b - a) * i / (samples - 1));
  const auto& rule = gauss_legendre(16);
  // G(t_i) = ∫_{t_i}^{t_{i+1}} e^{C(t_i - s)} f ds + e^{C(t_i - t_{i+1})} G(t_{i+1})
  std::vector<Vector> g(out.t.size(), Vector::Zero(n));
  for (std::size_t i = out.t.size() - 1; i-- > 0;) {
    const double lo = out.t[i], hi = out.t[i + 1];
    const int chunks = std::max(1, static_cast<int>(std::ceil((hi - lo) / 0.25)));
    const double w = (hi - lo) / chunks;
    Vector acc = Vector::Zero(n);
    for (int k = 0; k < chunks; ++k) {
      const double mid = lo + (k + 0.5) * w;
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = mid + 0.5 * w * rule.nodes[q];
        acc += (0.5 * w * rule.weights[q]) * (mat_exp(c, lo - s) * f(s, mat_exp(c, s) * state.u.at(s)));
      }
    }
    g[i] = acc + mat_exp(c, lo - hi) * g[i + 1];
  }
  for (std::size_t i = 0; i < out.t.size(); ++i)
    out.gap.push_back(g[i].norm() + mat_exp(c, out.t[i]).stableNorm() * limit.tail_bound);
  const auto w = decay_windows(out.t, out.gap, a, b);
  out.verdict.condition = "equivalence";
  out.verdict.pass = decays(w, tol);
  out.verdict.worst_value = w.final_max;
  out.verdict.at_t = w.at_t;
  out.verdict.note = "x(t) = e^{Ct} c_u vs y(t) = e^{Ct} u(t)";
  return out;
}

C5Report check_C5(const SpectralData& spec, const Eta& eta, const GridSpec& grid, double tol) {
  C5Report r;
  r.t = grid.points();
  const int a = spec.m_alpha - 1;
  const int b = spec.m_beta - 1;
  const double alpha = spec.alpha, beta = spec.beta;
  const auto& ec = eta.cert;
  const auto eta_beta = shifted_eta(eta, beta);
  const double qtol = 1e-3 * tol;

  // C5, in the shifted variable r = s - t
  const double lam_r = ec.lambda - beta + alpha;
  for (double t : r.t) {
    if (!(lam_r > 0.0)) {
      r.c5.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const int big = b + ec.m;
    std::vector<TailCertificate> certs;
    const double scale = ec.K * std::exp(-(ec.lambda - beta) * t);
    for (int j = 0; j <= big; ++j)
      certs.push_back({std::max(scale * binomial(big, j) * ipow(t, big - j), std::numeric_limits<double>::min()),
                       a + j, lam_r, std::max(0.0, ec.t_star - t)});
    const auto q = improper_integral(
        [&](double rr) { return ipow(rr, a) * ipow(t + rr, b) * std::exp(-alpha * rr) * eta_beta(t + rr); }, 0.0,
        certs, qtol);
    r.c5.push_back(q.value);
  }

  // Yakubovich
  const int p = a + b;
  const double lam_y = ec.lambda - beta;
  for (double t : r.t) {
    if (!(lam_y > 0.0)) {
      r.yakubovich.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const TailCertificate cert{ec.K, p + ec.m, lam_y, ec.t_star};
    const auto q = improper_integral([&](double s) { return ipow(s, p) * eta_beta(s); }, t,
                                     std::span<const TailCertificate>(&cert, 1), qtol);
    r.yakubovich.push_back(q.value);
  }
  if (!(lam_y > 0.0)) {
    const double t0 = grid.t0;
    double acc = 0.0, from = t0;
    for (double range : {10.0, 100.0, 1000.0, 10000.0}) {
      const double to = t0 + range;
      const int pieces = std::max(1, static_cast<int>(std::ceil((to - from) / 50.0)));
      const double w = (to - from) / pieces;
      for (int k = 0; k < pieces; ++k)
        acc += integrate_adaptive([&](double s) { return ipow(s, p) * eta_beta(s); }, from + k * w,
                                  from + (k + 1) * w, 1e-10)
                   .value;
      from = to;
      r.divergence_evidence.emplace_back(range, acc);
    }
  }

  auto judge = [&](const std::vector<double>& curve, const char* name, double lam) {
    Verdict v;
    v.condition = name;
    const auto w = decay_windows(r.t, curve, grid.t0, grid.t1);
    bool finite = std::all_of(curve.begin(), curve.end(), [](double x) { return std::isfinite(x); });
    v.pass = finite && decays(w, tol);
    v.worst_value = finite ? w.final_max : std::numeric_limits<double>::infinity();
    v.at_t = finite ? w.at_t : grid.t0;
    if (!(lam > 0.0)) v.note = "integrand not certifiably summable (certificate decay rate <= 0)";
    return v;
  };
  r.c5_verdict = judge(r.c5, "C5", lam_r);
  r.yakubovich_verdict = judge(r.yakubovich, "Eq14", lam_y);
  return r;
}

}  // namespace aeq
