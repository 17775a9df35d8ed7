#include "aeq/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "aeq/errors.hpp"
#include "aeq/quadrature.hpp"

namespace aeq {

double TailCertificate::bound(double t) const {
  const double poly = m == 0 ? 1.0 : std::pow(t, m);
  return K * poly * std::exp(-lambda * t);
}

void TailCertificate::check() const {
  if (!(K > 0.0) || !std::isfinite(K)) throw InputError("certificate: K must be positive and finite");
  if (m < 0) throw InputError("certificate: m must be non-negative");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("certificate: lambda must be positive");
  if (!(t_star >= 0.0) || !std::isfinite(t_star)) throw InputError("certificate: t_star must be non-negative");
}

std::vector<double> GridSpec::points() const {
  std::vector<double> p(static_cast<std::size_t>(std::max(count, 1)));
  if (count <= 1) {
    p[0] = t0;
    return p;
  }
  const double dt = (t1 - t0) / (count - 1);
  for (int i = 0; i < count; ++i) p[static_cast<std::size_t>(i)] = t0 + dt * i;
  p.back() = t1;
  if (seed) {
    std::mt19937_64 rng(*seed);
    std::uniform_real_distribution<double> jitter(-0.45, 0.45);
    for (int i = 1; i + 1 < count; ++i) p[static_cast<std::size_t>(i)] += dt * jitter(rng);
  }
  return p;
}

CertificateReport validate_certificate(const std::function<double(double)>& env, const TailCertificate& cert,
                                       const GridSpec& grid) {
  CertificateReport r;
  r.worst_excess = -std::numeric_limits<double>::infinity();
  for (double t : grid.points()) {
    if (t < cert.t_star) continue;
    const double b = cert.bound(t);
    const double e = env(t);
    const double excess = e - b;
    ++r.samples;
    if (excess > r.worst_excess) {
      r.worst_excess = excess;
      r.worst_t = t;
    }
    if (!(e <= b + 1e-12 * std::max(1.0, b))) r.pass = false;
  }
  if (r.samples == 0) r.worst_excess = 0.0;
  return r;
}

TailCertificate fit_certificate(const std::function<double(double)>& env, int m, double lambda, double t_star,
                                const GridSpec& grid, double safety) {
  TailCertificate cert{1.0, m, lambda, t_star};
  double k = 0.0;
  for (double t : grid.points()) {
    if (t < t_star) continue;
    const double shape = cert.bound(t);
    const double e = env(t);
    if (shape > 0.0) {
      k = std::max(k, e / shape);
    } else if (e > 0.0) {
      throw NumericalError("fit_certificate: envelope nonzero where t^m vanishes (t=" + std::to_string(t) + ")");
    }
  }
  cert.K = std::max(k * safety, std::numeric_limits<double>::min());
  GridSpec fine = grid;
  fine.count = 4 * (grid.count - 1) + 1;
  fine.seed.reset();
  const auto report = validate_certificate(env, cert, fine);
  if (!report.pass)
    throw NumericalError("fit_certificate: fitted K=" + std::to_string(cert.K) + " violated at t=" +
                         std::to_string(report.worst_t) + " on the refined grid");
  return cert;
}

double tail_integral(const TailCertificate& cert, double t) {
  // ∫_t^∞ s^m e^{-λs} ds = e^{-λt} Σ_{j=0}^m m!/j! · t^j / λ^{m-j+1}
  const double lam = cert.lambda;
  double sum = 0.0;
  double coef = 1.0;  // m!/j! for j = m, m-1, ...
  for (int j = cert.m; j >= 0; --j) {
    const double tj = j == 0 ? 1.0 : std::pow(t, j);
    sum += coef * tj / std::pow(lam, cert.m - j + 1);
    coef *= j;
  }
  return cert.K * std::exp(-lam * t) * sum;
}

double tail_integral(std::span<const TailCertificate> certs, double t) {
  double s = 0.0;
  for (const auto& c : certs) s += tail_integral(c, t);
  return s;
}

double find_smallness_point(std::span<const TailCertificate> certs, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("find_smallness_point: eps must be positive");
  double lo = 0.0;
  for (const auto& c : certs) lo = std::max(lo, c.t_star);
  if (tail_integral(certs, lo) < eps) return lo;
  double step = 1.0;
  double hi = lo + step;
  while (!(tail_integral(certs, hi) < eps)) {
    lo = hi;
    step *= 2.0;
    hi = lo + step;
    if (!std::isfinite(hi)) throw NumericalError("find_smallness_point: no finite smallness point");
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (tail_integral(certs, mid) < eps ? hi : lo) = mid;
  }
  return hi;
}

double find_smallness_point(const TailCertificate& cert, double eps) {
  return find_smallness_point(std::span<const TailCertificate>(&cert, 1), eps);
}

ImproperIntegral improper_integral(const std::function<double(double)>& f, double a,
                                   std::span<const TailCertificate> envelope, double tol) {
  ImproperIntegral out;
  out.cutoff = std::max(a, find_smallness_point(envelope, 0.5 * tol));
  out.tail_bound = tail_integral(envelope, out.cutoff);
  if (out.cutoff > a) {
    // split long ranges so the adaptive rule sees the structure
    const int pieces = std::max(1, static_cast<int>(std::ceil((out.cutoff - a) / 8.0)));
    const double w = (out.cutoff - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
      const double lo = a + w * i;
      const double hi = i + 1 == pieces ? out.cutoff : lo + w;
      const auto q = integrate_adaptive(f, lo, hi, 0.5 * tol / pieces);
      out.value += q.value;
      out.quadrature_error += q.error;
    }
  }
  return out;
}

}  // namespace aeq
