#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace aeq {

/// Analytic decay envelope K·t^m·e^{-λt}, claimed valid for t ≥ t_star.
struct TailCertificate {
  double K = 1.0;
  int m = 0;
  double lambda = 1.0;
  double t_star = 0.0;

  double bound(double t) const;
  /// Throws InputError unless K > 0, m ≥ 0, λ > 0, t* ≥ 0.
  void check() const;
  bool operator==(const TailCertificate&) const = default;
};

/// Uniform sample grid on [t0, t1]; a seed jitters interior points reproducibly.
struct GridSpec {
  double t0 = 0.0;
  double t1 = 1.0;
  int count = 1001;
  std::optional<std::uint64_t> seed;

  std::vector<double> points() const;
};

struct CertificateReport {
  bool pass = true;
  double worst_excess = 0.0;  ///< max(env - bound), may be negative
  double worst_t = 0.0;
  int samples = 0;
};

/// PASS iff env(t) ≤ bound(t) (+1e-12 slack) at every sample of `grid` with t ≥ t*.
CertificateReport validate_certificate(const std::function<double(double)>& env, const TailCertificate& cert,
                                       const GridSpec& grid);

/// Smallest K making the envelope dominate `env` on the grid, times `safety`;
/// then re-validated on a grid four times finer. Throws NumericalError if that fails.
TailCertificate fit_certificate(const std::function<double(double)>& env, int m, double lambda, double t_star,
                                const GridSpec& grid, double safety = 1.01);

/// ∫_t^∞ K s^m e^{-λs} ds in closed form (repeated integration by parts).
double tail_integral(const TailCertificate& cert, double t);
double tail_integral(std::span<const TailCertificate> certs, double t);

/// Smallest t₁ ≥ t* (to bisection resolution) with tail_integral(cert, t₁) < eps.
double find_smallness_point(const TailCertificate& cert, double eps);
double find_smallness_point(std::span<const TailCertificate> certs, double eps);

struct ImproperIntegral {
  double value = 0.0;           ///< quadrature on [a, cutoff]
  double quadrature_error = 0.0;
  double tail_bound = 0.0;      ///< certified bound on |∫_cutoff^∞|
  double cutoff = 0.0;
};

/// ∫_a^∞ f with |f| ≤ Σ certs: adaptive quadrature to a cutoff where the
/// certified tail drops below tol/2, plus that tail as an error bound.
ImproperIntegral improper_integral(const std::function<double(double)>& f, double a,
                                   std::span<const TailCertificate> envelope, double tol);

}  // namespace aeq
