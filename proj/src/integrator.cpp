#include "aeq/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aeq/errors.hpp"

namespace aeq {
namespace {

// Dormand–Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double rms_scaled(const Vector& v, const Vector& ref, double tol) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double sc = tol + tol * std::fabs(ref(i));
    s += (v(i) / sc) * (v(i) / sc);
  }
  return std::sqrt(s / static_cast<double>(std::max<Eigen::Index>(1, v.size())));
}

double initial_step(const Rhs& rhs, double t0, const Vector& x0, const Vector& f0, double dir, double tol,
                    double max_step) {
  const double dn0 = rms_scaled(x0, x0, tol);
  const double dn1 = rms_scaled(f0, x0, tol);
  double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
  h0 = std::min(h0, max_step);
  Vector x1 = x0 + dir * h0 * f0;
  Vector f1(x0.size());
  rhs(t0 + dir * h0, x1, f1);
  const double dn2 = rms_scaled(f1 - f0, x0, tol) / h0;
  const double m = std::max(dn1, dn2);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
  return std::min({100 * h0, h1, max_step});
}

}  // namespace

Trajectory integrate(const Rhs& rhs, const Vector& x0, double t_a, double t_b, const IntegrateOptions& opt) {
  if (!(opt.tol > 0.0)) throw PreconditionError("integrate: tol must be positive");
  if (!(t_a != t_b) || !std::isfinite(t_a) || !std::isfinite(t_b))
    throw PreconditionError("integrate: degenerate span");
  const double dir = t_b > t_a ? 1.0 : -1.0;
  const Eigen::Index n = x0.size();
  const double tol = opt.tol;

  std::vector<double> times{t_a};
  std::vector<Vector> states{x0};
  std::vector<DenseSegment> segments;

  Vector k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y(n), y1(n), err(n);
  double t = t_a;
  Vector x = x0;
  rhs(t, x, k1);
  double h = initial_step(rhs, t, x, k1, dir, tol, opt.max_step);
  bool rejected_last = false;

  for (std::size_t step = 0; dir * (t_b - t) > 0.0; ++step) {
    if (step >= opt.max_steps)
      throw IntegrationFailure("integrate: step budget exhausted at t=" + std::to_string(t), t);
    const double min_h = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t));
    bool last = false;
    if (h >= dir * (t_b - t)) {
      h = dir * (t_b - t);
      last = true;
    } else if (h < min_h) {
      throw IntegrationFailure("integrate: step size underflow at t=" + std::to_string(t), t);
    }
    const double hs = dir * h;

    y = x + hs * a21 * k1;
    rhs(t + c2 * hs, y, k2);
    y = x + hs * (a31 * k1 + a32 * k2);
    rhs(t + c3 * hs, y, k3);
    y = x + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * hs, y, k4);
    y = x + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * hs, y, k5);
    y = x + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + hs, y, k6);
    y1 = x + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double t_new = last ? t_b : t + hs;
    rhs(t_new, y1, k7);
    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double e = 0.0;
    bool finite = y1.allFinite();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = tol + tol * std::max(std::fabs(x(i)), std::fabs(y1(i)));
      e = std::max(e, std::fabs(err(i)) / sc);
    }
    if (!finite || !std::isfinite(e)) {
      h *= 0.2;
      rejected_last = true;
      continue;
    }

    if (e <= 1.0) {
      DenseSegment seg;
      seg.origin = t;
      seg.h = t_new - t;
      seg.coeffs.resize(n, 5);
      const Vector ydiff = y1 - x;
      const Vector bspl = hs * k1 - ydiff;
      seg.coeffs.col(0) = x;
      seg.coeffs.col(1) = ydiff;
      seg.coeffs.col(2) = bspl;
      seg.coeffs.col(3) = ydiff - hs * k7 - bspl;
      seg.coeffs.col(4) = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      segments.push_back(std::move(seg));
      times.push_back(t_new);
      states.push_back(y1);
      t = t_new;
      x = y1;
      k1 = k7;
      double fac = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
      if (rejected_last) fac = std::min(fac, 1.0);
      h = std::min(h * fac, opt.max_step);
      rejected_last = false;
    } else {
      h *= std::clamp(0.9 * std::pow(e, -0.2), 0.2, 1.0);
      rejected_last = true;
    }
  }

  if (dir < 0) {
    std::reverse(times.begin(), times.end());
    std::reverse(states.begin(), states.end());
    std::reverse(segments.begin(), segments.end());
  }
  return Trajectory(std::move(times), std::move(states), std::move(segments));
}

Trajectory integrate(const MatrixFunction& a, const Vector& x0, double t_a, double t_b, double tol) {
  Matrix at;
  Rhs rhs = [&](double t, const Vector& x, Vector& dx) {
    a.eval(t, at);
    dx.noalias() = at * x;
  };
  return integrate(rhs, x0, t_a, t_b, IntegrateOptions{tol});
}

Trajectory integrate(const MatrixFunction& a, const StateMap& forcing, const Vector& x0, double t_a, double t_b,
                     double tol) {
  Matrix at;
  Rhs rhs = [&](double t, const Vector& x, Vector& dx) {
    a.eval(t, at);
    dx.noalias() = at * x;
    dx += forcing(t, x);
  };
  return integrate(rhs, x0, t_a, t_b, IntegrateOptions{tol});
}

}  // namespace aeq
