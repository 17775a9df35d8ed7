#include "aeq/ap.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "aeq/errors.hpp"
#include "aeq/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <complex>

namespace aeq {
namespace {

std::vector<double> window_points(const Window& w) {
  if (w.samples < 2 || !(w.b > w.a)) throw PreconditionError("translation window must be a nonempty interval");
  std::vector<double> t(static_cast<std::size_t>(w.samples));
  for (int i = 0; i < w.samples; ++i) t[static_cast<std::size_t>(i)] = w.a + (w.b - w.a) * i / (w.samples - 1);
  t.back() = w.b;
  return t;
}

/// sqrt(max_i Σ_c diff_c[i]²)
double sup_norm(const std::vector<std::vector<double>>& diff, std::vector<double>& sq) {
  std::fill(sq.begin(), sq.end(), 0.0);
  for (const auto& d : diff) kernels::accumulate_square(sq, d);
  return std::sqrt(std::max(0.0, kernels::max_value(sq)));
}

/// Precomputed cos(ωt), sin(ωt) on a window, so that each τ costs a few axpys.
struct TrigTable {
  std::vector<std::vector<double>> cos_t, sin_t;
  TrigTable(const APSignal& g, const std::vector<double>& t) {
    for (double w : g.frequencies) {
      std::vector<double> c(t.size()), s(t.size());
      for (std::size_t i = 0; i < t.size(); ++i) {
        c[i] = std::cos(w * t[i]);
        s[i] = std::sin(w * t[i]);
      }
      cos_t.push_back(std::move(c));
      sin_t.push_back(std::move(s));
    }
  }
};

double shifted_error(const APSignal& g, const TrigTable& tab, double tau, std::vector<std::vector<double>>& diff,
                     std::vector<double>& sq) {
  for (auto& d : diff) std::fill(d.begin(), d.end(), 0.0);
  for (std::size_t k = 0; k < g.frequencies.size(); ++k) {
    const double c = std::cos(g.frequencies[k] * tau), s = std::sin(g.frequencies[k] * tau);
    for (std::size_t comp = 0; comp < diff.size(); ++comp) {
      const auto ci = static_cast<Eigen::Index>(comp);
      // g(t+τ) - g(t) = [a(c-1) + b s] cos ωt + [b(c-1) - a s] sin ωt
      const double cc = g.a[k](ci) * (c - 1.0) + g.b[k](ci) * s;
      const double ss = g.b[k](ci) * (c - 1.0) - g.a[k](ci) * s;
      if (cc != 0.0) kernels::axpy(cc, tab.cos_t[k], diff[comp]);
      if (ss != 0.0) kernels::axpy(ss, tab.sin_t[k], diff[comp]);
    }
  }
  return sup_norm(diff, sq);
}

}  // namespace

APSignal APSignal::zero(int dim) {
  APSignal g;
  g.frequencies.push_back(0.0);
  g.a.push_back(Vector::Zero(dim));
  g.b.push_back(Vector::Zero(dim));
  return g;
}

int APSignal::dim() const { return a.empty() ? 0 : static_cast<int>(a.front().size()); }

Vector APSignal::operator()(double t) const {
  Vector out = Vector::Zero(dim());
  for (std::size_t k = 0; k < frequencies.size(); ++k)
    out += std::cos(frequencies[k] * t) * a[k] + std::sin(frequencies[k] * t) * b[k];
  return out;
}

void APSignal::check() const {
  if (frequencies.empty()) throw InputError("AP signal needs at least one frequency");
  if (a.size() != frequencies.size() || b.size() != frequencies.size())
    throw InputError("AP signal: one cosine and one sine vector per frequency");
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    if (!(frequencies[k] >= 0.0) || !std::isfinite(frequencies[k]))
      throw InputError("AP signal: frequencies must be finite and nonnegative");
    if (a[k].size() != a.front().size() || b[k].size() != a.front().size())
      throw InputError("AP signal: coefficient vectors must share one dimension");
  }
}

bool APSignal::operator==(const APSignal& o) const {
  if (frequencies != o.frequencies || a.size() != o.a.size() || b.size() != o.b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k].size() != o.a[k].size() || b[k].size() != o.b[k].size() || a[k] != o.a[k] || b[k] != o.b[k])
      return false;
  return true;
}

APSignal ap_signal_of(const Matrix& a, const Vector& c, double tol) {
  if (a.rows() != a.cols() || a.rows() != c.size()) throw PreconditionError("ap_signal_of: dimension mismatch");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a.cast<std::complex<double>>());
  const Eigen::MatrixXcd& v = es.eigenvectors();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(v);
  const Eigen::VectorXcd w = lu.solve(c.cast<std::complex<double>>());
  if (!((v * w - c.cast<std::complex<double>>()).norm() <= 1e-8 * std::max(1.0, c.norm())))
    throw PreconditionError("ap_signal_of: A is not diagonalizable on the span of c");
  const double scale = std::max(1.0, a.norm());
  APSignal g;
  const int n = static_cast<int>(c.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const Eigen::VectorXcd z = w(k) * v.col(k);
    if (z.norm() <= tol * std::max(1.0, c.norm())) continue;
    const std::complex<double> lam = es.eigenvalues()(k);
    if (std::fabs(lam.real()) > tol * scale)
      throw PreconditionError("ap_signal_of: c excites an eigenvalue off the imaginary axis (Re = " +
                              std::to_string(lam.real()) + ")");
    const double omega = std::fabs(lam.imag());
    // z e^{±iωt} contributes Re z cos ωt ∓ Im z sin ωt
    const double sgn = lam.imag() >= 0.0 ? -1.0 : 1.0;
    std::size_t slot = g.frequencies.size();
    for (std::size_t j = 0; j < g.frequencies.size(); ++j)
      if (std::fabs(g.frequencies[j] - omega) <= tol * scale) slot = j;
    if (slot == g.frequencies.size()) {
      g.frequencies.push_back(omega);
      g.a.push_back(Vector::Zero(n));
      g.b.push_back(Vector::Zero(n));
    }
    g.a[slot] += z.real();
    g.b[slot] += sgn * z.imag();
  }
  if (g.frequencies.empty()) return APSignal::zero(n);
  std::vector<std::size_t> order(g.frequencies.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return g.frequencies[x] < g.frequencies[y]; });
  APSignal sorted;
  for (std::size_t j : order) {
    sorted.frequencies.push_back(g.frequencies[j]);
    sorted.a.push_back(g.a[j]);
    sorted.b.push_back(g.b[j]);
  }
  return sorted;
}

double translation_error(const APSignal& g, double tau, const Window& window) {
  g.check();
  const auto t = window_points(window);
  const TrigTable tab(g, t);
  std::vector<std::vector<double>> diff(static_cast<std::size_t>(g.dim()), std::vector<double>(t.size()));
  std::vector<double> sq(t.size());
  return shifted_error(g, tab, tau, diff, sq);
}

double translation_error(const Trajectory& f, double tau, const Window& window) {
  const auto t = window_points(window);
  if (!f.contains(std::min(window.a, window.a + tau)) || !f.contains(std::max(window.b, window.b + tau)))
    throw PreconditionError("translation_error: window shifted by τ leaves the trajectory");
  const int n = f.dim();
  std::vector<std::vector<double>> diff(static_cast<std::size_t>(n), std::vector<double>(t.size()));
  std::vector<double> base(t.size());
  Vector v(n), w(n);
  for (std::size_t i = 0; i < t.size(); ++i) {
    f.at(t[i] + tau, v);
    f.at(t[i], w);
    for (int c = 0; c < n; ++c) diff[static_cast<std::size_t>(c)][i] = v(c) - w(c);
  }
  std::vector<double> sq(t.size());
  return sup_norm(diff, sq);
}

TranslationCensus find_translation_numbers(const APSignal& g, double eps, double range, double step,
                                           const Window& window) {
  if (!(eps > 0.0)) throw PreconditionError("find_translation_numbers: eps must be positive");
  if (!(step > 0.0) || !(range > 0.0)) throw PreconditionError("find_translation_numbers: need range, step > 0");
  g.check();
  TranslationCensus c;
  c.eps = eps;
  c.range = range;
  c.step = step;
  const auto t = window_points(window);
  const TrigTable tab(g, t);
  std::vector<std::vector<double>> diff(static_cast<std::size_t>(g.dim()), std::vector<double>(t.size()));
  std::vector<double> sq(t.size());
  const auto count = static_cast<long>(std::floor(range / step + 1e-9));
  double last = 0.0;
  double gap = 0.0;
  for (long i = 1; i <= count; ++i) {
    const double tau = step * static_cast<double>(i);
    if (shifted_error(g, tab, tau, diff, sq) < eps) {
      c.hits.push_back(tau);
      gap = std::max(gap, tau - last);
      last = tau;
    }
  }
  c.max_gap = c.hits.empty() ? std::numeric_limits<double>::infinity() : gap;
  return c;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::ap:
      return "AP";
    case Classification::asymptotically_ap:
      return "asymptotically-AP";
    case Classification::biasymptotically_ap:
      return "biasymptotically-AP";
    case Classification::unclassified:
      break;
  }
  return "unclassified";
}

DecompositionReport classify(const SignalFn& f, double t_begin, double t_end, const APSignal& g, double tol,
                             bool two_sided, int samples, const CensusOptions& census) {
  if (!(t_end > t_begin) || samples < 3) throw PreconditionError("classify: need a nonempty sampled interval");
  if (two_sided && std::fabs(t_begin + t_end) > 1e-9 * std::max(1.0, t_end))
    throw PreconditionError("classify: two-sided classification needs a symmetric interval");
  g.check();
  DecompositionReport r;
  r.two_sided = two_sided;
  for (int i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? t_end : t_begin + (t_end - t_begin) * i / (samples - 1);
    r.t.push_back(t);
    const Vector ft = f(t);
    if (ft.size() != g.dim()) throw PreconditionError("classify: f and g differ in dimension");
    r.residual.push_back((ft - g(t)).norm());
  }
  r.sup_residual = *std::max_element(r.residual.begin(), r.residual.end());
  const double origin = two_sided ? 0.0 : t_begin;
  r.positive = decay_windows(r.t, r.residual, origin, t_end);
  r.positive_decays = decays(r.positive, tol);
  if (two_sided) {
    r.negative = decay_windows(r.t, r.residual, 0.0, t_begin);
    r.negative_decays = decays(r.negative, tol);
  }
  if (r.sup_residual < tol)
    r.classification = Classification::ap;
  else if (two_sided && r.positive_decays && r.negative_decays)
    r.classification = Classification::biasymptotically_ap;
  else if (r.positive_decays)
    r.classification = Classification::asymptotically_ap;
  else
    r.classification = Classification::unclassified;
  r.census = find_translation_numbers(g, census.eps, census.range, census.step);
  r.verdict.condition = "classification";
  // a two-sided request asks for decay at both ends
  r.verdict.pass = r.classification != Classification::unclassified &&
                   !(two_sided && r.classification == Classification::asymptotically_ap);
  r.verdict.worst_value = two_sided ? std::max(r.positive.final_max, r.negative.final_max) : r.positive.final_max;
  r.verdict.at_t = r.positive.final_max >= r.negative.final_max ? r.positive.at_t : r.negative.at_t;
  r.verdict.note = std::string(to_string(r.classification));
  return r;
}

DecompositionReport classify(const Trajectory& f, const APSignal& g, double tol, bool two_sided, int samples,
                             const CensusOptions& census) {
  return classify([&f](double t) { return f.at(t); }, f.t_begin(), f.t_end(), g, tol, two_sided, samples, census);
}

}  // namespace aeq
