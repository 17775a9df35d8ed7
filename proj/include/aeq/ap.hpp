#pragma once

#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "aeq/trajectory.hpp"
#include "aeq/verdict.hpp"

namespace aeq {

/// g(t) = Σ_k a_k cos(ω_k t) + b_k sin(ω_k t) with vector coefficients.
struct APSignal {
  std::vector<double> frequencies;
  std::vector<Vector> a;  ///< cosine parts
  std::vector<Vector> b;  ///< sine parts

  static APSignal zero(int dim);
  int dim() const;
  Vector operator()(double t) const;
  /// Throws InputError on negative frequencies or mismatched coefficient sizes.
  void check() const;
  bool operator==(const APSignal& o) const;
};

/// e^{At}c as an APSignal, for constant A whose eigenvalues excited by c lie
/// on the imaginary axis. Throws PreconditionError otherwise.
APSignal ap_signal_of(const Matrix& a, const Vector& c, double tol = 1e-9);

using SignalFn = std::function<Vector(double)>;

struct Window {
  double a = 0.0;
  double b = 100.0;
  int samples = 4001;
};

/// sup over the sampled window of ‖f(t + τ) - f(t)‖.
double translation_error(const APSignal& g, double tau, const Window& window = {});
/// The trajectory must contain [a, b + τ].
double translation_error(const Trajectory& f, double tau, const Window& window = {});

struct TranslationCensus {
  double eps = 0.0;
  double range = 0.0;
  double step = 0.0;
  std::vector<double> hits;
  /// Largest distance between consecutive hits (from τ = 0); +inf without hits.
  double max_gap = std::numeric_limits<double>::infinity();
};

/// Scans τ ∈ [0, L] with the given step for ε-translation numbers of g.
TranslationCensus find_translation_numbers(const APSignal& g, double eps, double range, double step = 0.01,
                                           const Window& window = {});

enum class Classification { ap, asymptotically_ap, biasymptotically_ap, unclassified };
std::string_view to_string(Classification c);

struct CensusOptions {
  double eps = 0.1;
  double range = 100.0;
  double step = 0.01;
};

struct DecompositionReport {
  Classification classification = Classification::unclassified;
  std::vector<double> t;
  std::vector<double> residual;  ///< ‖f(t) - g(t)‖
  double sup_residual = 0.0;
  DecayWindows positive;
  bool positive_decays = false;
  DecayWindows negative;
  bool negative_decays = false;
  bool two_sided = false;
  TranslationCensus census;
  Verdict verdict;  ///< PASS unless unclassified
};

/// φ = f - g sampled on [t_begin, t_end]; AP when ‖φ‖ < tol throughout, else
/// by which ends decay (final tenth of each axis, against [0.45, 0.5]).
/// Two-sided classification needs t_begin = -t_end.
DecompositionReport classify(const SignalFn& f, double t_begin, double t_end, const APSignal& g, double tol,
                             bool two_sided, int samples = 2001, const CensusOptions& census = {});
DecompositionReport classify(const Trajectory& f, const APSignal& g, double tol, bool two_sided, int samples = 2001,
                             const CensusOptions& census = {});

}  // namespace aeq
