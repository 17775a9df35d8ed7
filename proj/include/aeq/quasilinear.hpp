#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "aeq/certificates.hpp"
#include "aeq/fundamental.hpp"
#include "aeq/verdict.hpp"

namespace aeq {

/// Spectral constants of a constant matrix C and fitted norm bounds
///   ‖e^{Ct}‖_F ≤ κ1 (1+t)^{mβ-1} e^{βt},  ‖e^{-Ct}‖_F ≤ κ2 (1+t)^{mα-1} e^{-αt}.
struct SpectralData {
  double alpha = 0.0;  ///< min real part
  double beta = 0.0;   ///< max real part
  int m_alpha = 1;     ///< largest elementary-divisor degree among eigenvalues with Re = α
  int m_beta = 1;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double fit_horizon = 0.0;
  std::vector<std::complex<double>> eigenvalues;  ///< one per cluster
  std::vector<int> multiplicities;
  std::vector<int> indices;                       ///< elementary-divisor degree per cluster
  std::vector<std::string> warnings;

  /// k1 = κ1 κ2, the Lipschitz factor of the transformed right-hand side.
  double k1() const { return kappa1 * kappa2; }
  /// mβ + mα - 2
  int poly_degree() const { return m_beta + m_alpha - 2; }
};

SpectralData spectral_data(const Matrix& c, double fit_horizon = 10.0, int samples = 1001);

/// Largest horizon at which e^{±Ct} stays well inside double range.
double quasi_horizon_limit(const SpectralData& spec);

/// η(t) from C3: an explicit function if given, otherwise its certificate envelope.
struct Eta {
  std::optional<Expr> function;
  TailCertificate cert;

  double operator()(double t) const { return function ? (*function)(t) : cert.bound(t); }
};

/// C3: the Lipschitz bound of f never exceeds η, and η respects its certificate.
Verdict check_C3(const StateMap& f, const Eta& eta, const GridSpec& grid);

struct C4Report {
  bool finite = false;
  double L = 0.0;          ///< ∫_0^∞ t^{mβ+mα-2} e^{(β-α)t} η(t) dt
  double error_bound = 0.0;
  Verdict verdict;
};

C4Report check_C4(const SpectralData& spec, const Eta& eta, double tol = 1e-10);

struct QuasiState {
  Trajectory u;
  Vector c_u;                 ///< u(T) until refined by c_u_limit
  double tail_estimate = 0.0; ///< certified bound on ‖u(T) - c_u‖
  double gronwall_bound = 0.0;///< max(M0, |u0| e^{k1 L})
  double L_gronwall = 0.0;    ///< ∫ (1+s)^{mβ+mα-2} e^{(β-α)s} η(s) ds from t0
  double k1 = 0.0;
  double t0 = 0.0;
};

/// Solves u' = e^{-Ct} f(t, e^{Ct} u), u(t0) = u0 on [t0, T] (t0 ≥ 0) and checks
/// the Gronwall majorant; exceeding it by more than 10% throws NumericalError.
QuasiState integrate_u(const Matrix& c, const StateMap& f, const Vector& u0, double horizon, double tol,
                       const SpectralData& spec, const Eta& eta, double t0 = 0.0);

struct LimitVector {
  Vector c_u;
  double tail_bound = 0.0;
};

/// c_u = u(T) with remainder ‖c_u - u(T)‖ ≤ M k1 ∫_T^∞ (1+s)^p e^{(β-α)s} η(s) ds.
LimitVector c_u_limit(const QuasiState& state, const SpectralData& spec, const Eta& eta);

struct AsymptoticRepresentation {
  Vector c;
  QuasiState state;
  std::vector<double> t;
  std::vector<Vector> remainder;      ///< o(1)(t) = -∫_t^∞ e^{-Cs} f(s, e^{Cs} u(s)) ds
  std::vector<double> remainder_norm;
};

/// y(t) = e^{Ct}[c + o(1)] for the solution with y(0) = y0.
AsymptoticRepresentation asymptotic_representation(const Matrix& c, const StateMap& f, const Vector& y0,
                                                   double horizon, double tol, const SpectralData& spec,
                                                   const Eta& eta, int samples = 201);

struct GapCurve {
  std::vector<double> t;
  std::vector<double> gap;
  Verdict verdict;
};

/// ‖y(t) - x(t)‖ for y(t) = e^{Ct}u(t) and x(t) = e^{Ct}c_u, evaluated as
/// ‖∫_t^T e^{C(t-s)} f(s, y(s)) ds‖ + ‖e^{Ct}‖·(certified tail beyond T).
GapCurve quasi_equivalence_gap(const Matrix& c, const StateMap& f, const QuasiState& state, const LimitVector& limit,
                               double tol = 1e-4, int samples = 401);

struct C5Report {
  std::vector<double> t;
  std::vector<double> c5;          ///< ∫_t^∞ (s-t)^{mα-1} s^{mβ-1} e^{α(t-s)} e^{βs} η(s) ds
  std::vector<double> yakubovich;  ///< ∫_t^∞ s^{mβ+mα-2} e^{βs} η(s) ds; +inf when not summable
  Verdict c5_verdict;
  Verdict yakubovich_verdict;
  std::vector<std::pair<double, double>> divergence_evidence;  ///< (R, ∫_{t0}^{t0+R}) when not summable
};

C5Report check_C5(const SpectralData& spec, const Eta& eta, const GridSpec& grid, double tol = 1e-4);

}  // namespace aeq
