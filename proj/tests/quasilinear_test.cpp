#include <doctest.h>

#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <numbers>

#include "aeq/errors.hpp"
#include "aeq/quasilinear.hpp"
#include "aeq/scenario.hpp"
#include "support.hpp"

using namespace aeq;
using namespace aeq::test;

namespace {

StateMap linear_f(const Expr& scalar) { return StateMap(1, {{StateTerm{scalar, StateFactor::linear, 0}}}); }

struct Instance {
  Matrix C;
  StateMap f;
  Eta eta;
  SpectralData spec;
};

Instance from_builtin(const char* name) {
  const auto s = builtin(name);
  Instance in;
  in.C = *s.C;
  in.f = *s.f;
  in.eta = Eta{s.eta, s.cert(*s.run.eta_cert)->cert};
  in.spec = spectral_data(in.C);
  return in;
}

/// e^{1+t} E₁(1+t) = e^t ∫_t^∞ e^{-s}/(1+s) ds; asymptotic series once e^x overflows
double witness_c5(double t) {
  const double x = 1 + t;
  if (x < 100.0) return std::exp(x) * boost::math::expint(1, x);
  double sum = 0.0, term = 1.0 / x;
  for (int k = 0; k < 12; ++k) {
    sum += term;
    term *= -(k + 1) / x;
  }
  return sum;
}

}  // namespace

TEST_SUITE("quasilinear") {

TEST_CASE("spectral data") {
  SUBCASE("zero matrix is diagonalizable") {
    const auto d = spectral_data(Matrix::Zero(3, 3));
    CHECK(d.alpha == 0.0);
    CHECK(d.beta == 0.0);
    CHECK(d.m_alpha == 1);
    CHECK(d.m_beta == 1);
  }
  SUBCASE("single Jordan block") {
    const auto d = spectral_data(mat(2, 2, {0, 1, 0, 0}));
    CHECK(d.alpha == doctest::Approx(0.0));
    CHECK(d.m_alpha == 2);
    CHECK(d.m_beta == 2);
  }
  SUBCASE("rotation blocks and one growing mode") {
    const auto s = builtin("example2", {1.0, 0.1, std::nullopt});
    const auto d = spectral_data((*s.A)(0.0));
    CHECK(d.alpha == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(d.beta == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(d.m_alpha == 1);
    CHECK(d.m_beta == 1);
  }
  SUBCASE("non-square input") { CHECK_THROWS_AS(spectral_data(Matrix::Zero(2, 3)), PreconditionError); }
}

TEST_CASE("fitted kappas bound the exponential") {
  for (const Matrix& c : {Matrix(mat(2, 2, {0, 1, 0, 0})), Matrix(mat(2, 2, {-1, 3, 0, 0.5})),
                          Matrix(mat(3, 3, {0, 1, 0, -1, 0, 0, 0, 0, 0.2}))}) {
    const auto d = spectral_data(c);
    CHECK(d.alpha <= d.beta);
    CHECK(d.m_alpha >= 1);
    CHECK(d.m_beta <= c.rows());
    for (double t : linspace(0, d.fit_horizon, 97)) {
      CHECK(mat_exp(c, t).norm() <= d.kappa1 * std::pow(1 + t, d.m_beta - 1) * std::exp(d.beta * t) * (1 + 1e-9));
      CHECK(mat_exp(c, -t).norm() <= d.kappa2 * std::pow(1 + t, d.m_alpha - 1) * std::exp(-d.alpha * t) * (1 + 1e-9));
    }
  }
}

TEST_CASE("C3") {
  const auto in = from_builtin("quasi_scalar");
  CHECK(check_C3(in.f, in.eta, GridSpec{0, 25, 501}).pass);
  const auto twice = linear_f(expr({term(2, -1)}));
  CHECK_FALSE(check_C3(twice, in.eta, GridSpec{0, 25, 501}).pass);
  // no underflow in the Lipschitz bound far out
  const auto w = from_builtin("weaker_witness");
  CHECK(check_C3(w.f, w.eta, GridSpec{0, 600, 2001}).pass);
}

TEST_CASE("C4") {
  SUBCASE("L = 1 for e^{-t}") {
    const auto in = from_builtin("quasi_scalar");
    const auto r = check_C4(in.spec, in.eta);
    CHECK(r.finite);
    CHECK(r.L == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.verdict.pass);
  }
  SUBCASE("positive exponent diverges") {
    SpectralData d;
    d.alpha = 0.0;
    d.beta = 2.0;
    const auto r = check_C4(d, Eta{std::nullopt, {1, 0, 1, 0}});
    CHECK_FALSE(r.finite);
    CHECK_FALSE(r.verdict.pass);
  }
  SUBCASE("witness L = e E1(1)") {
    const auto in = from_builtin("weaker_witness");
    const auto r = check_C4(in.spec, in.eta);
    const double oracle = std::numbers::e * boost::math::expint(1, 1.0);
    CHECK(r.L == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(std::fabs(r.L - oracle) <= r.error_bound + 1e-12);
    CHECK(r.L == doctest::Approx(0.5963474).epsilon(1e-7));
  }
}

TEST_CASE("integrate_u") {
  SUBCASE("f = 0 keeps u constant") {
    const auto in = from_builtin("quasi_scalar");
    const auto zero = StateMap::zero(1);
    const auto st = integrate_u(in.C, zero, vec({1.5}), 10.0, 1e-10, in.spec, in.eta);
    for (const auto& u : st.u.states()) CHECK(u(0) == 1.5);
    const auto lim = c_u_limit(st, in.spec, in.eta);
    CHECK(lim.c_u(0) == 1.5);
  }
  SUBCASE("closed form exp(1 - e^{-t}) under the Gronwall majorant") {
    const auto in = from_builtin("quasi_scalar");
    const auto st = integrate_u(in.C, in.f, vec({1.0}), 25.0, 1e-10, in.spec, in.eta);
    for (double t : linspace(0, 25, 51)) CHECK(st.u.at(t)(0) == doctest::Approx(std::exp(1 - std::exp(-t))).epsilon(1e-9));
    CHECK(st.L_gronwall == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(st.gronwall_bound == doctest::Approx(std::exp(st.k1 * st.L_gronwall)));
    for (const auto& u : st.u.states()) CHECK(std::fabs(u(0)) <= st.gronwall_bound * 1.01);
  }
  SUBCASE("a wrong certificate trips the majorant") {
    const auto in = from_builtin("quasi_scalar");
    const auto strong = linear_f(expr({term(3, -0.2)}));
    CHECK_THROWS_AS(integrate_u(in.C, strong, vec({1.0}), 25.0, 1e-10, in.spec, in.eta), NumericalError);
  }
}

TEST_CASE("c_u limit") {
  const auto in = from_builtin("quasi_scalar");
  const auto st = integrate_u(in.C, in.f, vec({1.0}), 25.0, 1e-10, in.spec, in.eta);
  const auto lim = c_u_limit(st, in.spec, in.eta);
  CHECK(std::fabs(lim.c_u(0) - std::numbers::e) <= 1e-8);
  CHECK(lim.tail_bound <= st.gronwall_bound * in.spec.k1() * tail_integral(in.eta.cert, 25.0) * (1 + 1e-12));
  // T -> 2T moves c_u by less than the tail bound at T (plus integration error)
  const auto longer = integrate_u(in.C, in.f, vec({1.0}), 50.0, 1e-10, in.spec, in.eta);
  const auto lim2 = c_u_limit(longer, in.spec, in.eta);
  CHECK((lim2.c_u - lim.c_u).norm() <= lim.tail_bound + 1e-9);
}

TEST_CASE("asymptotic representation") {
  SUBCASE("scalar instance") {
    const auto in = from_builtin("quasi_scalar");
    const auto rep = asymptotic_representation(in.C, in.f, vec({1.0}), 25.0, 1e-10, in.spec, in.eta);
    CHECK(rep.c(0) == doctest::Approx(std::numbers::e).epsilon(1e-9));
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
      const double t = rep.t[i];
      CHECK(rep.remainder[i](0) == doctest::Approx(std::exp(1 - std::exp(-t)) - std::numbers::e).scale(1.0).epsilon(1e-8));
      // y(t) = e^{Ct}[c + o(1)]
      CHECK(std::fabs(rep.state.u.at(t)(0) - (rep.c(0) + rep.remainder[i](0))) < 1e-8);
    }
    const auto& r = rep.remainder_norm;
    for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] <= r[i - 1] + 1e-12);
    CHECK(r.back() < 1e-6);
  }
  SUBCASE("f = 0 leaves no remainder") {
    const auto in = from_builtin("quasi_scalar");
    const Matrix c = mat(2, 2, {0, 1, -1, 0});
    const auto rep = asymptotic_representation(c, StateMap::zero(2), vec({1, 2}), 10.0, 1e-10, spectral_data(c), in.eta);
    CHECK((rep.c - vec({1, 2})).norm() == 0.0);
    for (double v : rep.remainder_norm) CHECK(v == 0.0);
  }
}

TEST_CASE("C5 and the summability comparison") {
  SUBCASE("e^{-t} with C = 0: both curves are e^{-t}") {
    const auto in = from_builtin("quasi_scalar");
    const auto r = check_C5(in.spec, in.eta, GridSpec{0, 25, 51}, 1e-8);
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      CHECK(std::fabs(r.c5[i] - std::exp(-r.t[i])) < 1e-10);
      CHECK(std::fabs(r.yakubovich[i] - std::exp(-r.t[i])) < 1e-10);
    }
    CHECK(r.c5_verdict.pass);
    CHECK(r.yakubovich_verdict.pass);
    CHECK(r.yakubovich_verdict.condition == "Eq14");
  }
  SUBCASE("witness: C5 holds, the summability condition does not") {
    const auto in = from_builtin("weaker_witness");
    const auto r = check_C5(in.spec, in.eta, GridSpec{0, 20000, 201}, 1e-8);
    for (std::size_t i = 0; i < r.t.size(); i += 10) CHECK(r.c5[i] == doctest::Approx(witness_c5(r.t[i])).epsilon(1e-6));
    // 1/(1+T) at T = 20000 is below the default decay tolerance, not below 1e-8
    CHECK_FALSE(r.c5_verdict.pass);
    const auto coarse = check_C5(in.spec, in.eta, GridSpec{0, 20000, 201});
    CHECK(coarse.c5_verdict.pass);
    CHECK_FALSE(coarse.yakubovich_verdict.pass);
    CHECK_FALSE(r.yakubovich_verdict.pass);
    REQUIRE(r.divergence_evidence.size() >= 3);
    for (std::size_t i = 1; i < r.divergence_evidence.size(); ++i) {
      // partial integrals of 1/(1+s) grow like log R
      const auto [R, v] = r.divergence_evidence[i];
      CHECK(v == doctest::Approx(std::log(1 + R)).epsilon(1e-6));
    }
  }
  SUBCASE("eta = 0 gives zero curves") {
    const Eta zero{Expr{}, {1, 0, 1, 0}};
    const auto r = check_C5(spectral_data(Matrix::Zero(1, 1)), zero, GridSpec{0, 10, 21});
    for (double v : r.c5) CHECK(v == 0.0);
    for (double v : r.yakubovich) CHECK(v == 0.0);
    CHECK(r.c5_verdict.pass);
    CHECK(r.yakubovich_verdict.pass);
  }
}

TEST_CASE("paired-solution gap") {
  const auto in = from_builtin("quasi_scalar");
  const auto st = integrate_u(in.C, in.f, vec({1.0}), 25.0, 1e-10, in.spec, in.eta);
  const auto lim = c_u_limit(st, in.spec, in.eta);
  const auto gap = quasi_equivalence_gap(in.C, in.f, st, lim);
  CHECK(gap.verdict.pass);
  // C = 0: gap = c_u - u(t) = e - exp(1 - e^{-t})
  for (std::size_t i = 0; i < gap.t.size(); i += 40)
    CHECK(gap.gap[i] == doctest::Approx(std::numbers::e - std::exp(1 - std::exp(-gap.t[i]))).epsilon(1e-6).scale(1e-9));
}

TEST_CASE("horizon limit keeps e^{Ct} finite") {
  const auto in = from_builtin("weaker_witness");
  const double T = quasi_horizon_limit(in.spec);
  CHECK(T == doctest::Approx(600.0));
  CHECK(std::isfinite(mat_exp(in.C, T).stableNorm()));
  CHECK_THROWS(integrate_u(in.C, in.f, vec({1.0}), 800.0, 1e-8, in.spec, in.eta));
}

}
