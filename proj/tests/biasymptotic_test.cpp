#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "aeq/biasymptotic.hpp"
#include "aeq/errors.hpp"
#include "aeq/pipeline.hpp"
#include "support.hpp"

using namespace aeq;
using namespace aeq::test;

namespace {

LinearContext context(const char* name) { return prepare_linear(builtin(name), RunConfig{}); }

/// P21 of the cosine example in closed form
double p21(double t) {
  const double pi = std::numbers::pi, r5 = std::sqrt(5.0);
  const double x1 = std::exp((1 - std::cos(pi * t)) / pi);
  const double x2 = std::exp((1 - std::cos(r5 * t)) / r5);
  return std::cos(t) * std::exp(-2 * std::fabs(t)) * x1 / x2;
}

}  // namespace

TEST_SUITE("biasymptotic") {

TEST_CASE("parity of the cosine example") {
  const auto ctx = context("example3");
  const auto r = check_parity(ctx.A, ctx.B, *ctx.X, *ctx.P, 30.0);
  CHECK(r.A_odd.pass);
  CHECK(r.B_even.pass);
  CHECK(r.X_even.pass);
  // X even and B even make P = X^{-1} B X even
  CHECK(r.P_even.pass);
  CHECK_FALSE(r.P_odd.pass);
  CHECK_FALSE(r.construction_ready());
}

TEST_CASE("parity of the sine example") {
  const auto ctx = context("example3_odd");
  const auto r = check_parity(ctx.A, ctx.B, *ctx.X, *ctx.P, 30.0);
  CHECK(r.A_odd.pass);
  CHECK(r.B_odd.pass);
  CHECK_FALSE(r.B_even.pass);
  CHECK(r.X_even.pass);
  CHECK(r.P_odd.pass);
  CHECK(r.construction_ready());
}

TEST_CASE("constant nonzero A is not odd") {
  const auto a = MatrixFunction::constant(mat(2, 2, {1, 0, 0, 0}));
  CHECK(a.parity_deviation(Parity::odd, 5.0) > 1.0);
  const auto x = std::make_shared<const FundamentalMatrix>(fundamental_matrix(a, 5.0, 1e-10, true));
  const auto p = build_P(x, MatrixFunction::zero(2));
  CHECK_FALSE(check_parity(a, MatrixFunction::zero(2), *x, p, 5.0).A_odd.pass);
}

TEST_CASE("odd A alone makes X even") {
  const auto ctx = context("example3");
  for (double t : linspace(0, 30, 61)) CHECK(((*ctx.X)(-t) - (*ctx.X)(t)).norm() <= 1e-8 * (*ctx.X)(t).norm());
}

TEST_CASE("P = 0 gives Psi = 0 on the whole line") {
  const MatrixFn zero = [](double) { return Matrix::Zero(2, 2); };
  PsiOptions o;
  o.horizon = 10.0;
  const auto two = psi_two_sided(zero, {1, 0, 1, 0}, o);
  for (const auto& v : two.psi.edge_values) CHECK(v.norm() == 0.0);
  CHECK(two.symmetry_error == 0.0);
  CHECK(two.psi.t_begin() == -10.0);
}

TEST_CASE("two-sided Psi of the sine example") {
  const auto ctx = context("example3_odd");
  const auto p = ctx.P->as_function();
  const auto two = psi_two_sided(p, ctx.cert, ctx.psi_options);
  CHECK(two.symmetry_error <= 1e-6);
  CHECK(symmetry_error(two.psi) == doctest::Approx(two.symmetry_error));
  CHECK(two.glue_mismatch <= 1e2 * ctx.psi_options.tol);
  CHECK(psi_residual(two.psi, p, ctx.cert) <= 1e-6);
  CHECK(two.psi.two_sided);

  SUBCASE("mirrored levels equal the forward levels") {
    const auto& plus = two.plus.kept_levels;
    const auto& minus = two.minus.kept_levels;
    // P is nilpotent, so the series stops after the first level
    REQUIRE(plus.size() >= 2);
    REQUIRE(minus.size() == plus.size());
    const auto& pe = two.plus_grid.edges();
    const auto& me = two.minus_grid.edges();
    REQUIRE(pe.size() == me.size());
    for (std::size_t k = 0; k < plus.size(); ++k)
      for (std::size_t i = 0; i < pe.size(); i += 5) {
        const std::size_t j = me.size() - 1 - i;
        CHECK(me[j] == doctest::Approx(-pe[i]));
        CHECK((minus[k][j] - plus[k][i]).norm() <= 1e-9);
      }
  }
}

TEST_CASE("cosine example cannot be glued") {
  const auto ctx = context("example3");
  const auto p = ctx.P->as_function();
  double mismatch = 0.0;
  try {
    psi_two_sided(p, ctx.cert, ctx.psi_options);
  } catch (const GlueMismatch& e) {
    mismatch = e.mismatch();
  }
  // Psi+ - Psi- is the full-line integral of the nilpotent P
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  double full = 0.0;
  for (int i = -40; i < 40; ++i) full += gk::integrate(p21, 0.5 * i, 0.5 * (i + 1), 0, 1e-14);
  CHECK(std::fabs(full) == doctest::Approx(0.8159).epsilon(1e-3));
  CHECK(mismatch == doctest::Approx(std::fabs(full)).epsilon(1e-6));

  // the solution vanishing at +inf still solves the integral equation on the whole line
  const auto one = psi_plus_continued(p, ctx.cert, ctx.psi_options);
  CHECK(psi_residual(one, p, ctx.cert) <= 1e-6);
  // Psi(-t) - Psi(t) = -(integral of p21 over [-t, t]); its sup can overshoot the limit
  double sup = 0.0, half = 0.0;
  for (int i = 0; i < 3000; ++i) {
    half += gk::integrate(p21, 0.01 * i, 0.01 * (i + 1), 0, 1e-14);
    sup = std::max(sup, std::fabs(2 * half));
  }
  CHECK(sup >= std::fabs(full));
  CHECK(symmetry_error(one) == doctest::Approx(sup).epsilon(1e-3));
}

TEST_CASE("two-sided C2 and biequivalence for the sine example") {
  const auto ctx = context("example3_odd");
  const auto p = ctx.P->as_function();
  const auto two = psi_two_sided(p, ctx.cert, ctx.psi_options);
  const auto c2 = check_C2_two_sided(*ctx.X, two.psi, ctx.cert);
  CHECK(c2.ends.pass());
  const auto map = build_map(*ctx.X, two.psi);
  ReportOptions ro;
  ro.tol = 1e-3;
  const auto r = biequivalence_report(ctx.A, ctx.B, map, ctx.initial, 30.0, ro);
  CHECK(r.ends.negative.pass);
  CHECK(r.ends.positive.pass);
  CHECK(r.verdict.pass);
  CHECK(r.t.front() == doctest::Approx(-30.0));
  CHECK(r.t.back() == doctest::Approx(30.0));
  for (const auto& g : r.gaps) {
    CHECK(g.front() < 1e-3);
    CHECK(g.back() < 1e-3);
  }
}

TEST_CASE("B = 0 biequivalence is identically zero") {
  const auto ctx = context("example3_odd");
  const MatrixFn zero = [](double) { return Matrix::Zero(2, 2); };
  PsiOptions o;
  o.horizon = 30.0;
  const auto two = psi_two_sided(zero, {1, 0, 1, 0}, o);
  const auto map = build_map(*ctx.X, two.psi);
  const auto r = biequivalence_report(ctx.A, MatrixFunction::zero(2), map, ctx.initial, 30.0);
  for (const auto& g : r.gaps)
    for (double v : g) CHECK(v < 1e-12);
  CHECK(r.verdict.pass);
}

}
