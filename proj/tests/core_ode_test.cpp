#include <doctest.h>

#include <cmath>
#include <numbers>

#include "aeq/errors.hpp"
#include "aeq/fundamental.hpp"
#include "aeq/integrator.hpp"
#include "aeq/quadrature.hpp"
#include "aeq/scenario.hpp"
#include "support.hpp"

using namespace aeq;
using namespace aeq::test;

namespace {

MatrixFunction rotation() { return MatrixFunction::constant(mat(2, 2, {0, 1, -1, 0})); }

MatrixFunction example1_A() { return *builtin("example1", {3.0, std::nullopt, 1.0}).A; }

MatrixFunction example3_A() { return *builtin("example3").A; }

}  // namespace

TEST_SUITE("core_ode") {

TEST_CASE("zero field keeps the state") {
  const auto x = integrate(MatrixFunction::zero(2), vec({1, 2}), 0.0, 5.0, 1e-10);
  for (double t : linspace(0, 5, 11)) CHECK((x.at(t) - vec({1, 2})).norm() < 1e-14);
}

TEST_CASE("rotation by pi") {
  const auto x = integrate(rotation(), vec({1, 0}), 0.0, std::numbers::pi, 1e-10);
  CHECK((x.at(std::numbers::pi) - vec({-1, 0})).norm() < 1e-8);
}

TEST_CASE("backward integration runs the rotation in reverse") {
  const auto x = integrate(rotation(), vec({1, 0}), 0.0, -std::numbers::pi / 2, 1e-10);
  CHECK(x.t_begin() == doctest::Approx(-std::numbers::pi / 2));
  CHECK((x.at(-std::numbers::pi / 2) - vec({0, 1})).norm() < 1e-8);
}

TEST_CASE("closed-form solution (t+1)^2") {
  const auto x = integrate(example1_A(), vec({1, 2}), 0.0, 1.0, 1e-11);
  CHECK((x.at(1.0) - vec({4, 4})).norm() < 1e-8);
  for (double t : linspace(0, 1, 9)) CHECK(x.at(t)(0) == doctest::Approx((t + 1) * (t + 1)).epsilon(1e-8));
}

TEST_CASE("dense output reproduces node values exactly") {
  const auto x = integrate(example1_A(), vec({1, 2}), 0.0, 3.0, 1e-9);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) CHECK(x.times()[i] > x.times()[i - 1]);
    CHECK(x.at(x.times()[i]) == x.states()[i]);
    CHECK(x.states()[i].allFinite());
  }
}

TEST_CASE("fundamental matrix of the zero system is the identity") {
  const auto x = fundamental_matrix(MatrixFunction::zero(3), 4.0, 1e-10);
  for (double t : linspace(0, 4, 9)) CHECK((x(t) - Matrix::Identity(3, 3)).norm() < 1e-14);
}

TEST_CASE("X(0) is exactly the identity") {
  const auto x = fundamental_matrix(example3_A(), 5.0, 1e-10, true);
  CHECK(x(0.0) == Matrix::Identity(2, 2));
}

TEST_CASE("X11 for the (t+1)^2, (t+1)^-1 pair") {
  const auto x = fundamental_matrix(example1_A(), 2.0, 1e-11);
  CHECK(x(1.0)(0, 0) == doctest::Approx(5.0 / 3.0).epsilon(1e-9));
  for (double t : linspace(0, 2, 9)) {
    const double s = t + 1;
    CHECK(x(t)(0, 0) == doctest::Approx((s * s + 2 / s) / 3).epsilon(1e-9));
  }
}

TEST_CASE("diagonal sine system has a closed form on both half-axes") {
  const auto x = fundamental_matrix(example3_A(), 10.0, 1e-11, true);
  const double pi = std::numbers::pi, r5 = std::sqrt(5.0);
  for (double t : linspace(-10, 10, 41)) {
    CHECK(x(t)(0, 0) == doctest::Approx(std::exp((1 - std::cos(pi * t)) / pi)).epsilon(1e-8));
    CHECK(x(t)(1, 1) == doctest::Approx(std::exp((1 - std::cos(r5 * t)) / r5)).epsilon(1e-8));
    CHECK(std::fabs(x(t)(0, 1)) < 1e-12);
  }
}

TEST_CASE("inverse_at") {
  SUBCASE("identity at 0") {
    const auto x = fundamental_matrix(example1_A(), 2.0, 1e-10);
    CHECK((inverse_at(x, 0.0) - Matrix::Identity(2, 2)).norm() < 1e-14);
  }
  SUBCASE("rotation by -pi/2") {
    const auto x = fundamental_matrix(rotation(), 2.0, 1e-11);
    CHECK((inverse_at(x, std::numbers::pi / 2) - mat(2, 2, {0, -1, 1, 0})).norm() < 1e-8);
  }
  SUBCASE("reciprocal diagonal") {
    const auto x = fundamental_matrix(example3_A(), 4.0, 1e-11, true);
    for (double t : {-3.3, -1.0, 0.7, 2.5}) {
      const Matrix inv = inverse_at(x, t);
      CHECK(inv(0, 0) == doctest::Approx(1.0 / x(t)(0, 0)).epsilon(1e-12));
      CHECK(inv(1, 1) == doctest::Approx(1.0 / x(t)(1, 1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("mat_exp") {
  CHECK(mat_exp(mat(2, 2, {3, 1, 0, 2}), 0.0) == Matrix::Identity(2, 2));
  for (double t : {0.3, 1.0, 4.0}) {
    const Matrix r = mat(2, 2, {std::cos(t), std::sin(t), -std::sin(t), std::cos(t)});
    CHECK((mat_exp(mat(2, 2, {0, 1, -1, 0}), t) - r).norm() < 1e-13);
  }
  const auto s = builtin("example2", {1.0, 0.1, std::nullopt});
  const Matrix a = (*s.A)(0.0);
  for (double t : {1.0, 10.0, 60.0}) CHECK(mat_exp(a, t)(4, 4) == doctest::Approx(std::exp(0.1 * t)).epsilon(1e-12));
}

TEST_CASE("mat_exp stays finite for large arguments") {
  const Matrix one = Matrix::Constant(1, 1, 1.0);
  for (double t : {360.0, 600.0, 700.0})
    CHECK(mat_exp(one, t)(0, 0) == doctest::Approx(std::exp(t)).epsilon(1e-11));
  CHECK(mat_exp(one, -700.0)(0, 0) == doctest::Approx(std::exp(-700.0)).epsilon(1e-11));
}

TEST_CASE("Liouville identity") {
  CHECK(liouville_defect(fundamental_matrix(example1_A(), 10.0, 1e-11)) < 1e-8);
  CHECK(liouville_defect(fundamental_matrix(example3_A(), 10.0, 1e-11, true)) < 1e-8);
}

TEST_CASE("ODE residual of the dense output") {
  const auto x = fundamental_matrix(example1_A(), 10.0, 1e-11);
  for (double t : {0.5, 2.0, 7.5}) CHECK(ode_residual(x, t) < 1e-6);
}

TEST_CASE("group property: restart at s") {
  const double tol = 1e-10;
  const auto a = example1_A();
  const auto x = fundamental_matrix(a, 6.0, tol);
  const double s = 2.0;
  for (int j = 0; j < 2; ++j) {
    const Vector xs = x(s).col(j);
    const auto restarted = integrate(a, xs, s, 6.0, tol);
    for (double t : {3.0, 4.5, 6.0}) CHECK((restarted.at(t) - x(t).col(j)).norm() <= 10 * tol * x(t).norm());
  }
}

TEST_CASE("forward then backward recovers the initial state") {
  const double tol = 1e-10;
  const auto a = example3_A();
  const Vector x0 = vec({0.3, -1.2});
  const auto fwd = integrate(a, x0, 0.0, 8.0, tol);
  const auto back = integrate(a, fwd.at(8.0), 8.0, 0.0, tol);
  CHECK((back.at(0.0) - x0).norm() < 10 * tol);
}

TEST_CASE("mat_exp agrees with the integrator for constant A") {
  const double tol = 1e-11;
  const Matrix c = mat(3, 3, {0, 1, 0, -2, -0.1, 0.5, 0, 0, 0.05});
  const auto x = fundamental_matrix(MatrixFunction::constant(c), 12.0, tol);
  for (double t : linspace(0, 12, 13)) CHECK((x(t) - mat_exp(c, t)).norm() <= 10 * tol * std::max(1.0, x(t).norm()));
}

TEST_CASE("rejects a degenerate span") {
  CHECK_THROWS_AS(integrate(rotation(), vec({1, 0}), 1.0, 1.0, 1e-8), PreconditionError);
}

TEST_CASE("adaptive quadrature") {
  const auto q = integrate_adaptive([](double t) { return std::exp(-t); }, 0.0, 20.0, 1e-13);
  CHECK(q.value == doctest::Approx(1 - std::exp(-20.0)).epsilon(1e-13));
  const auto r = integrate_adaptive([](double t) { return t * t; }, 1.0, 0.0, 1e-13);
  CHECK(r.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
}

}
