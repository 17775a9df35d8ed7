#include <doctest.h>

#include <cmath>

#include "aeq/equivalence.hpp"
#include "aeq/integrator.hpp"
#include "aeq/pipeline.hpp"
#include "support.hpp"

using namespace aeq;
using namespace aeq::test;

namespace {

struct Linear {
  std::shared_ptr<const FundamentalMatrix> x;
  MatrixFunction a, b;
  MatrixFn p;
  TailCertificate cert;
  PsiSolution psi;
};

Linear scalar_oracle(double horizon = 30.0) {
  Linear l;
  l.a = MatrixFunction::zero(1);
  l.b = scalar_fn(expr({term(1, -1)}));
  l.x = std::make_shared<const FundamentalMatrix>(fundamental_matrix(l.a, horizon, 1e-12));
  l.p = build_P(l.x, l.b).as_function();
  l.cert = {1, 0, 1, 0};
  PsiOptions o;
  o.horizon = horizon;
  o.t_start = 0.0;
  l.psi = psi_series(l.p, l.cert, o);
  return l;
}

Linear example1(double tol = 1e-8) {
  const auto s = builtin("example1", {3.0, std::nullopt, 1.0});
  RunConfig cfg;
  cfg.tol = tol;
  const auto ctx = prepare_linear(s, cfg);
  Linear l;
  l.a = ctx.A;
  l.b = ctx.B;
  l.x = ctx.X;
  l.p = ctx.P->as_function();
  l.cert = ctx.cert;
  l.psi = psi_series(l.p, l.cert, ctx.psi_options);
  return l;
}

}  // namespace

TEST_SUITE("equivalence") {

TEST_CASE("B = 0 gives the identity map") {
  const auto s = builtin("example1", {3.0, std::nullopt, 1.0});
  const auto x = fundamental_matrix(*s.A, 10.0, 1e-11);
  const MatrixFn zero = [](double) { return Matrix::Zero(2, 2); };
  PsiOptions o;
  o.horizon = 10.0;
  o.t_start = 0.0;
  const auto psi = psi_series(zero, {1, 0, 1, 0}, o);
  const auto map = build_map(x, psi);
  CHECK((map.M - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((map_solution(map, vec({3, -1}), MapDirection::x_to_y) - vec({3, -1})).norm() < 1e-12);
}

TEST_CASE("scalar map is exp(-e^{-t2})") {
  const auto l = scalar_oracle();
  const auto map = build_map(*l.x, l.psi);
  CHECK(map.M(0, 0) == doctest::Approx(std::exp(-std::exp(-map.t2))).epsilon(1e-8));
  CHECK(map_solution(map, vec({1}), MapDirection::x_to_y)(0) == doctest::Approx(std::exp(-std::exp(-map.t2))).epsilon(1e-8));
  CHECK(map.psi_horizon == 30.0);
}

TEST_CASE("map invariants and round trip") {
  const auto l = example1();
  const auto map = build_map(*l.x, l.psi);
  CHECK((map.M * map.M_inv - Matrix::Identity(2, 2)).norm() <= 1e-10 * map.condition);
  for (int j = 0; j < 2; ++j) {
    const Vector v = Vector::Unit(2, j);
    const Vector there = map_solution(map, v, MapDirection::x_to_y);
    CHECK((map_solution(map, there, MapDirection::y_to_x) - v).norm() < 1e-10);
  }
  // linearity
  const Vector a = vec({0.3, 2}), b = vec({-1, 0.5});
  CHECK((map_solution(map, 2 * a - b, MapDirection::x_to_y) -
         (2 * map_solution(map, a, MapDirection::x_to_y) - map_solution(map, b, MapDirection::x_to_y)))
            .norm() < 1e-12);
}

TEST_CASE("map self-convergence under tighter settings") {
  const auto coarse = example1(1e-8);
  const auto fine = example1(1e-10);
  const auto m1 = build_map(*coarse.x, coarse.psi);
  const auto m2 = build_map(*fine.x, fine.psi);
  // compare the maps at a common t2
  const double t2 = std::max(m1.t2, m2.t2);
  const Matrix a = (*coarse.x)(t2) * (Matrix::Identity(2, 2) + coarse.psi.at(t2)) * inverse_at(*coarse.x, t2);
  const Matrix b = (*fine.x)(t2) * (Matrix::Identity(2, 2) + fine.psi.at(t2)) * inverse_at(*fine.x, t2);
  CHECK((a - b).norm() < 1e-6);
}

TEST_CASE("transported rank") {
  const auto l = example1();
  const auto map = build_map(*l.x, l.psi);
  CHECK(transported_rank(map, {Vector::Unit(2, 0), Vector::Unit(2, 1)}) == 2);
  CHECK(transported_rank(map, {vec({1, 2}), vec({2, 4})}) == 1);
}

TEST_CASE("C2") {
  SUBCASE("B = 0 is identically 0") {
    const auto s = builtin("example1", {3.0, std::nullopt, 1.0});
    const auto x = fundamental_matrix(*s.A, 20.0, 1e-11);
    const MatrixFn zero = [](double) { return Matrix::Zero(2, 2); };
    PsiOptions o;
    o.horizon = 20.0;
    o.t_start = 0.0;
    const auto psi = psi_series(zero, {1, 0, 1, 0}, o);
    const auto r = check_C2(x, psi, {1e-300, 0, 1, 0});
    for (double v : r.curve.value) CHECK(v == 0.0);
    CHECK(r.verdict.pass);
  }
  SUBCASE("the e^-3t example passes") {
    const auto l = example1();
    const auto r = check_C2(*l.x, l.psi, l.cert);
    CHECK(r.verdict.pass);
    CHECK(r.verdict.condition == "C2");
    CHECK(r.curve.envelope.back() < 1e-4);
  }
  SUBCASE("growth faster than the certificate decay fails") {
    Linear l;
    l.a = MatrixFunction::constant(Matrix::Constant(1, 1, 0.5));
    l.x = std::make_shared<const FundamentalMatrix>(fundamental_matrix(l.a, 40.0, 1e-11));
    l.p = [](double t) { return Matrix::Constant(1, 1, std::exp(-0.3 * t)); };
    PsiOptions o;
    o.horizon = 40.0;
    o.t_start = 0.0;
    const TailCertificate cert{1, 0, 0.3, 0};
    const auto psi = psi_series(l.p, cert, o);
    CHECK_FALSE(check_C2(*l.x, psi, cert).verdict.pass);
  }
}

TEST_CASE("equivalence report") {
  SUBCASE("B = 0 gives zero differences") {
    const auto a = MatrixFunction::constant(mat(2, 2, {0, 1, -1, 0}));
    const auto x = fundamental_matrix(a, 10.0, 1e-11);
    const MatrixFn zero = [](double) { return Matrix::Zero(2, 2); };
    PsiOptions o;
    o.horizon = 10.0;
    o.t_start = 0.0;
    const auto map = build_map(x, psi_series(zero, {1, 0, 1, 0}, o));
    const auto r = equivalence_report(a, MatrixFunction::zero(2), map, {Vector::Unit(2, 0)}, 10.0);
    for (double g : r.gaps[0]) CHECK(g < 1e-12);
    CHECK(r.verdict.pass);
  }
  SUBCASE("scalar gap decays like e^{-t}") {
    const auto l = scalar_oracle();
    const auto map = build_map(*l.x, l.psi);
    const auto r = equivalence_report(l.a, l.b, map, {vec({1})}, 30.0);
    CHECK(r.verdict.pass);
    // y(t) = c exp(-e^{-t}), x(t) = c with c fixed at t2
    const double c = 1.0;
    for (std::size_t i = 0; i < r.t.size(); i += 25)
      CHECK(std::fabs(r.gaps[0][i] - c * (1 - std::exp(-std::exp(-r.t[i])))) < 1e-9);
  }
  SUBCASE("the e^-3t example is below 1e-4 at T = 20") {
    const auto l = example1();
    const auto map = build_map(*l.x, l.psi);
    const auto r = equivalence_report(l.a, l.b, map, {Vector::Unit(2, 0), Vector::Unit(2, 1)}, 20.0);
    CHECK(r.verdict.pass);
    for (const auto& g : r.gaps) CHECK(g.back() < 1e-4);
  }
}

TEST_CASE("difference identity y = x + X Psi c") {
  const auto l = example1(1e-10);
  const auto map = build_map(*l.x, l.psi);
  const double t2 = map.t2;
  const Vector x2 = (*l.x)(t2) * vec({1, -0.5});
  const Vector y2 = map_solution(map, x2, MapDirection::x_to_y);
  const Matrix I = Matrix::Identity(2, 2);
  const Vector c = (I + l.psi.at(t2)).inverse() * inverse_at(*l.x, t2) * y2;
  const auto y = integrate(l.a + l.b, y2, t2, 20.0, 1e-12);
  for (double t : linspace(t2, 20.0, 21)) {
    const Vector x = (*l.x)(t) * c;
    const Vector predicted = x + (*l.x)(t) * l.psi.at(t) * c;
    CHECK((y.at(t) - predicted).norm() <= 1e-7 * std::max(1.0, y.at(t).norm()));
  }
}

}
