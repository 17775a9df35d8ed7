#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "aeq/kernels.hpp"

using namespace aeq::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar table is always available") {
  CHECK(isa_available(Isa::scalar));
  CHECK(isa_name(Isa::scalar) == "scalar");
  CHECK(isa_name(Isa::avx2) == "avx2");
}

TEST_CASE("scalar reference kernels") {
  const auto& k = scalar_table();
  std::vector<double> out{1, 1, 1}, a{1, 2, 3}, b{4, 5, 6};
  k.multiply_accumulate(out.data(), a.data(), b.data(), 3);
  CHECK(out == std::vector<double>{5, 11, 19});
  k.axpy(2.0, a.data(), out.data(), 3);
  CHECK(out == std::vector<double>{7, 15, 25});
  std::vector<double> acc{0, 0, 0};
  k.accumulate_square(acc.data(), a.data(), 3);
  CHECK(acc == std::vector<double>{1, 4, 9});
  CHECK(k.dot(a.data(), b.data(), 3) == 32.0);
  CHECK(k.max_value(b.data(), 3) == 6.0);
  CHECK(k.max_value(b.data(), 0) == -std::numeric_limits<double>::infinity());
  CHECK(k.max_abs_diff(a.data(), b.data(), 3) == 3.0);
}

TEST_CASE("active table matches the scalar table on random data") {
  std::mt19937_64 rng(7);
  const auto& ref = scalar_table();
  const auto& act = active();
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 1001u}) {
    CAPTURE(n);
    const auto a = random_vector(rng, n), b = random_vector(rng, n), c = random_vector(rng, n);

    auto o1 = c, o2 = c;
    ref.multiply_accumulate(o1.data(), a.data(), b.data(), n);
    act.multiply_accumulate(o2.data(), a.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(o2[i], o1[i]) < 1e-15);

    o1 = c;
    o2 = c;
    ref.axpy(0.37, a.data(), o1.data(), n);
    act.axpy(0.37, a.data(), o2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(o2[i], o1[i]) < 1e-15);

    o1 = c;
    o2 = c;
    ref.accumulate_square(o1.data(), a.data(), n);
    act.accumulate_square(o2.data(), a.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(o2[i], o1[i]) < 1e-15);

    CHECK(rel(act.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)) < 1e-13);
    CHECK(act.max_value(a.data(), n) == ref.max_value(a.data(), n));
    CHECK(act.max_abs_diff(a.data(), b.data(), n) == ref.max_abs_diff(a.data(), b.data(), n));
  }
}

#if defined(AEQ_WITH_AVX2)
TEST_CASE("avx2 table matches the scalar table when the CPU has it") {
  if (!isa_available(Isa::avx2)) return;
  std::mt19937_64 rng(11);
  const auto& ref = scalar_table();
  const auto& v = avx2_table();
  for (std::size_t n : {2u, 9u, 31u, 257u}) {
    const auto a = random_vector(rng, n), b = random_vector(rng, n);
    CHECK(rel(v.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)) < 1e-13);
    CHECK(v.max_value(a.data(), n) == ref.max_value(a.data(), n));
    CHECK(v.max_abs_diff(a.data(), b.data(), n) == ref.max_abs_diff(a.data(), b.data(), n));
  }
}
#endif

TEST_CASE("max kernels propagate nothing from past the end") {
  std::vector<double> x{1.0, -2.0, 5.0, 1e300};
  CHECK(active().max_value(x.data(), 3) == 5.0);
}

}
