#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "aeq/errors.hpp"
#include "aeq/scenario.hpp"
#include "support.hpp"

using namespace aeq;
using namespace aeq::test;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* const header = "aeq-version = 1\nname = s\ndim = 1\n";

struct Malformed {
  const char* what;
  std::string text;
  int line;
  int column;  ///< 0: only the line is pinned
};

std::vector<Malformed> malformed_cases() {
  const std::string h = header;
  return {
      {"unclosed paren", h + "A = [0]\nB = [exp(-t]\n", 5, 9},
      {"stray character", h + "A = [0]\nB = [exp(-t) $ 2]\n", 5, 14},
      {"missing version", "name = s\ndim = 1\nA = [0]\n", 1, 1},
      {"unsupported version", "aeq-version = 2\nname = s\ndim = 1\nA = [0]\n", 1, 15},
      {"unknown key", h + "A = [0]\nfoo = 1\n", 5, 1},
      {"dimension mismatch", h + "A = [0, 1]\n", 4, 1},
      {"state factor outside f", h + "A = [y1]\n", 4, 6},
      {"two trig factors", h + "A = [sin(t)*cos(t)]\n", 4, 13},
      {"incomplete certificate", h + "A = [0]\ncert P { K = 1, m = 0, lambda = 1 }\n", 5, 6},
      {"undefined certificate", h + "A = [0]\nrun { p_cert = Q }\n", 5, 0},
      {"ragged rows", "aeq-version = 1\nname = s\ndim = 2\nA = [0, 1; 0]\n", 4, 5},
      {"violated parity", h + "A = [exp(-t)]\nA.parity = odd\n", 5, 0},
  };
}

/// Random time-dependent sum in the scenario grammar.
std::string random_sum(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 3), pick(0, 3), power(0, 3);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), rate(-3.0, 0.5), omega(0.0, 4.0);
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string out;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    if (i) out += " + ";
    out += num(coef(rng));
    if (pick(rng) == 0) out += "*(t+1)^" + std::to_string(power(rng));
    switch (pick(rng)) {
      case 0:
        out += "*exp(" + num(rate(rng)) + "*t)";
        break;
      case 1:
        out += "*exp(" + num(rate(rng)) + "*abs(t))";
        break;
      default:
        break;
    }
    switch (pick(rng)) {
      case 0:
        out += "*sin(" + num(omega(rng)) + "*t)";
        break;
      case 1:
        out += "*cos(" + num(omega(rng)) + "*t)";
        break;
      default:
        break;
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("golden files of the built-ins") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const std::string path = std::string(AEQ_GOLDEN_DIR) + "/" + name + ".aeq";
    const std::string text = read_file(path);
    REQUIRE_FALSE(text.empty());
    const auto s = builtin(name);
    CHECK(serialize(s) == text);
    CHECK(parse_scenario(text) == s);
    CHECK(load_scenario(path) == s);
  }
}

TEST_CASE("serialize then parse is the identity on built-ins") {
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    const auto s = builtin(name);
    const auto again = parse_scenario(serialize(s));
    CHECK(again == s);
    CHECK(serialize(again) == serialize(s));
  }
}

TEST_CASE("round trip on random scenarios") {
  std::mt19937_64 rng(20240917);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text = "aeq-version = 1\nname = r" + std::to_string(trial) + "\ndim = 2\nA = [";
    for (int i = 0; i < 4; ++i) text += (i == 2 ? "; " : i ? ", " : "") + random_sum(rng);
    text += "]\nB = [";
    for (int i = 0; i < 4; ++i) text += (i == 2 ? "; " : i ? ", " : "") + random_sum(rng);
    text += "]\ncert P { K = 2.5, m = 1, lambda = 0.75, t_star = 1 }\nrun { horizon = 12, two_sided = true }\n";
    CAPTURE(text);
    const auto s = parse_scenario(text);
    const auto again = parse_scenario(serialize(s));
    CHECK(again == s);
    for (double t : linspace(-12, 12, 49)) {
      CHECK((*s.A)(t).allFinite());
      CHECK((*again.B)(t) == (*s.B)(t));
    }
  }
}

TEST_CASE("built-in terms evaluate finitely on [-T, T]") {
  for (const auto& name : builtin_names()) {
    const auto s = builtin(name);
    const double T = s.nominal_horizon();
    // one-sided scenarios live on [t_start, T]
    const double lo = s.run.two_sided ? -T : s.run.t_start.value_or(0.0);
    for (double t : linspace(lo, T, 401)) {
      if (s.A) CHECK((*s.A)(t).allFinite());
      if (s.B) CHECK((*s.B)(t).allFinite());
      if (s.eta) CHECK(std::isfinite((*s.eta)(t)));
    }
  }
}

TEST_CASE("malformed inputs report their location") {
  const auto cases = malformed_cases();
  CHECK(cases.size() >= 10);
  for (const auto& c : cases) {
    CAPTURE(c.what);
    bool thrown = false;
    try {
      parse_scenario(c.text);
    } catch (const InputError& e) {
      thrown = true;
      CHECK(e.line() == c.line);
      if (c.column) CHECK(e.column() == c.column);
      CHECK(e.column() > 0);
      CHECK_FALSE(e.message().empty());
    }
    CHECK(thrown);
  }
}

TEST_CASE("minimal scalar scenario") {
  const auto s = parse_scenario("aeq-version = 1\nname = tiny\ndim = 1\nA = [0]\nB = [exp(-t)]\n");
  CHECK(s.dim == 1);
  CHECK(s.name == "tiny");
  CHECK((*s.B)(2.0)(0, 0) == doctest::Approx(std::exp(-2.0)));
  CHECK(s.nominal_horizon() == 10.0);
}

TEST_CASE("comments and layout are free") {
  const auto a = parse_scenario(
      "# leading comment\naeq-version = 1\nname = c # trailing\ndim = 2\nA = [0, 1;\n     -1, 0]\n");
  CHECK((*a.A)(0.0) == mat(2, 2, {0, 1, -1, 0}));
}

TEST_CASE("example1 parameters") {
  const auto s = builtin("example1", {3.0, std::nullopt, 1.0});
  for (double t : {0.0, 0.5, 4.0}) {
    CHECK((*s.A)(t) == mat(2, 2, {0, 1, 2 / ((t + 1) * (t + 1)), 0}));
    const Matrix b = (*s.B)(t);
    CHECK(b(1, 0) == doctest::Approx(std::exp(-3 * t)).epsilon(1e-15));
    CHECK(b(0, 0) == 0.0);
  }
  CHECK(s.certs.front().auto_K);
  CHECK(s.certs.front().cert.lambda == 2.5);
}

TEST_CASE("example2 parameters") {
  const auto s = builtin("example2", {1.0, 0.1, std::nullopt});
  CHECK(s.dim == 5);
  const double pi = std::numbers::pi;
  Matrix a = Matrix::Zero(5, 5);
  a(0, 1) = 1;
  a(1, 0) = -1;
  a(2, 3) = pi;
  a(3, 2) = -pi;
  a(4, 4) = 0.1;
  CHECK((*s.A)(3.0) == a);
  CHECK(((*s.B)(2.0) - Matrix::Constant(5, 5, std::exp(-2.0))).norm() < 1e-15);
  CHECK(s.initial.size() == 4);
  for (const auto& c : s.initial) CHECK(c(4) == 0.0);
  CHECK_THROWS_AS(builtin("example2", {1.0, 0.6, std::nullopt}), InputError);
  try {
    builtin("example2", {1.0, 0.6, std::nullopt});
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("alpha - 2 beta") != std::string::npos);
  }
}

TEST_CASE("example3 parities") {
  const auto s = builtin("example3");
  CHECK(s.A->parity() == Parity::odd);
  CHECK(s.B->parity() == Parity::even);
  CHECK(s.run.two_sided);
  CHECK((*s.B)(-1.3) == (*s.B)(1.3));
  CHECK((*s.B)(1.3)(1, 0) == doctest::Approx(std::cos(1.3) * std::exp(-2.6)));
  const auto odd = builtin("example3_odd");
  CHECK(odd.B->parity() == Parity::odd);
}

TEST_CASE("scalar oracle") {
  const auto s = builtin("scalar_oracle");
  CHECK((*s.A)(1.0)(0, 0) == 0.0);
  CHECK((*s.B)(1.0)(0, 0) == doctest::Approx(std::exp(-1.0)));
  CHECK(s.run.t_start == 0.0);
}

TEST_CASE("unknown built-in") { CHECK_THROWS_AS(builtin("example9"), InputError); }

TEST_CASE("missing file") { CHECK_THROWS_AS(load_scenario("/nonexistent/x.aeq"), InputError); }

}
