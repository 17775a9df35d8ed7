#pragma once

#include <cmath>
#include <vector>

#include "aeq/matrix_function.hpp"

namespace aeq::test {

inline Term term(double coeff, double rate = 0.0, int power = 0) {
  Term t;
  t.coeff = coeff;
  t.rate = rate;
  t.power = power;
  return t;
}

inline Term trig_term(double coeff, Trig trig, double omega, double abs_rate = 0.0) {
  Term t;
  t.coeff = coeff;
  t.trig = trig;
  t.omega = omega;
  t.abs_rate = abs_rate;
  return t;
}

inline Expr expr(std::vector<Term> terms) { return Expr(std::move(terms)); }

/// 1×1 matrix function
inline MatrixFunction scalar_fn(const Expr& e, Parity parity = Parity::none) { return MatrixFunction(1, {e}, parity); }

inline Matrix mat(int rows, int cols, std::initializer_list<double> v) {
  Matrix m(rows, cols);
  auto it = v.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

inline Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

}  // namespace aeq::test
