#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

namespace aeq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Trig { none, sin, cos };
enum class Parity { none, even, odd };

std::string_view to_string(Parity p);

/// coeff · (t+1)^power · e^{rate·t + abs_rate·|t|} · {1 | sin ωt | cos ωt}
struct Term {
  double coeff = 1.0;
  int power = 0;
  double rate = 0.0;
  double abs_rate = 0.0;
  Trig trig = Trig::none;
  double omega = 0.0;

  double operator()(double t) const;
  bool operator==(const Term&) const = default;
};

/// Finite sum of terms; the scalar building block of every time-dependent input.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::vector<Term> terms) : terms_(std::move(terms)) {}
  static Expr constant(double c);

  double operator()(double t) const;
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Multiplies every term by e^{rate·t}.
  Expr times_exp(double rate) const;
  Expr scaled(double c) const;

  bool operator==(const Expr&) const = default;

 private:
  std::vector<Term> terms_;
};

/// Time-dependent n×n matrix with one Expr per entry (row-major).
class MatrixFunction {
 public:
  MatrixFunction() = default;
  MatrixFunction(int dim, std::vector<Expr> entries, Parity parity = Parity::none);

  static MatrixFunction zero(int dim);
  static MatrixFunction constant(const Matrix& m);
  /// b(t)·C
  static MatrixFunction scaled(const Expr& b, const Matrix& c, Parity parity = Parity::none);

  int dim() const { return dim_; }
  Parity parity() const { return parity_; }
  const Expr& entry(int i, int j) const { return entries_[static_cast<std::size_t>(i * dim_ + j)]; }
  const std::vector<Expr>& entries() const { return entries_; }

  Matrix operator()(double t) const;
  void eval(double t, Matrix& out) const;
  bool is_zero() const;
  bool is_constant() const;

  /// Worst ‖F(-t) ∓ F(t)‖_F over `samples` points in (0, horizon], sign per `p`.
  double parity_deviation(Parity p, double horizon, int samples = 64) const;
  /// Checks the declared parity; a violated declaration is an InputError.
  void validate_parity(double horizon, int samples = 64) const;

  bool operator==(const MatrixFunction&) const = default;

 private:
  int dim_ = 0;
  std::vector<Expr> entries_;
  Parity parity_ = Parity::none;
};

enum class StateFactor { linear, sin, tanh };

/// One summand of f_i(t, y): scalar(t) · factor(y_index).
struct StateTerm {
  Expr scalar;
  StateFactor factor = StateFactor::linear;
  int index = 0;
  bool operator==(const StateTerm&) const = default;
};

/// f(t, y) with every term carrying a 1-Lipschitz state factor that vanishes
/// at 0, so f(t, 0) = 0 holds by construction.
class StateMap {
 public:
  StateMap() = default;
  StateMap(int dim, std::vector<std::vector<StateTerm>> rows);
  static StateMap zero(int dim);

  int dim() const { return dim_; }
  const std::vector<std::vector<StateTerm>>& rows() const { return rows_; }
  bool is_zero() const;

  Vector operator()(double t, const Vector& y) const;
  /// Frobenius norm of the entrywise |coefficient| matrix: a Lipschitz bound in y.
  double lipschitz_bound(double t) const;

  bool operator==(const StateMap&) const = default;

 private:
  int dim_ = 0;
  std::vector<std::vector<StateTerm>> rows_;
};

}  // namespace aeq
