#include "aeq/matrix_function.hpp"

#include <cmath>
#include <string>

#include "aeq/errors.hpp"

namespace aeq {

std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::even:
      return "even";
    case Parity::odd:
      return "odd";
    case Parity::none:
      break;
  }
  return "none";
}

double Term::operator()(double t) const {
  double v = coeff;
  if (power != 0) v *= std::pow(t + 1.0, power);
  const double e = rate * t + abs_rate * std::fabs(t);
  if (e != 0.0) v *= std::exp(e);
  switch (trig) {
    case Trig::sin:
      v *= std::sin(omega * t);
      break;
    case Trig::cos:
      v *= std::cos(omega * t);
      break;
    case Trig::none:
      break;
  }
  return v;
}

Expr Expr::constant(double c) {
  if (c == 0.0) return Expr{};
  Term term;
  term.coeff = c;
  return Expr({term});
}

double Expr::operator()(double t) const {
  double s = 0.0;
  for (const auto& term : terms_) s += term(t);
  return s;
}

bool Expr::is_constant() const {
  for (const auto& term : terms_) {
    if (term.power != 0 || term.rate != 0.0 || term.abs_rate != 0.0) return false;
    if (term.trig == Trig::sin) return false;
    if (term.trig == Trig::cos && term.omega != 0.0) return false;
  }
  return true;
}

Expr Expr::times_exp(double rate) const {
  auto terms = terms_;
  for (auto& term : terms) term.rate += rate;
  return Expr(std::move(terms));
}

Expr Expr::scaled(double c) const {
  if (c == 0.0) return Expr{};
  auto terms = terms_;
  for (auto& term : terms) term.coeff *= c;
  return Expr(std::move(terms));
}

MatrixFunction::MatrixFunction(int dim, std::vector<Expr> entries, Parity parity)
    : dim_(dim), entries_(std::move(entries)), parity_(parity) {
  if (dim_ <= 0 || entries_.size() != static_cast<std::size_t>(dim_ * dim_))
    throw InputError("matrix function needs dim*dim entries with dim > 0");
}

MatrixFunction MatrixFunction::zero(int dim) {
  return MatrixFunction(dim, std::vector<Expr>(static_cast<std::size_t>(dim * dim)));
}

MatrixFunction MatrixFunction::constant(const Matrix& m) {
  const int n = static_cast<int>(m.rows());
  std::vector<Expr> e;
  e.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e.push_back(Expr::constant(m(i, j)));
  return MatrixFunction(n, std::move(e), Parity::even);
}

MatrixFunction MatrixFunction::scaled(const Expr& b, const Matrix& c, Parity parity) {
  const int n = static_cast<int>(c.rows());
  std::vector<Expr> e;
  e.reserve(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e.push_back(b.scaled(c(i, j)));
  return MatrixFunction(n, std::move(e), parity);
}

void MatrixFunction::eval(double t, Matrix& out) const {
  out.resize(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) out(i, j) = entry(i, j)(t);
}

Matrix MatrixFunction::operator()(double t) const {
  Matrix m;
  eval(t, m);
  return m;
}

bool MatrixFunction::is_zero() const {
  for (const auto& e : entries_)
    if (!e.is_zero()) return false;
  return true;
}

bool MatrixFunction::is_constant() const {
  for (const auto& e : entries_)
    if (!e.is_constant()) return false;
  return true;
}

double MatrixFunction::parity_deviation(Parity p, double horizon, int samples) const {
  if (p == Parity::none) return 0.0;
  const double sign = p == Parity::odd ? 1.0 : -1.0;
  double worst = 0.0;
  for (int k = 1; k <= samples; ++k) {
    const double t = horizon * k / samples;
    worst = std::max(worst, ((*this)(-t) + sign * (*this)(t)).norm());
  }
  return worst;
}

void MatrixFunction::validate_parity(double horizon, int samples) const {
  if (parity_ == Parity::none) return;
  double scale = 1.0;
  for (int k = 0; k <= samples; ++k) scale = std::max(scale, (*this)(horizon * k / samples).norm());
  const double dev = parity_deviation(parity_, horizon, samples);
  if (!(dev <= 1e-9 * scale))
    throw InputError("declared parity '" + std::string(to_string(parity_)) +
                     "' violated (worst deviation " + std::to_string(dev) + ")");
}

StateMap::StateMap(int dim, std::vector<std::vector<StateTerm>> rows) : dim_(dim), rows_(std::move(rows)) {
  if (dim_ <= 0 || rows_.size() != static_cast<std::size_t>(dim_))
    throw InputError("state map needs one row per dimension");
  for (const auto& row : rows_)
    for (const auto& term : row)
      if (term.index < 0 || term.index >= dim_) throw InputError("state factor index out of range");
}

StateMap StateMap::zero(int dim) { return StateMap(dim, std::vector<std::vector<StateTerm>>(static_cast<std::size_t>(dim))); }

bool StateMap::is_zero() const {
  for (const auto& row : rows_)
    for (const auto& term : row)
      if (!term.scalar.is_zero()) return false;
  return true;
}

Vector StateMap::operator()(double t, const Vector& y) const {
  Vector out = Vector::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (const auto& term : rows_[static_cast<std::size_t>(i)]) {
      const double yj = y(term.index);
      double factor = yj;
      if (term.factor == StateFactor::sin) factor = std::sin(yj);
      if (term.factor == StateFactor::tanh) factor = std::tanh(yj);
      s += term.scalar(t) * factor;
    }
    out(i) = s;
  }
  return out;
}

double StateMap::lipschitz_bound(double t) const {
  Matrix l = Matrix::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (const auto& term : rows_[static_cast<std::size_t>(i)]) {
      double a = 0.0;
      for (const auto& piece : term.scalar.terms()) a += std::fabs(piece(t));
      l(i, term.index) += a;
    }
  return l.stableNorm();
}

}  // namespace aeq
