#include "aeq/fundamental.hpp"

#include <cmath>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>

#include "aeq/errors.hpp"
#include "aeq/quadrature.hpp"

namespace aeq {
namespace {

Vector identity_flat(int n) {
  Matrix id = Matrix::Identity(n, n);
  return Eigen::Map<const Vector>(id.data(), n * n);
}

Trajectory integrate_matrix(const MatrixFunction& a, double t_end, double tol) {
  const int n = a.dim();
  Matrix at;
  Rhs rhs = [&, n](double t, const Vector& x, Vector& dx) {
    a.eval(t, at);
    Eigen::Map<const Matrix> xm(x.data(), n, n);
    dx.resize(n * n);
    Eigen::Map<Matrix> dm(dx.data(), n, n);
    dm.noalias() = at * xm;
  };
  return integrate(rhs, identity_flat(n), 0.0, t_end, IntegrateOptions{tol});
}

}  // namespace

FundamentalMatrix::FundamentalMatrix(MatrixFunction a, Trajectory forward, std::optional<Trajectory> backward,
                                     double tol)
    : a_(std::move(a)), forward_(std::move(forward)), backward_(std::move(backward)), tol_(tol) {}

Matrix FundamentalMatrix::operator()(double t) const {
  const int n = dim();
  Vector flat(n * n);
  if (t >= 0.0 || !backward_) {
    forward_.at(t, flat);
  } else {
    backward_->at(t, flat);
  }
  return Eigen::Map<const Matrix>(flat.data(), n, n);
}

Trajectory FundamentalMatrix::column(int j) const { return forward_.slice(j * dim(), dim()); }

std::vector<double> FundamentalMatrix::grid() const {
  std::vector<double> g;
  if (backward_) g.assign(backward_->times().begin(), backward_->times().end() - 1);
  g.insert(g.end(), forward_.times().begin(), forward_.times().end());
  return g;
}

FundamentalMatrix fundamental_matrix(const MatrixFunction& a, double horizon, double tol, bool two_sided) {
  if (!(horizon > 0.0)) throw PreconditionError("fundamental_matrix: horizon must be positive");
  Trajectory fwd = integrate_matrix(a, horizon, tol);
  std::optional<Trajectory> bwd;
  if (two_sided) bwd = integrate_matrix(a, -horizon, tol);
  return FundamentalMatrix(a, std::move(fwd), std::move(bwd), tol);
}

Matrix inverse_at(const FundamentalMatrix& x, double t) {
  const Matrix xt = x(t);
  if (t == 0.0) return Matrix::Identity(xt.rows(), xt.cols());
  Eigen::PartialPivLU<Matrix> lu(xt);
  const double rcond = lu.rcond();
  if (!(rcond > 1e3 * std::numeric_limits<double>::epsilon()))
    throw NumericalError("X(t) numerically singular at t=" + std::to_string(t) +
                         " (rcond=" + std::to_string(rcond) + ")");
  return lu.inverse();
}

Matrix mat_exp(const Matrix& c, double t) {
  if (t == 0.0) return Matrix::Identity(c.rows(), c.cols());
  const Matrix ct = c * t;
  const double size = ct.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(size > 32.0)) return ct.exp();
  const int k = static_cast<int>(std::ceil(std::log2(size / 32.0)));
  Matrix e = (ct * std::ldexp(1.0, -k)).exp();
  for (int i = 0; i < k; ++i) e = (e * e).eval();
  return e;
}

double liouville_defect(const FundamentalMatrix& x) {
  const auto& a = x.system();
  auto trace = [&](double s) { return a(s).trace(); };
  double worst = 0.0;
  double prev_t = 0.0;
  double integral = 0.0;
  const auto g = x.grid();
  for (double t : g) {
    if (t < 0.0) continue;
    integral += integrate_adaptive(trace, prev_t, t, 1e-13).value;
    prev_t = t;
    worst = std::max(worst, std::fabs(std::log(std::fabs(x(t).determinant())) - integral));
  }
  prev_t = 0.0;
  integral = 0.0;
  for (auto it = g.rbegin(); it != g.rend(); ++it) {
    const double t = *it;
    if (t > 0.0) continue;
    integral += integrate_adaptive(trace, prev_t, t, 1e-13).value;
    prev_t = t;
    worst = std::max(worst, std::fabs(std::log(std::fabs(x(t).determinant())) - integral));
  }
  return worst;
}

double ode_residual(const FundamentalMatrix& x, double t) {
  const double h = 1e-5 * std::max(1.0, std::fabs(t));
  double lo = std::max(x.t_min(), t - h);
  double hi = std::min(x.t_max(), t + h);
  const Matrix deriv = (x(hi) - x(lo)) / (hi - lo);
  return (deriv - x.system()(t) * x(t)).norm();
}

}  // namespace aeq
