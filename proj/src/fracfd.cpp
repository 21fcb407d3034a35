#include "fcgle/fracfd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "fcgle/errors.hpp"

namespace fcgle {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    throw DomainError("fractional order alpha must lie in (1,2], got " +
                      std::to_string(alpha));
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<double> riesz_coeffs_order2(double alpha, std::size_t n) {
  check_alpha(alpha);
  if (n == 0) throw DomainError("coefficient count must be positive");
  std::vector<double> g(n);
  const double half = 0.5 * alpha;
  const double g0_den = std::tgamma(half + 1.0);
  g[0] = std::tgamma(alpha + 1.0) / (g0_den * g0_den);
  for (std::size_t k = 1; k < n; ++k) {
    g[k] = (1.0 - (alpha + 1.0) / (half + static_cast<double>(k))) * g[k - 1];
  }
  return g;
}

std::vector<double> riesz_coeffs_order4(double alpha, std::size_t n) {
  const std::vector<double> g = riesz_coeffs_order2(alpha, n);
  const double inv_pow = 1.0 / std::pow(2.0, alpha);
  std::vector<double> gh(n);
  for (std::size_t k = 0; k < n; ++k) {
    gh[k] = (4.0 / 3.0) * g[k];
    if (k % 2 == 0) gh[k] -= (1.0 / 3.0) * g[k / 2] * inv_pow;
  }
  return gh;
}

FracOperator::FracOperator(double alpha, int fd_order, std::size_t n, double h)
    : alpha_(alpha), fd_order_(fd_order), h_(h) {
  if (!(h > 0.0)) throw DomainError("grid step must be positive");
  if (fd_order == 2) {
    coeffs_ = riesz_coeffs_order2(alpha, n);
  } else if (fd_order == 4) {
    coeffs_ = riesz_coeffs_order4(alpha, n);
  } else {
    throw DomainError("finite-difference order must be 2 or 4, got " +
                      std::to_string(fd_order));
  }
  scale_ = -1.0 / std::pow(h, alpha);
}

Eigen::VectorXd FracOperator::first_column() const {
  Eigen::VectorXd c(static_cast<Eigen::Index>(size()));
  for (std::size_t k = 0; k < size(); ++k) c[k] = scale_ * coeffs_[k];
  return c;
}

double FracOperator::entry(std::size_t i, std::size_t j) const {
  return scale_ * coeffs_[i > j ? i - j : j - i];
}

Eigen::MatrixXd FracOperator::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      d(i, j) = entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return d;
}

Eigen::VectorXd FracOperator::apply(const Eigen::VectorXd& v) const {
  const auto n = static_cast<Eigen::Index>(size());
  if (v.size() != n) throw DimensionError("FracOperator::apply: length mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) acc += coeffs_[std::abs(i - j)] * v[j];
    out[i] = scale_ * acc;
  }
  return out;
}

FracOperator build_operator(double alpha, int fd_order, std::size_t n, double h) {
  return FracOperator(alpha, fd_order, n, h);
}

SpectralFactor eigendecompose(const FracOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.dense());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver failed for operator of size " +
                         std::to_string(op.size()));
  }
  SpectralFactor f{solver.eigenvectors(), solver.eigenvalues()};
  if (!(f.lambda.maxCoeff() < 0.0)) {
    throw NumericalError("fractional operator is not negative definite");
  }
  return f;
}

BoundaryVanishingPoly::BoundaryVanishingPoly(double a, double b,
                                             std::vector<double> left_coeffs)
    : a_(a), b_(b), left_(std::move(left_coeffs)) {
  if (!(b > a)) throw DomainError("polynomial interval must satisfy a < b");
  const double len = b - a;
  const int deg = static_cast<int>(left_.size()) - 1;
  right_.assign(left_.size(), 0.0);
  // (x-a)^p = (len - (b-x))^p expanded binomially in (b-x).
  for (int p = 0; p <= deg; ++p) {
    if (left_[p] == 0.0) continue;
    for (int q = 0; q <= p; ++q) {
      const double sign = (q % 2 == 0) ? 1.0 : -1.0;
      right_[q] += left_[p] * binomial(p, q) * std::pow(len, p - q) * sign;
    }
  }
  double mag = 0.0;
  for (std::size_t p = 0; p < left_.size(); ++p)
    mag = std::max(mag, std::abs(left_[p]) * std::pow(len, static_cast<double>(p)));
  const double tol = 1e-12 * std::max(mag, 1.0);
  for (int p = 0; p < std::min(2, deg + 1); ++p) {
    if (std::abs(left_[p]) > tol || std::abs(right_[p]) * std::pow(len, p) > tol) {
      throw DomainError("polynomial and its first derivative must vanish at both ends");
    }
    left_[p] = 0.0;
    right_[p] = 0.0;
  }
}

BoundaryVanishingPoly BoundaryVanishingPoly::bump(double a, double b, int k) {
  if (k < 2) throw DomainError("bump exponent must be at least 2");
  const double len = b - a;
  const double norm = std::pow(2.0 / len, 2.0 * k);
  std::vector<double> c(static_cast<std::size_t>(2 * k + 1), 0.0);
  // (x-a)^k (len - (x-a))^k
  for (int j = 0; j <= k; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    c[static_cast<std::size_t>(k + j)] = norm * binomial(k, j) * std::pow(len, k - j) * sign;
  }
  return BoundaryVanishingPoly(a, b, std::move(c));
}

double BoundaryVanishingPoly::operator()(double x) const {
  if (x <= a_ || x >= b_) return 0.0;
  // expand around the nearer endpoint
  const bool left = x - a_ <= b_ - x;
  const std::vector<double>& c = left ? left_ : right_;
  const double s = left ? x - a_ : b_ - x;
  double acc = 0.0;
  for (std::size_t p = c.size(); p-- > 0;) acc = acc * s + c[p];
  return acc;
}

double riesz_exact_poly(const BoundaryVanishingPoly& p, double alpha, double x) {
  if (!(alpha > 1.0 && alpha < 2.0)) {
    throw DomainError("analytic Riesz derivative requires 1 < alpha < 2");
  }
  if (!(x > p.a() && x < p.b())) {
    throw DomainError("analytic Riesz derivative requires x inside (a,b)");
  }
  const double xl = x - p.a();
  const double xr = p.b() - x;
  double left = 0.0;
  double right = 0.0;
  for (std::size_t k = 0; k < p.left_coeffs().size(); ++k) {
    const double pk = static_cast<double>(k);
    const double w = std::tgamma(pk + 1.0) / std::tgamma(pk + 1.0 - alpha);
    left += p.left_coeffs()[k] * w * std::pow(xl, pk - alpha);
    right += p.right_coeffs()[k] * w * std::pow(xr, pk - alpha);
  }
  return -(left + right) / (2.0 * std::cos(alpha * std::numbers::pi / 2.0));
}

}  // namespace fcgle
