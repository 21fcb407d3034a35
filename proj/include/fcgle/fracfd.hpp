#pragma once

// One-dimensional Riesz fractional finite-difference operators on a uniform
// grid of inner nodes, their symmetric eigendecompositions, and analytic Riesz
// derivatives of polynomials that vanish at both ends of an interval.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace fcgle {

/// Coefficients g_0..g_{n-1} of the centered second-order Riesz stencil,
/// computed with the overflow-free recurrence. Requires 1 < alpha <= 2, n >= 1.
std::vector<double> riesz_coeffs_order2(double alpha, std::size_t n);

/// Fourth-order coefficients obtained by Richardson extrapolation of the
/// second-order stencil at steps h and 2h.
std::vector<double> riesz_coeffs_order4(double alpha, std::size_t n);

/// D = -(1/h^alpha) * Toeplitz(coeffs), a dense symmetric negative definite
/// matrix. Coefficients are always kept in double precision.
class FracOperator {
 public:
  FracOperator(double alpha, int fd_order, std::size_t n, double h);

  double alpha() const { return alpha_; }
  int fd_order() const { return fd_order_; }
  std::size_t size() const { return coeffs_.size(); }
  double step() const { return h_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  /// -1/h^alpha
  double scale() const { return scale_; }

  /// First column of the Toeplitz matrix D, including the scale.
  Eigen::VectorXd first_column() const;

  double entry(std::size_t i, std::size_t j) const;
  Eigen::MatrixXd dense() const;

  /// Direct O(n^2) product D*v.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

 private:
  double alpha_;
  int fd_order_;
  double h_;
  double scale_;
  std::vector<double> coeffs_;
};

FracOperator build_operator(double alpha, int fd_order, std::size_t n, double h);

/// D = Q diag(lambda) Q^T with Q orthogonal and lambda ascending, all negative.
struct SpectralFactor {
  Eigen::MatrixXd Q;
  Eigen::VectorXd lambda;
};

SpectralFactor eigendecompose(const FracOperator& op);

/// A polynomial on (a,b), stored both as sum_p c_p (x-a)^p and as the
/// mirrored expansion sum_q d_q (b-x)^q. Both expansions must start at power
/// two or higher, so the zero extension outside (a,b) is C^1.
class BoundaryVanishingPoly {
 public:
  BoundaryVanishingPoly(double a, double b, std::vector<double> left_coeffs);

  /// ((x-a)(b-x))^k (2/(b-a))^{2k}; equals (1-x^2)^k on (-1,1).
  static BoundaryVanishingPoly bump(double a, double b, int k);

  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<double>& left_coeffs() const { return left_; }
  const std::vector<double>& right_coeffs() const { return right_; }

  double operator()(double x) const;

 private:
  double a_;
  double b_;
  std::vector<double> left_;
  std::vector<double> right_;
};

/// Riesz derivative of order alpha in (1,2) of the zero-extended polynomial,
/// evaluated at x in (a,b) through the closed-form left and right
/// Riemann-Liouville derivatives of the monomials.
double riesz_exact_poly(const BoundaryVanishingPoly& p, double alpha, double x);

}  // namespace fcgle
