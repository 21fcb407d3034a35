#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

#include "fcgle/errors.hpp"
#include "fcgle/fracfd.hpp"

using namespace fcgle;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// g_k = (-1)^k Gamma(alpha+1) / (Gamma(alpha/2-k+1) Gamma(alpha/2+k+1)) in 50 digits.
double gamma_coeff(double alpha, int k) {
  const Big a(alpha);
  const Big num = boost::math::tgamma(a + 1);
  const Big den = boost::math::tgamma(a / 2 - k + 1) * boost::math::tgamma(a / 2 + k + 1);
  const Big g = (k % 2 ? -1 : 1) * num / den;
  return static_cast<double>(g);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
    sxx += std::log(x[i]) * std::log(x[i]);
    sxy += std::log(x[i]) * std::log(y[i]);
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST_CASE("second-order coefficients agree with the gamma-function closed form") {
  for (double alpha : {1.1, 1.2, 1.5, 1.8, 1.99}) {
    const auto g = riesz_coeffs_order2(alpha, 200);
    for (int k = 0; k < 200; ++k) {
      const double ref = gamma_coeff(alpha, k);
      CHECK(std::abs(g[k] - ref) <= 1e-13 * std::abs(ref) + 1e-300);
    }
  }
}

TEST_CASE("fourth-order coefficients follow the extrapolation of the closed form") {
  const double alpha = 1.5;
  const auto g = riesz_coeffs_order4(alpha, 40);
  for (int k = 0; k < 40; ++k) {
    double ref = 4.0 / 3.0 * gamma_coeff(alpha, k);
    if (k % 2 == 0) ref -= gamma_coeff(alpha, k / 2) / (3.0 * std::pow(2.0, alpha));
    CHECK(g[k] == doctest::Approx(ref).epsilon(1e-13));
  }
}

TEST_CASE("alpha = 2 reduces to the classical stencils") {
  const auto g2 = riesz_coeffs_order2(2.0, 6);
  const std::vector<double> ref2{2, -1, 0, 0, 0, 0};
  for (int k = 0; k < 6; ++k) CHECK(g2[k] == ref2[k]);
  const auto g4 = riesz_coeffs_order4(2.0, 6);
  const std::vector<double> ref4{2.5, -4.0 / 3.0, 1.0 / 12.0, 0, 0, 0};
  for (int k = 0; k < 6; ++k) CHECK(g4[k] == doctest::Approx(ref4[k]).epsilon(1e-15));
}

TEST_CASE("coefficient signs and the vanishing symbol at zero frequency") {
  const auto g = riesz_coeffs_order2(1.5, 20000);
  CHECK(g[0] > 0);
  double sum = g[0];
  for (std::size_t k = 1; k < g.size(); ++k) {
    CHECK(g[k] < 0);
    sum += 2 * g[k];
  }
  // g_0 + 2 sum_{k>=1} g_k = 0, tail decays like k^{-1-alpha}
  CHECK(std::abs(sum) < 1e-4);
}

TEST_CASE("invalid orders are rejected") {
  CHECK_THROWS_AS(riesz_coeffs_order2(1.0, 5), DomainError);
  CHECK_THROWS_AS(riesz_coeffs_order2(2.1, 5), DomainError);
  CHECK_THROWS_AS(riesz_coeffs_order4(0.5, 5), DomainError);
  CHECK_THROWS_AS(FracOperator(1.5, 3, 5, 0.1), DomainError);
  CHECK_THROWS(riesz_coeffs_order2(1.5, 0));
}

TEST_CASE("operator is a scaled symmetric Toeplitz matrix") {
  const double h = 0.05;
  const FracOperator op(1.3, 2, 12, h);
  const Eigen::MatrixXd d = op.dense();
  CHECK((d - d.transpose()).norm() == 0.0);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      CHECK(d(i, j) == doctest::Approx(-op.coeffs()[std::abs(i - j)] / std::pow(h, 1.3)));
    }
  }
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(12, -1, 2);
  CHECK((op.apply(v) - d * v).norm() <= 1e-12 * (d * v).norm());
}

TEST_CASE("eigendecomposition reconstructs D with negative spectrum") {
  for (double alpha : {1.1, 1.3, 1.5, 1.7, 1.9}) {
    for (int order : {2, 4}) {
      const FracOperator op(alpha, order, 50, 2.0 / 51);
      const SpectralFactor f = eigendecompose(op);
      CHECK(f.lambda.maxCoeff() < 0);
      const Eigen::MatrixXd d = op.dense();
      const Eigen::MatrixXd rec = f.Q * f.lambda.asDiagonal() * f.Q.transpose();
      CHECK((rec - d).norm() <= 1e-12 * d.norm());
      CHECK((f.Q.transpose() * f.Q - Eigen::MatrixXd::Identity(50, 50)).norm() < 1e-12);
    }
  }
}

TEST_CASE("bump polynomial and its mirrored expansion") {
  const auto p = BoundaryVanishingPoly::bump(-1, 1, 4);
  for (double x : {-0.9, -0.3, 0.0, 0.4, 0.99}) {
    CHECK(p(x) == doctest::Approx(std::pow(1 - x * x, 4)).epsilon(1e-13));
  }
  const auto q = BoundaryVanishingPoly::bump(-10, 10, 4);
  CHECK(q(0.0) == doctest::Approx(1.0));
  CHECK_THROWS(BoundaryVanishingPoly(0, 1, {1.0, 0.0, 1.0}));
}

TEST_CASE("analytic Riesz derivative tends to the second derivative as alpha -> 2") {
  const auto p = BoundaryVanishingPoly::bump(-1, 1, 4);
  for (double x : {-0.5, 0.0, 0.3}) {
    // d^2/dx^2 (1-x^2)^4 = -8(1-x^2)^3 + 48 x^2 (1-x^2)^2
    const double d2 = -8 * std::pow(1 - x * x, 3) + 48 * x * x * std::pow(1 - x * x, 2);
    CHECK(riesz_exact_poly(p, 1.9999, x) == doctest::Approx(d2).epsilon(1e-3));
  }
}

TEST_CASE("finite differences converge to the analytic Riesz derivative at the midpoint") {
  const auto p = BoundaryVanishingPoly::bump(-1, 1, 4);
  for (double alpha : {1.2, 1.5, 1.8}) {
    for (int order : {2, 4}) {
      std::vector<double> hs, errs;
      for (std::size_t n : {64, 128, 256, 512, 1024}) {
        const double h = 2.0 / static_cast<double>(n + 1);
        Eigen::VectorXd u(n);
        for (std::size_t j = 0; j < n; ++j) u[j] = p(-1 + static_cast<double>(j + 1) * h);
        const FracOperator op(alpha, order, n, h);
        const std::size_t mid = n / 2;
        const double x = -1 + static_cast<double>(mid + 1) * h;
        hs.push_back(h);
        errs.push_back(std::abs(op.apply(u)[static_cast<Eigen::Index>(mid)] - riesz_exact_poly(p, alpha, x)));
      }
      const double slope = fit_slope(hs, errs);
      CAPTURE(alpha);
      CAPTURE(order);
      CHECK(std::abs(slope - order) <= 0.2);
    }
  }
}
