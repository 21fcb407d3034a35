#pragma once

// The Kronecker-sum operator K = A_d (+) ... (+) A_1, A_mu = (nu + i eta) D_mu,
// and its spectral matrix-function machinery: actions of K, of f(theta K)
// through the eigen-tensor, and of exp(theta K) through small exponentials.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "fcgle/fracfd.hpp"
#include "fcgle/tensor.hpp"

namespace fcgle {

/// phi_0(z) = e^z, phi_l(z) = (phi_{l-1}(z) - 1/(l-1)!)/z, phi_l(0) = 1/l!.
/// Taylor series for |z| <= 1, recurrence seeded by exp otherwise.
std::complex<double> phi_scalar(int ell, std::complex<double> z);

class KronSumOperator {
 public:
  KronSumOperator(std::vector<FracOperator> directions, std::complex<double> coeff);

  std::size_t order() const { return directions_.size(); }
  Dims dims() const;
  const std::vector<FracOperator>& directions() const { return directions_; }
  const FracOperator& direction(std::size_t mode) const { return directions_[mode]; }
  /// nu + i eta
  std::complex<double> coeff() const { return coeff_; }

 private:
  std::vector<FracOperator> directions_;
  std::complex<double> coeff_;
};

/// K*U = sum_mu U x_mu A_mu, never assembling K.
template <typename Real>
CTensor<Real> apply_K(const KronSumOperator& op, const CTensor<Real>& u);

/// exp(theta A_mu) = Q diag(exp(theta (nu + i eta) lambda)) Q^T.
ComplexMatrix<double> expm_small(const SpectralFactor& factor, std::complex<double> coeff,
                                 double theta);

enum class FilterKind { resolvent, phi };

/// Cache key. resolvent: f(z) = 1/(1-z); phi: f = phi_ell (exp for ell = 0).
/// theta is compared bitwise.
struct FilterKey {
  FilterKind kind;
  int ell;
  double theta;

  friend bool operator<(const FilterKey& a, const FilterKey& b);
};

template <typename Real>
class SpectralCache {
 public:
  explicit SpectralCache(KronSumOperator op);

  const KronSumOperator& op() const { return op_; }
  const std::vector<SpectralFactor>& factors() const { return factors_; }
  Dims dims() const { return op_.dims(); }

  /// (nu + i eta)(lambda_{j_1} + ... + lambda_{j_d}), always double precision.
  const CTensor<double>& eigen_tensor() const { return eigen_; }

  /// f(theta * eigen_tensor), evaluated in double and rounded to Real.
  CTensor<Real> build_filter(const std::function<std::complex<double>(std::complex<double>)>& f,
                             double theta) const;

  /// Cached filters; a repeated key returns the same tensor.
  const CTensor<Real>& filter(const FilterKey& key);
  const CTensor<Real>& resolvent(double theta) { return filter({FilterKind::resolvent, 0, theta}); }
  const CTensor<Real>& phi(int ell, double theta) { return filter({FilterKind::phi, ell, theta}); }

  /// K*U by real mode products with D_mu, then one complex scaling.
  void apply_K_into(const CTensor<Real>& u, CTensor<Real>& out);
  CTensor<Real> apply_K(const CTensor<Real>& u);

  /// Tucker with Q_mu^T (forward) and Q_mu (backward).
  void to_eigenbasis(const CTensor<Real>& v, CTensor<Real>& out);
  void from_eigenbasis(const CTensor<Real>& v, CTensor<Real>& out);

  /// Q (F o (Q^T V)) = f(theta K) V.
  void apply_filter_into(const CTensor<Real>& f, const CTensor<Real>& v, CTensor<Real>& out);
  CTensor<Real> apply_filter(const CTensor<Real>& f, const CTensor<Real>& v);

  /// E_mu = exp(theta A_mu), cached per theta.
  const std::vector<ComplexMatrix<Real>>& exp_factors(double theta);
  void apply_exp_into(double theta, const CTensor<Real>& v, CTensor<Real>& out);
  CTensor<Real> apply_exp(double theta, const CTensor<Real>& v);

 private:
  KronSumOperator op_;
  std::vector<SpectralFactor> factors_;
  std::vector<RealMatrix<Real>> q_;
  std::vector<RealMatrix<Real>> qt_;
  std::vector<RealMatrix<Real>> d_;
  CTensor<double> eigen_;
  std::map<FilterKey, CTensor<Real>> filters_;
  std::map<std::uint64_t, std::vector<ComplexMatrix<Real>>> exps_;
  CTensor<Real> work_;
  CTensor<Real> work2_;
};

/// Free-function forms.
template <typename Real>
CTensor<Real> build_filter(const SpectralCache<Real>& cache,
                           const std::function<std::complex<double>(std::complex<double>)>& f,
                           double theta) {
  return cache.build_filter(f, theta);
}

template <typename Real>
CTensor<Real> apply_filter(SpectralCache<Real>& cache, const CTensor<Real>& f,
                           const CTensor<Real>& v) {
  return cache.apply_filter(f, v);
}

template <typename Real>
CTensor<Real> apply_exp(SpectralCache<Real>& cache, double theta, const CTensor<Real>& v) {
  return cache.apply_exp(theta, v);
}

}  // namespace fcgle
