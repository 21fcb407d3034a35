#include "fcgle/kronspec.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "fcgle/errors.hpp"

namespace fcgle {

std::complex<double> phi_scalar(int ell, std::complex<double> z) {
  if (ell < 0) throw DomainError("phi_scalar: ell must be non-negative");
  if (ell == 0) return std::exp(z);
  if (std::abs(z) <= 1.0) {
    // phi_l(z) = (1/l!) (1 + z/(l+1) (1 + z/(l+2) (1 + ...)))
    constexpr int kTerms = 30;
    std::complex<double> s(1.0, 0.0);
    for (int k = kTerms; k >= 1; --k) s = 1.0 + s * z / static_cast<double>(ell + k);
    double fact = 1.0;
    for (int k = 2; k <= ell; ++k) fact *= k;
    return s / fact;
  }
  std::complex<double> p = std::exp(z);
  double fact = 1.0;  // (l-1)!
  for (int k = 1; k <= ell; ++k) {
    if (k > 1) fact *= (k - 1);
    p = (p - 1.0 / fact) / z;
  }
  return p;
}

KronSumOperator::KronSumOperator(std::vector<FracOperator> directions,
                                 std::complex<double> coeff)
    : directions_(std::move(directions)), coeff_(coeff) {
  if (directions_.empty()) throw DimensionError("KronSumOperator: need at least one direction");
  if (!(coeff.real() > 0.0)) throw DomainError("KronSumOperator: nu must be positive");
}

Dims KronSumOperator::dims() const {
  Dims d;
  d.reserve(directions_.size());
  for (const auto& op : directions_) d.push_back(op.size());
  return d;
}

template <typename Real>
CTensor<Real> apply_K(const KronSumOperator& op, const CTensor<Real>& u) {
  if (u.dims() != op.dims()) throw DimensionError("apply_K: tensor dims do not match operator");
  CTensor<Real> acc(u.dims());
  CTensor<Real> tmp;
  for (std::size_t mu = 0; mu < op.order(); ++mu) {
    const RealMatrix<Real> d = op.direction(mu).dense().cast<Real>();
    mu_mode_product_into(u, d, mu, tmp);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += tmp[j];
  }
  const std::complex<Real> c(op.coeff());
  for (auto& z : acc.values()) z *= c;
  return acc;
}

ComplexMatrix<double> expm_small(const SpectralFactor& factor, std::complex<double> coeff,
                                 double theta) {
  const Eigen::VectorXcd e =
      (theta * coeff * factor.lambda.cast<std::complex<double>>()).array().exp().matrix();
  return factor.Q * e.asDiagonal() * factor.Q.transpose();
}

bool operator<(const FilterKey& a, const FilterKey& b) {
  const auto ta = std::bit_cast<std::uint64_t>(a.theta);
  const auto tb = std::bit_cast<std::uint64_t>(b.theta);
  return std::tie(a.kind, a.ell, ta) < std::tie(b.kind, b.ell, tb);
}

template <typename Real>
SpectralCache<Real>::SpectralCache(KronSumOperator op) : op_(std::move(op)) {
  const std::size_t d = op_.order();
  factors_.reserve(d);
  for (std::size_t mu = 0; mu < d; ++mu) {
    factors_.push_back(eigendecompose(op_.direction(mu)));
    q_.push_back(factors_.back().Q.template cast<Real>());
    qt_.push_back(factors_.back().Q.transpose().template cast<Real>());
    d_.push_back(op_.direction(mu).dense().template cast<Real>());
  }
  const Dims dims = op_.dims();
  eigen_ = CTensor<double>(dims);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t j = 0; j < eigen_.size(); ++j) {
    double s = 0.0;
    for (std::size_t mu = 0; mu < d; ++mu) s += factors_[mu].lambda[static_cast<Eigen::Index>(idx[mu])];
    eigen_[j] = op_.coeff() * s;
    for (std::size_t mu = 0; mu < d; ++mu) {
      if (++idx[mu] < dims[mu]) break;
      idx[mu] = 0;
    }
  }
}

template <typename Real>
CTensor<Real> SpectralCache<Real>::build_filter(
    const std::function<std::complex<double>(std::complex<double>)>& f, double theta) const {
  CTensor<Real> out(eigen_.dims());
  for (std::size_t j = 0; j < eigen_.size(); ++j) {
    const std::complex<double> v = f(theta * eigen_[j]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      std::ostringstream msg;
      msg << "filter evaluation failed at eigenvalue " << eigen_[j] << " (multi-index";
      for (std::size_t i : multi_index(j, eigen_.dims())) msg << ' ' << i;
      msg << ", theta " << theta << ")";
      throw NumericalError(msg.str());
    }
    out[j] = std::complex<Real>(v);
  }
  return out;
}

template <typename Real>
const CTensor<Real>& SpectralCache<Real>::filter(const FilterKey& key) {
  auto it = filters_.find(key);
  if (it != filters_.end()) return it->second;
  CTensor<Real> f;
  if (key.kind == FilterKind::resolvent) {
    f = build_filter([](std::complex<double> z) { return 1.0 / (1.0 - z); }, key.theta);
  } else {
    const int ell = key.ell;
    f = build_filter([ell](std::complex<double> z) { return phi_scalar(ell, z); }, key.theta);
  }
  return filters_.emplace(key, std::move(f)).first->second;
}

template <typename Real>
void SpectralCache<Real>::apply_K_into(const CTensor<Real>& u, CTensor<Real>& out) {
  if (u.dims() != op_.dims()) throw DimensionError("apply_K: tensor dims do not match operator");
  if (&out == &u) throw DimensionError("apply_K: output aliases input");
  mu_mode_product_into(u, d_[0], 0, out);
  for (std::size_t mu = 1; mu < op_.order(); ++mu) {
    mu_mode_product_into(u, d_[mu], mu, work_);
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] += work_[j];
  }
  const std::complex<Real> c(op_.coeff());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) out[j] *= c;
}

template <typename Real>
CTensor<Real> SpectralCache<Real>::apply_K(const CTensor<Real>& u) {
  CTensor<Real> out;
  apply_K_into(u, out);
  return out;
}

template <typename Real>
void SpectralCache<Real>::to_eigenbasis(const CTensor<Real>& v, CTensor<Real>& out) {
  if (v.dims() != op_.dims()) throw DimensionError("to_eigenbasis: dims mismatch");
  tucker_into(v, qt_, out, work_);
}

template <typename Real>
void SpectralCache<Real>::from_eigenbasis(const CTensor<Real>& v, CTensor<Real>& out) {
  if (v.dims() != op_.dims()) throw DimensionError("from_eigenbasis: dims mismatch");
  tucker_into(v, q_, out, work_);
}

template <typename Real>
void SpectralCache<Real>::apply_filter_into(const CTensor<Real>& f, const CTensor<Real>& v,
                                            CTensor<Real>& out) {
  if (f.dims() != op_.dims() || v.dims() != op_.dims()) {
    throw DimensionError("apply_filter: dims mismatch");
  }
  to_eigenbasis(v, work2_);
  const auto n = static_cast<std::ptrdiff_t>(work2_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) work2_[j] *= f[j];
  from_eigenbasis(work2_, out);
}

template <typename Real>
CTensor<Real> SpectralCache<Real>::apply_filter(const CTensor<Real>& f, const CTensor<Real>& v) {
  CTensor<Real> out;
  apply_filter_into(f, v, out);
  return out;
}

template <typename Real>
const std::vector<ComplexMatrix<Real>>& SpectralCache<Real>::exp_factors(double theta) {
  const auto key = std::bit_cast<std::uint64_t>(theta);
  auto it = exps_.find(key);
  if (it != exps_.end()) return it->second;
  std::vector<ComplexMatrix<Real>> e;
  e.reserve(factors_.size());
  for (const auto& fac : factors_) {
    e.push_back(expm_small(fac, op_.coeff(), theta).template cast<std::complex<Real>>());
  }
  return exps_.emplace(key, std::move(e)).first->second;
}

template <typename Real>
void SpectralCache<Real>::apply_exp_into(double theta, const CTensor<Real>& v,
                                         CTensor<Real>& out) {
  if (v.dims() != op_.dims()) throw DimensionError("apply_exp: dims mismatch");
  tucker_into(v, exp_factors(theta), out, work_);
}

template <typename Real>
CTensor<Real> SpectralCache<Real>::apply_exp(double theta, const CTensor<Real>& v) {
  CTensor<Real> out;
  apply_exp_into(theta, v, out);
  return out;
}

template class SpectralCache<float>;
template class SpectralCache<double>;
template CTensor<float> apply_K(const KronSumOperator&, const CTensor<float>&);
template CTensor<double> apply_K(const KronSumOperator&, const CTensor<double>&);

}  // namespace fcgle
