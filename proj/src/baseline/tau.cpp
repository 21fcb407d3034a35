#include <fftw3.h>

#include <cmath>
#include <numbers>

#include "fcgle/baseline.hpp"
#include "fcgle/errors.hpp"

namespace fcgle {

Eigen::VectorXd tau_eigenvalues(const FracOperator& d) {
  const std::size_t n = d.size();
  const auto& g = d.coeffs();
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(n));
  const double w = std::numbers::pi / static_cast<double>(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    double s = g[0];
    for (std::size_t m = 1; m < n; ++m) s += 2.0 * g[m] * std::cos(w * static_cast<double>(k * m));
    lambda[static_cast<Eigen::Index>(k - 1)] = d.scale() * s;
  }
  return lambda;
}

Eigen::MatrixXd tau_matrix(const FracOperator& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  const Eigen::VectorXd t = d.first_column();
  auto at = [&](Eigen::Index m) { return (m >= 1 && m < n) ? t[m] : 0.0; };
  Eigen::MatrixXd out = d.dense();
  for (Eigen::Index j = 1; j <= n; ++j) {
    for (Eigen::Index k = 1; k <= n; ++k) {
      out(j - 1, k - 1) -= at(j + k) + at(2 * (n + 1) - (j + k));
    }
  }
  return out;
}

Eigen::MatrixXd dst1_matrix(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  const double c = std::sqrt(2.0 / static_cast<double>(n + 1));
  const double w = std::numbers::pi / static_cast<double>(n + 1);
  Eigen::MatrixXd s(m, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index k = 0; k < m; ++k) {
      s(j, k) = c * std::sin(w * static_cast<double>((j + 1) * (k + 1)));
    }
  }
  return s;
}

struct TauPreconditioner::Dst {
  std::vector<double> buf;  // interleaved re/im
  fftw_plan plan = nullptr;

  explicit Dst(const Dims& dims) : buf(2 * element_count(dims)) {
    std::vector<int> n(dims.rbegin(), dims.rend());
    std::vector<fftw_r2r_kind> kind(n.size(), FFTW_RODFT00);
    // Real and imaginary parts are two interleaved transforms of stride 2.
    plan = fftw_plan_many_r2r(static_cast<int>(n.size()), n.data(), 2, buf.data(), nullptr, 2, 1,
                              buf.data(), nullptr, 2, 1, kind.data(), FFTW_ESTIMATE);
    if (!plan) throw NumericalError("tau preconditioner: DST plan creation failed");
  }
  ~Dst() { fftw_destroy_plan(plan); }
};

TauPreconditioner::TauPreconditioner(const std::vector<FracOperator>& directions,
                                     std::complex<double> coeff, double theta) {
  if (directions.empty()) throw DimensionError("tau preconditioner: need at least one direction");
  std::vector<Eigen::VectorXd> lambdas;
  double norm = 1.0;
  for (const auto& op : directions) {
    dims_.push_back(op.size());
    lambdas.push_back(tau_eigenvalues(op));
    // RODFT00 applied twice multiplies by 2(n+1) per direction.
    norm *= 2.0 * static_cast<double>(op.size() + 1);
  }
  const std::size_t total = element_count(dims_);
  inv_.resize(total);
  const std::size_t d = dims_.size();
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t j = 0; j < total; ++j) {
    double s = 0.0;
    for (std::size_t mu = 0; mu < d; ++mu) s += lambdas[mu][static_cast<Eigen::Index>(idx[mu])];
    const std::complex<double> ev = 1.0 - theta * coeff * s;
    if (std::abs(ev) == 0.0) throw NumericalError("tau preconditioner: singular eigenvalue");
    inv_[j] = 1.0 / (ev * norm);
    for (std::size_t mu = 0; mu < d; ++mu) {
      if (++idx[mu] < dims_[mu]) break;
      idx[mu] = 0;
    }
  }
  dst_ = std::make_unique<Dst>(dims_);
}

TauPreconditioner::~TauPreconditioner() = default;

void TauPreconditioner::apply(const CVector& r, CVector& z) const {
  if (static_cast<std::size_t>(r.size()) != inv_.size()) {
    throw DimensionError("tau preconditioner: vector length does not match");
  }
  auto* c = reinterpret_cast<std::complex<double>*>(dst_->buf.data());
  std::copy_n(r.data(), r.size(), c);
  fftw_execute(dst_->plan);
  for (std::size_t j = 0; j < inv_.size(); ++j) c[j] *= inv_[j];
  fftw_execute(dst_->plan);
  z.resize(r.size());
  std::copy_n(c, r.size(), z.data());
}

CVector TauPreconditioner::apply(const CVector& r) const {
  CVector z;
  apply(r, z);
  return z;
}

}  // namespace fcgle
