#pragma once

// Dense reference implementations used by the unit and acceptance tests.
// Everything here works on explicitly assembled matrices, so it shares no
// code path with the tensor kernels it checks.

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "fcgle/kronspec.hpp"
#include "fcgle/tensor.hpp"

namespace oracle {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline fcgle::CTensor<double> random_tensor(const fcgle::Dims& dims) {
  std::normal_distribution<double> nd;
  fcgle::CTensor<double> t(dims);
  for (auto& z : t.values()) z = {nd(rng()), nd(rng())};
  return t;
}

inline MatrixXd random_matrix(Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng());
  return m;
}

inline MatrixXcd random_cmatrix(Eigen::Index r, Eigen::Index c) {
  return random_matrix(r, c).cast<std::complex<double>>() +
         std::complex<double>(0, 1) * random_matrix(r, c).cast<std::complex<double>>();
}

template <typename Real>
VectorXcd as_vector(const fcgle::CTensor<Real>& t) {
  VectorXcd v(static_cast<Eigen::Index>(t.size()));
  for (std::size_t j = 0; j < t.size(); ++j) v[static_cast<Eigen::Index>(j)] = t[j];
  return v;
}

inline fcgle::CTensor<double> as_tensor(const VectorXcd& v, const fcgle::Dims& dims) {
  fcgle::CTensor<double> t(dims);
  for (std::size_t j = 0; j < t.size(); ++j) t[j] = v[static_cast<Eigen::Index>(j)];
  return t;
}

/// M_d kron ... kron M_1 (first index fastest).
template <typename Matrix>
MatrixXcd kron_chain(const std::vector<Matrix>& mats) {
  MatrixXcd out = mats[0].template cast<std::complex<double>>();
  for (std::size_t mu = 1; mu < mats.size(); ++mu) {
    const MatrixXcd next = mats[mu].template cast<std::complex<double>>();
    MatrixXcd k = Eigen::kroneckerProduct(next, out);
    out = k;
  }
  return out;
}

/// sum_mu I kron ... kron D_mu kron ... kron I, scaled by c.
inline MatrixXcd kron_sum(const std::vector<MatrixXd>& d, std::complex<double> c) {
  Eigen::Index total = 1;
  for (const auto& m : d) total *= m.rows();
  MatrixXcd k = MatrixXcd::Zero(total, total);
  for (std::size_t mu = 0; mu < d.size(); ++mu) {
    std::vector<MatrixXd> mats;
    for (std::size_t nu = 0; nu < d.size(); ++nu) {
      mats.push_back(nu == mu ? d[nu] : MatrixXd::Identity(d[nu].rows(), d[nu].cols()));
    }
    k += kron_chain(mats);
  }
  return c * k;
}

inline MatrixXcd assemble_K(const fcgle::KronSumOperator& op) {
  std::vector<MatrixXd> d;
  for (const auto& dir : op.directions()) d.push_back(dir.dense());
  return kron_sum(d, op.coeff());
}

/// phi_ell(A) v from the exponential of the augmented block matrix
/// [[A, v e_1^T], [0, J]] with J the ell x ell upper shift.
inline VectorXcd phi_action(const MatrixXcd& a, int ell, const VectorXcd& v) {
  if (ell == 0) return a.exp() * v;
  const Eigen::Index n = a.rows();
  MatrixXcd big = MatrixXcd::Zero(n + ell, n + ell);
  big.topLeftCorner(n, n) = a;
  big.block(0, n, n, 1) = v;
  for (int i = 0; i + 1 < ell; ++i) big(n + i, n + i + 1) = 1.0;
  const MatrixXcd e = big.exp();
  return e.block(0, n + ell - 1, n, 1);
}

inline double rel_err(const VectorXcd& a, const VectorXcd& b) { return (a - b).norm() / b.norm(); }

}  // namespace oracle
