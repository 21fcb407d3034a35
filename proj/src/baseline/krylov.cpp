#include <cmath>

#include "fcgle/baseline.hpp"
#include "fcgle/errors.hpp"

namespace fcgle {

namespace {

void precondition(const TauPreconditioner* m, const CVector& r, CVector& z) {
  if (m) {
    m->apply(r, z);
  } else {
    z = r;
  }
}

// Real part of the Hermitian inner product, i.e. the Euclidean product of the
// stacked real and imaginary parts.
double real_dot(const CVector& a, const CVector& b) { return a.dot(b).real(); }

}  // namespace

SolveReport pgmres_solve(const BttbOperator& a, const TauPreconditioner* m, const CVector& b,
                         CVector& x, double tol, int maxit) {
  if (!(tol > 0.0)) throw DomainError("pgmres: tol must be positive");
  const auto n = static_cast<Eigen::Index>(a.size());
  if (b.size() != n) throw DimensionError("pgmres: right-hand side length mismatch");
  if (x.size() != n) x = CVector::Zero(n);

  SolveReport rep;
  CVector w, tmp;
  precondition(m, b, w);
  const double bnorm = w.norm();
  if (bnorm == 0.0) {
    x.setZero();
    rep.converged = true;
    return rep;
  }
  a.apply(x, tmp);
  tmp = b - tmp;
  CVector r;
  precondition(m, tmp, r);
  double beta = r.norm();
  rep.residual = beta / bnorm;
  if (beta <= tol * bnorm) {
    rep.converged = true;
    return rep;
  }

  const int kmax = std::max(maxit, 0);
  Eigen::MatrixXcd v(n, kmax + 1);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(kmax + 1, kmax);
  std::vector<double> cs(kmax);
  std::vector<std::complex<double>> sn(kmax);
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(kmax + 1);
  g[0] = beta;
  v.col(0) = r / beta;

  int k = 0;
  for (; k < kmax; ++k) {
    a.apply(v.col(k), tmp);
    precondition(m, tmp, w);
    for (int i = 0; i <= k; ++i) {
      h(i, k) = v.col(i).dot(w);
      w -= h(i, k) * v.col(i);
    }
    const double hnext = w.norm();
    for (int i = 0; i < k; ++i) {
      const std::complex<double> t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
      h(i + 1, k) = -std::conj(sn[i]) * h(i, k) + cs[i] * h(i + 1, k);
      h(i, k) = t;
    }
    const std::complex<double> hk = h(k, k);
    const double den = std::hypot(std::abs(hk), hnext);
    if (std::abs(hk) == 0.0) {
      cs[k] = 0.0;
      sn[k] = 1.0;
    } else {
      cs[k] = std::abs(hk) / den;
      sn[k] = (hk / std::abs(hk)) * hnext / den;
    }
    h(k, k) = cs[k] * hk + sn[k] * hnext;
    g[k + 1] = -std::conj(sn[k]) * g[k];
    g[k] = cs[k] * g[k];
    rep.residual = std::abs(g[k + 1]) / bnorm;
    const bool lucky = hnext <= 1e-14 * den;
    if (!lucky) v.col(k + 1) = w / hnext;
    if (rep.residual <= tol || lucky) {
      ++k;
      break;
    }
  }
  rep.iterations = k;
  rep.converged = rep.residual <= tol;
  if (k > 0) {
    const Eigen::VectorXcd y =
        h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    x += v.leftCols(k) * y;
  }
  return rep;
}

SolveReport pcg_solve(const BttbOperator& a, const TauPreconditioner* m, const CVector& b,
                      CVector& x, double tol, int maxit) {
  if (!(tol > 0.0)) throw DomainError("pcg: tol must be positive");
  const auto n = static_cast<Eigen::Index>(a.size());
  if (b.size() != n) throw DimensionError("pcg: right-hand side length mismatch");
  if (x.size() != n) x = CVector::Zero(n);

  SolveReport rep;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    rep.converged = true;
    return rep;
  }
  CVector r, z, q;
  a.apply(x, q);
  r = b - q;
  rep.residual = r.norm() / bnorm;
  if (rep.residual <= tol) {
    rep.converged = true;
    return rep;
  }
  precondition(m, r, z);
  CVector p = z;
  double rz = real_dot(r, z);
  for (int k = 1; k <= maxit; ++k) {
    a.apply(p, q);
    const double alpha = rz / real_dot(p, q);
    x += alpha * p;
    r -= alpha * q;
    rep.iterations = k;
    rep.residual = r.norm() / bnorm;
    if (rep.residual <= tol) break;
    precondition(m, r, z);
    const double rz_new = real_dot(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  rep.converged = rep.residual <= tol;
  return rep;
}

ShiftInvertLanczos::ShiftInvertLanczos(const std::vector<FracOperator>& directions,
                                       const KrylovConfig& config)
    : config_(config) {
  if (config.m < 1) throw DomainError("lanczos: subspace size must be at least 1");
  if (!(config.xi > 0.0)) throw DomainError("lanczos: xi must be positive");
  a_ = std::make_unique<BttbOperator>(directions, 1.0, config.xi);
  p_ = std::make_unique<TauPreconditioner>(directions, 1.0, config.xi);
}

ShiftInvertLanczos::Basis ShiftInvertLanczos::build(const CVector& v, int m) const {
  if (m <= 0) m = config_.m;
  const auto n = static_cast<Eigen::Index>(a_->size());
  if (v.size() != n) throw DimensionError("lanczos: vector length mismatch");
  m = static_cast<int>(std::min<Eigen::Index>(m, n));

  Basis basis;
  basis.norm = v.norm();
  if (basis.norm == 0.0) return basis;

  Eigen::MatrixXcd vm(n, m);
  std::vector<double> alpha, beta;
  vm.col(0) = v / basis.norm;
  CVector w;
  int dim = 0;
  for (int j = 0; j < m; ++j) {
    w = CVector::Zero(n);
    const SolveReport rep = pcg_solve(*a_, p_.get(), vm.col(j), w, config_.tol, config_.maxit);
    basis.inner.push_back(rep.iterations);
    if (!rep.converged) ++basis.nonconverged;
    const double aj = real_dot(vm.col(j), w);
    alpha.push_back(aj);
    dim = j + 1;
    if (j + 1 == m) break;
    w -= aj * vm.col(j);
    if (j > 0) w -= beta[j - 1] * vm.col(j - 1);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) w -= vm.col(i).dot(w) * vm.col(i);
    }
    const double bj = w.norm();
    if (bj <= 1e-12 * std::abs(aj)) break;  // invariant subspace found
    beta.push_back(bj);
    vm.col(j + 1) = w / bj;
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < dim) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  if (es.info() != Eigen::Success) throw NumericalError("lanczos: tridiagonal eigensolver failed");
  basis.v = vm.leftCols(dim);
  basis.w = es.eigenvectors();
  basis.mu = es.eigenvalues();
  return basis;
}

CVector ShiftInvertLanczos::apply(const Basis& basis, int ell, double theta,
                                  std::complex<double> c) const {
  const auto n = static_cast<Eigen::Index>(a_->size());
  if (basis.dim() == 0) return CVector::Zero(n);
  const std::complex<double> scale = theta / config_.xi * c;
  Eigen::VectorXcd f(basis.dim());
  for (int k = 0; k < basis.dim(); ++k) {
    f[k] = phi_scalar(ell, scale * (1.0 - 1.0 / basis.mu[k])) * basis.w(0, k);
  }
  const Eigen::VectorXcd y = basis.w.cast<std::complex<double>>() * f;
  return basis.norm * (basis.v * y);
}

CVector si_lanczos_phi(int ell, double theta, const CVector& v, const KronSumOperator& op,
                       const KrylovConfig& config) {
  ShiftInvertLanczos lanczos(op.directions(), config);
  return lanczos.apply(lanczos.build(v), ell, theta, op.coeff());
}

}  // namespace fcgle
