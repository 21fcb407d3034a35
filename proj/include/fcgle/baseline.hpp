#pragma once

// Vector-oriented comparator engines: FFT-based multilevel Toeplitz matvecs,
// the tau preconditioner, PGMRES/PCG, shift-and-invert Lanczos for phi-function
// actions, and the lbdf2-v / strang-v / krogstad-v steppers built on them.

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fcgle/fracfd.hpp"
#include "fcgle/integrators.hpp"
#include "fcgle/kronspec.hpp"
#include "fcgle/problem.hpp"

namespace fcgle {

using CVector = Eigen::VectorXcd;

/// x -> (I - theta c (D_d (+) ... (+) D_1)) x with every level embedded in a
/// circulant of size next_pow2(2 n_mu) and applied through one d-dimensional FFT
/// pair. Not safe for concurrent use (internal FFT buffer).
class BttbOperator {
 public:
  BttbOperator(const std::vector<FracOperator>& directions, std::complex<double> coeff,
               double theta);
  BttbOperator(const KronSumOperator& op, double theta)
      : BttbOperator(op.directions(), op.coeff(), theta) {}
  ~BttbOperator();
  BttbOperator(const BttbOperator&) = delete;
  BttbOperator& operator=(const BttbOperator&) = delete;

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return size_; }
  double theta() const { return theta_; }
  const Dims& embedding() const { return embed_; }

  /// (I - theta K) x
  void apply(const CVector& x, CVector& y) const;
  CVector apply(const CVector& x) const;
  /// K x
  void apply_K(const CVector& x, CVector& y) const;

 private:
  void convolve(const CVector& x, CVector& y, const std::vector<std::complex<double>>& spec) const;

  Dims dims_;
  Dims embed_;
  std::size_t size_ = 0;
  double theta_;
  std::vector<std::complex<double>> k_spec_;   // spectrum of K, scaled by 1/L
  std::vector<std::complex<double>> op_spec_;  // spectrum of I - theta K, scaled by 1/L
  struct Fft;
  std::unique_ptr<Fft> fft_;
};

/// Eigenvalues of tau(D) = D - H under DST-I, including the -1/h^alpha scale:
/// lambda_k = s (g_0 + 2 sum_m g_m cos(k m pi / (n+1))), k = 1..n.
Eigen::VectorXd tau_eigenvalues(const FracOperator& d);

/// Dense tau(D) = D - H, H_jk = t_{j+k} + t_{2(n+1)-(j+k)} (one-based j,k,
/// t_m = 0 outside 1..n-1).
Eigen::MatrixXd tau_matrix(const FracOperator& d);

/// Orthogonal, involutory DST-I matrix sqrt(2/(n+1)) sin(j k pi/(n+1)).
Eigen::MatrixXd dst1_matrix(std::size_t n);

/// Solves (I - theta c (tau(D_d) (+) ... (+) tau(D_1))) z = r by DST-I in every
/// direction and a pointwise division. Not safe for concurrent use.
class TauPreconditioner {
 public:
  TauPreconditioner(const std::vector<FracOperator>& directions, std::complex<double> coeff,
                    double theta);
  TauPreconditioner(const KronSumOperator& op, double theta)
      : TauPreconditioner(op.directions(), op.coeff(), theta) {}
  ~TauPreconditioner();
  TauPreconditioner(const TauPreconditioner&) = delete;
  TauPreconditioner& operator=(const TauPreconditioner&) = delete;

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return inv_.size(); }
  void apply(const CVector& r, CVector& z) const;
  CVector apply(const CVector& r) const;

 private:
  Dims dims_;
  std::vector<std::complex<double>> inv_;  // 1 / eigenvalue, with DST scaling folded in
  struct Dst;
  std::unique_ptr<Dst> dst_;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // relative residual used by the stopping test
};

/// Left-preconditioned full GMRES (no restarts). Stops once
/// |M^{-1}(b - A x)| <= tol |M^{-1} b|. `x` holds the initial guess on entry.
/// A null preconditioner means M = I.
SolveReport pgmres_solve(const BttbOperator& a, const TauPreconditioner* m, const CVector& b,
                         CVector& x, double tol, int maxit);

/// Preconditioned CG for a real SPD operator and complex data (the real and
/// imaginary parts run as one real system of twice the size). Stops once
/// |b - A x| <= tol |b|. `x` holds the initial guess on entry.
SolveReport pcg_solve(const BttbOperator& a, const TauPreconditioner* m, const CVector& b,
                      CVector& x, double tol, int maxit);

struct KrylovConfig {
  int m = 10;
  double xi = 0.0;
  double tol = 1e-6;
  int maxit = 20;
};

/// Shift-and-invert Lanczos on Z = (I - xi (D_d (+) ... (+) D_1))^{-1}. One
/// basis serves every phi_ell and theta for the same starting vector.
class ShiftInvertLanczos {
 public:
  ShiftInvertLanczos(const std::vector<FracOperator>& directions, const KrylovConfig& config);

  struct Basis {
    Eigen::MatrixXcd v;     // N x m, orthonormal columns
    Eigen::MatrixXd w;      // eigenvectors of T_m
    Eigen::VectorXd mu;     // eigenvalues of T_m
    double norm = 0.0;      // |v|_2
    std::vector<int> inner; // PCG iterations per inner solve
    std::size_t nonconverged = 0;
    int dim() const { return static_cast<int>(mu.size()); }
  };

  const KrylovConfig& config() const { return config_; }

  /// Happy breakdown truncates the basis. `m` <= 0 uses the configured size.
  Basis build(const CVector& v, int m = 0) const;

  /// |v| V_m phi_ell((theta/xi) c (I - T_m^{-1})) e_1
  CVector apply(const Basis& basis, int ell, double theta, std::complex<double> c) const;

 private:
  KrylovConfig config_;
  std::unique_ptr<BttbOperator> a_;
  std::unique_ptr<TauPreconditioner> p_;
};

/// One-shot phi_ell(theta K) v.
CVector si_lanczos_phi(int ell, double theta, const CVector& v, const KronSumOperator& op,
                       const KrylovConfig& config);

/// Vector-engine steppers; double precision only.
std::unique_ptr<Stepper<double>> make_vector_stepper(const GridProblem& problem, Scheme scheme,
                                                     const SolverSettings& settings);

RunResult<double> lbdf2_v_run(const GridProblem& problem, const RunConfig& config);
RunResult<double> strang_v_run(const GridProblem& problem, const RunConfig& config);
RunResult<double> krogstad_v_run(const GridProblem& problem, const RunConfig& config);

}  // namespace fcgle
