#pragma once

// FCGLE model: parameters, grid, nonlinearity, the exact flow of the
// nonlinear subproblem, manufactured sources and the discrete L2 norm.

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fcgle/fracfd.hpp"
#include "fcgle/kronspec.hpp"
#include "fcgle/tensor.hpp"

namespace fcgle {

struct Interval {
  double a;
  double b;
};

/// u_t = (nu + i eta) sum_mu d^alpha_mu u + gamma u - (kappa + i zeta)|u|^2 u + s
struct FcgleParams {
  double nu = 1.0;
  double eta = 0.0;
  double gamma = 0.0;
  double kappa = 1.0;
  double zeta = 0.0;
  std::vector<double> alphas;
  std::vector<Interval> domain;
  double final_time = 1.0;

  std::complex<double> diffusion() const { return {nu, eta}; }
  std::complex<double> cubic() const { return {kappa, zeta}; }

  /// nu > 0, kappa > 0, 1 < alpha < 2 (alpha = 2 only when allowed).
  void validate(bool allow_integer_order = false) const;
};

enum class SourceMode { none, analytic_manufactured, discrete_manufactured, custom };

std::string to_string(SourceMode mode);
SourceMode source_mode_from_string(const std::string& name);

/// u(t, x) = a(t) prod_mu p_mu(x_mu)
struct SeparableSolution {
  std::function<std::complex<double>(double)> time_factor;
  std::function<std::complex<double>(double)> time_derivative;
  std::vector<BoundaryVanishingPoly> factors;
};

/// Writes s(t) on the grid into the given tensor.
using CustomSource = std::function<void(double t, CTensor<double>& out)>;

class GridProblem {
 public:
  /// `exact` is required for the manufactured modes, `custom` for the custom mode.
  GridProblem(std::string name, FcgleParams params, std::vector<std::size_t> n, int fd_order,
              CTensor<double> initial, SourceMode mode,
              std::optional<SeparableSolution> exact = std::nullopt,
              CustomSource custom = nullptr);

  const std::string& name() const { return name_; }
  const FcgleParams& params() const { return params_; }
  std::size_t order() const { return n_.size(); }
  const Dims& dims() const { return n_; }
  const std::vector<double>& steps() const { return h_; }
  const std::vector<std::vector<double>>& nodes() const { return nodes_; }
  int fd_order() const { return fd_order_; }
  SourceMode source_mode() const { return mode_; }
  const KronSumOperator& op() const { return op_; }
  const CTensor<double>& initial() const { return initial_; }

  bool has_exact() const { return exact_.has_value(); }
  /// Grid samples of the exact solution at time t.
  CTensor<double> exact(double t) const;

  bool has_source() const { return mode_ != SourceMode::none; }
  /// s(t) at grid node j; zero when there is no source.
  std::complex<double> source_at(double t, std::size_t j) const;

  /// Manufactured sources are s(t) = c.x X + c.lin L + c.cubic |X|^2 X with
  /// X the spatial factor samples and L their image under the linear operator.
  struct SourceCoeffs {
    std::complex<double> x;
    std::complex<double> lin;
    std::complex<double> cubic;
  };
  SourceCoeffs source_coeffs(double t) const;
  std::complex<double> manufactured_at(const SourceCoeffs& c, std::size_t j) const {
    const std::complex<double> x = spatial_[j];
    return c.x * x + c.lin * linear_[j] + c.cubic * std::norm(x) * x;
  }

 private:
  void build_source();

  std::string name_;
  FcgleParams params_;
  Dims n_;
  std::vector<double> h_;
  std::vector<std::vector<double>> nodes_;
  int fd_order_;
  KronSumOperator op_;
  CTensor<double> initial_;
  SourceMode mode_;
  std::optional<SeparableSolution> exact_;
  CustomSource custom_;
  CTensor<double> spatial_;
  CTensor<double> linear_;
  // Custom source scratch, keyed by time.
  mutable CTensor<double> custom_buf_;
  mutable double custom_time_ = std::numeric_limits<double>::quiet_NaN();
};

/// gamma U - (kappa + i zeta)|U|^2 o U + S(t)
template <typename Real>
void nonlinear_g_into(const GridProblem& problem, double t, const CTensor<Real>& u,
                      CTensor<Real>& out);
template <typename Real>
CTensor<Real> nonlinear_g(const GridProblem& problem, double t, const CTensor<Real>& u);

/// Exact solution of w' = gamma w - (kappa + i zeta)|w|^2 w after time t,
/// applied pointwise.
std::complex<double> exact_flow_scalar(const FcgleParams& params, double t,
                                       std::complex<double> w);
template <typename Real>
void exact_flow_inplace(const FcgleParams& params, double t, CTensor<Real>& w);
template <typename Real>
CTensor<Real> exact_flow(const FcgleParams& params, double t, const CTensor<Real>& w);

/// s(t) on the grid for the problem's source mode.
CTensor<double> manufactured_source(const GridProblem& problem, double t);

/// Example with exact solution e^{-it} prod (1 - x_mu^2)^4 on (-1,1)^d.
GridProblem example1_setup(std::size_t d, std::size_t n, int fd_order, SourceMode mode);
GridProblem example1_setup(std::size_t d, const std::vector<std::size_t>& n, int fd_order,
                           SourceMode mode);

/// Source-free example with initial datum prod sech(x_mu) e^{i x_mu} on (-10,10)^d.
GridProblem example2_setup(std::size_t d, std::size_t n, int fd_order = 2);
GridProblem example2_setup(std::size_t d, const std::vector<std::size_t>& n, int fd_order = 2);

/// Source-free problem with explicit parameters; the initial datum follows one
/// of the examples, "example1" (scaled bump) or "example2" (sech profile).
GridProblem custom_setup(FcgleParams params, const std::vector<std::size_t>& n, int fd_order,
                         const std::string& initial_family);

/// 2 e^{-|x|} / (1 + e^{-2|x|})
double sech(double x);

/// sqrt(prod h_mu) times the Euclidean norm, accumulated in double.
template <typename Real>
double discrete_l2(const CTensor<Real>& u, const std::vector<double>& h);
template <typename Real, typename RefReal>
double discrete_l2_error(const CTensor<Real>& u, const CTensor<RefReal>& ref,
                         const std::vector<double>& h);

}  // namespace fcgle
