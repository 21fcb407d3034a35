#pragma once

// Constant-step time marching for u' = K u + g(t, u): linearized BDF2, Strang
// splitting and the fourth-order Krogstad exponential Runge-Kutta scheme in
// their spectral-filter form, plus the generic run driver.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fcgle/kronspec.hpp"
#include "fcgle/problem.hpp"
#include "fcgle/tensor.hpp"

namespace fcgle {

enum class Scheme { lbdf2, strang, krogstad };
enum class Engine { spectral, iterative };

std::string to_string(Scheme s);
std::string to_string(Engine e);
Scheme scheme_from_string(const std::string& name);
Engine engine_from_string(const std::string& name);

/// Hyperparameters of the iterative engine. The GMRES and PCG runs share
/// tol/maxit; the shift-and-invert parameter is xi = xi_factor * tau.
struct SolverSettings {
  double tol = 1e-6;
  int maxit = 20;
  int krylov_m = 10;
  double xi_factor = 0.1;
};

struct RunConfig {
  Scheme scheme = Scheme::lbdf2;
  Engine engine = Engine::spectral;
  std::size_t steps = 1;
  std::vector<double> snapshot_times;
  /// Evaluate the error against the exact solution after every step (not timed).
  bool track_error = true;
  SolverSettings solver;
};

/// Iteration counts reported by an iterative stepper for one step.
struct StepIterations {
  std::vector<int> outer;  // GMRES iterations or Lanczos dimensions, per solve
  std::vector<int> inner;  // PCG iterations per inner solve
  std::size_t nonconverged = 0;
};

struct IterationSummary {
  std::size_t count = 0;
  double mean = 0.0;
  int min = 0;
  int max = 0;
};

struct StepRecord {
  std::size_t step;
  double time;
  double seconds;
  std::optional<double> error;
  double mean_outer = 0.0;
  double mean_inner = 0.0;
};

template <typename Real>
struct Snapshot {
  double requested_time;
  double time;
  std::size_t step;
  CTensor<Real> state;
};

template <typename Real>
struct RunResult {
  double tau = 0.0;
  CTensor<Real> final_state;
  std::vector<Snapshot<Real>> snapshots;
  std::vector<StepRecord> steps;
  std::optional<double> final_error;
  double precompute_seconds = 0.0;
  double stepping_seconds = 0.0;
  double total_seconds = 0.0;
  IterationSummary outer;
  IterationSummary inner;
  std::size_t nonconverged = 0;
};

template <typename Real>
class Stepper {
 public:
  virtual ~Stepper() = default;
  /// Everything that depends only on tau: factorizations, filters, E_mu.
  virtual void prepare(double tau) = 0;
  /// Advance state from t_n = n tau to t_{n+1}.
  virtual void step(std::size_t n, CTensor<Real>& state) = 0;
  virtual StepIterations last_iterations() const { return {}; }
};

/// Runs prepare() (timed separately) and the step loop; captures snapshots at
/// the step nearest to each requested time. Throws BlowUpError on a non-finite
/// state.
template <typename Real>
RunResult<Real> time_loop(const GridProblem& problem, const RunConfig& config,
                          Stepper<Real>& stepper);

template <typename Real>
std::unique_ptr<Stepper<Real>> make_spectral_stepper(const GridProblem& problem, Scheme scheme);

/// Spectral-engine runs; the scheme field of `config` is ignored.
template <typename Real>
RunResult<Real> lbdf2_run(const GridProblem& problem, const RunConfig& config);
template <typename Real>
RunResult<Real> strang_run(const GridProblem& problem, const RunConfig& config);
template <typename Real>
RunResult<Real> krogstad_run(const GridProblem& problem, const RunConfig& config);

IterationSummary summarize(const std::vector<int>& counts);

}  // namespace fcgle
