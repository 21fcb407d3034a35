#pragma once

// Subcommands of the fcgle driver. Each returns a process exit code; errors
// surface as exceptions that run_cli maps to codes.

#include <iosfwd>
#include <string>
#include <vector>

#include "fcgle/baseline.hpp"
#include "fcgle/config.hpp"

namespace fcgle::cli {

enum ExitCode : int { ok = 0, config_error = 1, nonconvergence = 2, blow_up = 3 };

struct Options {
  int threads = 0;  // 0 keeps the OpenMP default
  bool warmup = false;
};

/// Either engine, any precision the engine supports.
template <typename Real>
RunResult<Real> run_problem(const GridProblem& problem, const RunConfig& config);

/// Least-squares slope of log(error) against log(step). Identical errors give
/// slope 0 with `degenerate` set.
struct OrderFit {
  double order = 0.0;
  bool degenerate = false;
};
OrderFit fit_order(const std::vector<double>& steps, const std::vector<double>& errors);

int cmd_solve(const Config& config, const Options& options, std::ostream& log);
int cmd_convergence(const Config& config, const Options& options, std::ostream& log);
int cmd_bench(const Config& config, const Options& options, std::ostream& log);
/// CSV "k,coefficient,eigenvalue" for D on a grid of step h.
int cmd_coeffs(double alpha, int fd_order, std::size_t n, double h, std::ostream& out);

/// Full command line handling, including the exit-code mapping.
int run_cli(int argc, char** argv);

}  // namespace fcgle::cli
