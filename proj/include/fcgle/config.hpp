#pragma once

// YAML run configuration: parsing with strict key checking, defaults, and the
// effective-config echo.

#include <string>
#include <vector>

#include "fcgle/integrators.hpp"
#include "fcgle/problem.hpp"

namespace fcgle::cli {

struct ProblemConfig {
  std::string name = "example1";  // example1 | example2 | custom
  std::size_t d = 2;
  std::vector<std::size_t> n{64};  // one value for all directions, or one per direction
  int fd_order = 2;
  SourceMode source = SourceMode::discrete_manufactured;
  // custom problems only
  FcgleParams params;
  std::string initial = "example1";
};

struct ConvergenceConfig {
  std::vector<std::size_t> steps;
  std::vector<std::size_t> n;
  std::string mode = "exact";  // exact | self
  Scheme reference_scheme = Scheme::krogstad;
  std::size_t reference_steps = 0;  // 0: eight times the finest step count
};

struct BenchConfig {
  std::vector<std::size_t> n;
  Engine first = Engine::spectral;
  Engine second = Engine::iterative;
};

struct Config {
  ProblemConfig problem;
  RunConfig run;
  std::string precision = "double";
  ConvergenceConfig convergence;
  BenchConfig bench;
  std::string out_dir = "out";
};

/// Throws ConfigError with "source:line: message" on malformed input or
/// unknown keys.
Config parse_config(const std::string& text, const std::string& source = "<config>");
Config load_config(const std::string& path);

/// Effective configuration with all defaults filled; parse_config(to_yaml(c))
/// reproduces c.
std::string to_yaml(const Config& config);

/// Grid problem for the configuration, optionally with another point count.
GridProblem build_problem(const ProblemConfig& config);
GridProblem build_problem(const ProblemConfig& config, std::size_t n_override);

}  // namespace fcgle::cli
