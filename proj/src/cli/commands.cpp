#include "fcgle/commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "fcgle/errors.hpp"

namespace fcgle::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

template <typename Real>
RunResult<Real> run_problem(const GridProblem& problem, const RunConfig& config) {
  if (config.engine == Engine::spectral) {
    auto stepper = make_spectral_stepper<Real>(problem, config.scheme);
    return time_loop(problem, config, *stepper);
  }
  if constexpr (std::is_same_v<Real, double>) {
    auto stepper = make_vector_stepper(problem, config.scheme, config.solver);
    return time_loop(problem, config, *stepper);
  } else {
    throw ConfigError("the iterative engine runs in double precision only");
  }
}

template RunResult<float> run_problem<float>(const GridProblem&, const RunConfig&);
template RunResult<double> run_problem<double>(const GridProblem&, const RunConfig&);

OrderFit fit_order(const std::vector<double>& steps, const std::vector<double>& errors) {
  if (steps.size() != errors.size()) throw DimensionError("fit_order: size mismatch");
  if (steps.size() < 3) throw ConfigError("an order fit needs at least 3 refinement points");
  const auto [lo, hi] = std::minmax_element(errors.begin(), errors.end());
  if (*lo == *hi) return {0.0, true};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(errors[i] > 0.0) || !std::isfinite(errors[i]) || !(steps[i] > 0.0)) {
      throw NumericalError("fit_order: errors and steps must be positive and finite");
    }
  }
  const double m = static_cast<double>(steps.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double x = std::log(steps[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (den == 0.0) return {0.0, true};
  return {(m * sxy - sx * sy) / den, false};
}

namespace {

json summary_json(const IterationSummary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

fs::path prepare_dir(const Config& config) {
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "'");
  write_text(dir / "config.yaml", to_yaml(config));
  return dir;
}

template <typename Real>
int solve_impl(const Config& config, const Options& options, std::ostream& log) {
  const GridProblem problem = build_problem(config.problem);
  const fs::path dir = prepare_dir(config);
  if (options.warmup) run_problem<Real>(problem, config.run);
  const RunResult<Real> r = run_problem<Real>(problem, config.run);

  {
    std::ofstream csv(dir / "run.csv");
    csv << "step,time,error,wall_clock\n" << std::setprecision(17);
    for (const auto& s : r.steps) {
      csv << s.step << ',' << s.time << ',';
      if (s.error) csv << *s.error;
      csv << ',' << s.seconds << '\n';
    }
  }

  json snaps = json::array();
  for (const auto& s : r.snapshots) {
    const std::string base = "snapshot_step" + std::to_string(s.step);
    write_binary(s.state, (dir / (base + ".bin")).string());
    std::ofstream abs_csv(dir / (base + "_abs.csv"));
    write_abs_csv(s.state, problem.nodes(), abs_csv);
    snaps.push_back({{"requested_time", s.requested_time},
                     {"time", s.time},
                     {"step", s.step},
                     {"binary", base + ".bin"},
                     {"abs_csv", base + "_abs.csv"}});
  }

  json summary = {
      {"problem", problem.name()},
      {"dims", problem.dims()},
      {"fd_order", problem.fd_order()},
      {"source", to_string(problem.source_mode())},
      {"scheme", to_string(config.run.scheme)},
      {"engine", to_string(config.run.engine)},
      {"precision", config.precision},
      {"steps", config.run.steps},
      {"tau", r.tau},
      {"threads", omp_get_max_threads()},
      {"timing",
       {{"precompute_seconds", r.precompute_seconds},
        {"stepping_seconds", r.stepping_seconds},
        {"total_seconds", r.total_seconds}}},
      {"iterations",
       {{"outer", summary_json(r.outer)},
        {"inner", summary_json(r.inner)},
        {"nonconverged", r.nonconverged}}},
      {"snapshots", snaps},
  };
  summary["final_error"] = r.final_error ? json(*r.final_error) : json(nullptr);
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  log << problem.name() << ' ' << to_string(config.run.scheme) << '-'
      << to_string(config.run.engine) << ": " << config.run.steps << " steps, precompute "
      << r.precompute_seconds << " s, stepping " << r.stepping_seconds << " s";
  if (r.final_error) log << ", final error " << std::setprecision(6) << *r.final_error;
  log << '\n';
  if (r.nonconverged > 0) {
    log << "warning: " << r.nonconverged << " solves did not reach the tolerance\n";
    return nonconvergence;
  }
  return ok;
}

template <typename Real>
int convergence_impl(const Config& config, const Options&, std::ostream& log) {
  const auto& cc = config.convergence;
  const bool by_n = !cc.n.empty();
  const std::size_t points = by_n ? cc.n.size() : cc.steps.size();
  if (points < 3) throw ConfigError("convergence needs at least 3 step counts or grid sizes");
  const bool self = cc.mode == "self";
  if (by_n && self) throw ConfigError("self-convergence is defined for step lists only");
  const fs::path dir = prepare_dir(config);

  std::vector<double> xs, errors;
  std::ofstream csv(dir / "convergence.csv");
  csv << "steps,tau,n,h,error\n" << std::setprecision(17);

  if (by_n) {
    RunConfig rc = config.run;
    rc.track_error = false;
    for (std::size_t n : cc.n) {
      const GridProblem problem = build_problem(config.problem, n);
      if (!problem.has_exact()) throw ConfigError("exact mode needs a problem with exact solution");
      const auto r = run_problem<Real>(problem, rc);
      const double err = discrete_l2_error(r.final_state, problem.exact(problem.params().final_time),
                                           problem.steps());
      xs.push_back(problem.steps()[0]);
      errors.push_back(err);
      csv << rc.steps << ',' << r.tau << ',' << n << ',' << problem.steps()[0] << ',' << err << '\n';
      log << "n " << n << ": error " << err << '\n';
    }
  } else {
    const GridProblem problem = build_problem(config.problem);
    const double T = problem.params().final_time;
    CTensor<double> reference;
    if (self) {
      RunConfig ref = config.run;
      ref.scheme = cc.reference_scheme;
      ref.engine = Engine::spectral;
      ref.track_error = false;
      ref.snapshot_times.clear();
      ref.steps = cc.reference_steps > 0
                      ? cc.reference_steps
                      : 8 * *std::max_element(cc.steps.begin(), cc.steps.end());
      reference = run_problem<double>(problem, ref).final_state;
      log << "reference: " << to_string(ref.scheme) << " with " << ref.steps << " steps\n";
    } else {
      if (!problem.has_exact()) throw ConfigError("exact mode needs a problem with exact solution");
      reference = problem.exact(T);
    }
    for (std::size_t s : cc.steps) {
      RunConfig rc = config.run;
      rc.steps = s;
      rc.track_error = false;
      rc.snapshot_times.clear();
      const auto r = run_problem<Real>(problem, rc);
      const double err = discrete_l2_error(r.final_state, reference, problem.steps());
      xs.push_back(r.tau);
      errors.push_back(err);
      csv << s << ',' << r.tau << ',' << problem.dims()[0] << ',' << problem.steps()[0] << ','
          << err << '\n';
      log << "steps " << s << ": error " << err << '\n';
    }
  }

  const OrderFit fit = fit_order(xs, errors);
  json out = {{"variable", by_n ? "h" : "tau"},
              {"mode", cc.mode},
              {"order", fit.order},
              {"degenerate", fit.degenerate},
              {"errors", errors}};
  write_text(dir / "convergence.json", out.dump(2) + "\n");
  log << "fitted order " << fit.order << (fit.degenerate ? " (degenerate: identical errors)" : "")
      << '\n';
  return ok;
}

template <typename Real>
int bench_impl(const Config& config, const Options& options, std::ostream& log) {
  const auto& bc = config.bench;
  std::vector<std::size_t> sizes = bc.n;
  if (sizes.empty()) sizes.push_back(config.problem.n[0]);
  const fs::path dir = prepare_dir(config);
  std::ofstream csv(dir / "bench.csv");
  csv << "n,first_engine,second_engine,first_seconds,second_seconds,speedup,"
         "first_precompute,second_precompute,first_mean_outer,first_mean_inner,"
         "second_mean_outer,second_mean_inner,nonconverged,state_gap\n";
  bool nonconverged = false;
  for (std::size_t n : sizes) {
    const GridProblem problem = build_problem(config.problem, n);
    RunConfig rc = config.run;
    rc.track_error = false;
    rc.snapshot_times.clear();
    auto timed = [&](Engine e) {
      rc.engine = e;
      if (options.warmup) run_problem<Real>(problem, rc);
      return run_problem<Real>(problem, rc);
    };
    const auto a = timed(bc.first);
    const auto b = timed(bc.second);
    const double speedup = b.total_seconds / a.total_seconds;
    const double gap = discrete_l2_error(a.final_state, b.final_state, problem.steps());
    const std::size_t nc = a.nonconverged + b.nonconverged;
    nonconverged = nonconverged || nc > 0;
    csv << n << ',' << to_string(bc.first) << ',' << to_string(bc.second) << ','
        << std::setprecision(6) << a.total_seconds << ',' << b.total_seconds << ',' << speedup
        << ',' << a.precompute_seconds << ',' << b.precompute_seconds << ',' << a.outer.mean << ','
        << a.inner.mean << ',' << b.outer.mean << ',' << b.inner.mean << ',' << nc << ','
        << std::setprecision(17) << gap << '\n';
    log << "n " << n << ": " << to_string(bc.first) << ' ' << a.total_seconds << " s, "
        << to_string(bc.second) << ' ' << b.total_seconds << " s, speedup " << speedup << '\n';
  }
  return nonconverged ? nonconvergence : ok;
}

}  // namespace

int cmd_solve(const Config& config, const Options& options, std::ostream& log) {
  if (config.precision == "single") return solve_impl<float>(config, options, log);
  return solve_impl<double>(config, options, log);
}

int cmd_convergence(const Config& config, const Options& options, std::ostream& log) {
  if (config.precision == "single") return convergence_impl<float>(config, options, log);
  return convergence_impl<double>(config, options, log);
}

int cmd_bench(const Config& config, const Options& options, std::ostream& log) {
  if (config.precision == "single") return bench_impl<float>(config, options, log);
  return bench_impl<double>(config, options, log);
}

int cmd_coeffs(double alpha, int fd_order, std::size_t n, double h, std::ostream& out) {
  const FracOperator op(alpha, fd_order, n, h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.dense(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("coeffs: eigensolver failed");
  out << "k,coefficient,eigenvalue\n" << std::setprecision(17);
  for (std::size_t k = 0; k < n; ++k) {
    out << k << ',' << op.coeffs()[k] + 0.0 << ',' << es.eigenvalues()[static_cast<Eigen::Index>(k)]
        << '\n';
  }
  return ok;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Tensor-oriented time integration of the fractional complex Ginzburg-Landau equation"};
  app.require_subcommand(1);

  std::string config_path, out_dir, precision;
  Options options;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "YAML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--threads", options.threads, "number of threads")->check(CLI::NonNegativeNumber);
    sub->add_option("--precision", precision, "single or double (overrides run.precision)")
        ->check(CLI::IsMember({"single", "double"}));
    sub->add_flag("--warmup", options.warmup, "add one discarded run before timing");
  };
  auto* solve = app.add_subcommand("solve", "run one time integration");
  auto* conv = app.add_subcommand("convergence", "error and fitted order over a refinement list");
  auto* bench = app.add_subcommand("bench", "wall-clock comparison of two engines");
  for (auto* sub : {solve, conv, bench}) add_common(sub);

  double alpha = 1.5;
  int fd_order = 2;
  std::size_t n = 10;
  double h = 1.0;
  auto* coeffs = app.add_subcommand("coeffs", "print Riesz coefficients and operator eigenvalues");
  coeffs->add_option("--alpha", alpha, "fractional order in (1,2]")->required();
  coeffs->add_option("--fd-order", fd_order, "2 or 4")->check(CLI::IsMember({2, 4}));
  coeffs->add_option("-n", n, "number of interior points")->check(CLI::PositiveNumber);
  coeffs->add_option("--step", h, "grid step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (coeffs->parsed()) return cmd_coeffs(alpha, fd_order, n, h, std::cout);
    Config config = config_path.empty() ? Config{} : load_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (!precision.empty()) config.precision = precision;
    if (config.precision == "single" && config.run.engine == Engine::iterative &&
        !bench->parsed()) {
      throw ConfigError("the iterative engine runs in double precision only");
    }
    if (options.threads > 0) omp_set_num_threads(options.threads);
    if (solve->parsed()) return cmd_solve(config, options, std::cout);
    if (conv->parsed()) return cmd_convergence(config, options, std::cout);
    return cmd_bench(config, options, std::cout);
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return blow_up;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return nonconvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  }
}

}  // namespace fcgle::cli
