#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fcgle/commands.hpp"
#include "fcgle/config.hpp"
#include "fcgle/errors.hpp"

using namespace fcgle;
using namespace fcgle::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fcgle_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "in.yaml";
  std::ofstream(p) << text;
  return p;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "fcgle");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Drops the last CSV column.
std::vector<std::string> without_timing(const std::vector<std::string>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.substr(0, r.rfind(',')));
  return out;
}

int exit_status(const std::string& cmd) {
  const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("config defaults") {
  const Config c = parse_config("");
  CHECK(c.problem.name == "example1");
  CHECK(c.run.scheme == Scheme::lbdf2);
  CHECK(c.run.engine == Engine::spectral);
  CHECK(c.run.solver.tol == 1e-6);
  CHECK(c.run.solver.maxit == 20);
  CHECK(c.run.solver.krylov_m == 10);
  CHECK(c.run.solver.xi_factor == 0.1);
  CHECK(c.precision == "double");
}

TEST_CASE("config errors carry the line number") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text, "cfg.yaml");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(message("problem:\n  d: 2\n  colour: red\n").find("cfg.yaml:3") == 0);
  CHECK(message("run:\n  scheme: rk4\n").find("cfg.yaml:2") == 0);
  CHECK(message("problem:\n  fd_order: 3\n").find("cfg.yaml:2") == 0);
  CHECK(message("extra: 1\n").find("cfg.yaml:1") == 0);
  CHECK(message("problem:\n  name: example2\n  source: discrete\n").find("cfg.yaml:3") == 0);
  CHECK(message("problem:\n  name: example1\n  gamma: 2\n").find("cfg.yaml:3") == 0);
  CHECK(message("run: [1, 2\n").find("cfg.yaml") == 0);
}

TEST_CASE("config round trip") {
  const std::string text =
      "problem:\n  name: custom\n  d: 2\n  n: [20, 30]\n  fd_order: 4\n  nu: 0.5\n  eta: 2\n"
      "  gamma: 0.25\n  kappa: 2\n  zeta: -1\n  alpha: [1.3, 1.7]\n  domain: [[-2, 2], [-3, 3]]\n"
      "  final_time: 0.5\n  initial: example2\n"
      "run:\n  scheme: krogstad\n  engine: iterative\n  steps: 12\n  snapshots: [0, 0.25]\n"
      "solver:\n  tol: 1e-8\n  maxit: 30\n  m: 12\n  xi_factor: 0.2\n"
      "convergence:\n  steps: [4, 8, 16]\n  mode: self\n  reference_steps: 200\n"
      "bench:\n  n: [16, 32]\n  engines: [spectral, spectral]\n"
      "output:\n  dir: somewhere\n";
  const Config c = parse_config(text);
  CHECK(c.problem.params.alphas == std::vector<double>{1.3, 1.7});
  CHECK(c.problem.params.domain[1].b == 3.0);
  CHECK(c.run.solver.krylov_m == 12);
  CHECK(c.bench.second == Engine::spectral);
  const std::string y = to_yaml(c);
  CHECK(to_yaml(parse_config(y)) == y);
  const auto prob = build_problem(c.problem);
  CHECK(prob.dims() == Dims{20, 30});
  CHECK(prob.params().final_time == 0.5);
  CHECK(build_problem(c.problem, 10).dims() == Dims{10, 10});
}

TEST_CASE("order fit") {
  const std::vector<double> tau{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> err;
  for (double t : tau) err.push_back(3 * t * t);
  const auto f = fit_order(tau, err);
  CHECK(f.order == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(f.degenerate);
  const auto g = fit_order(tau, {1e-3, 1e-3, 1e-3, 1e-3});
  CHECK(g.order == 0.0);
  CHECK(g.degenerate);
  CHECK_THROWS_AS(fit_order({0.1, 0.05}, {1.0, 0.25}), ConfigError);
}

TEST_CASE("solve writes the run table, summary and echoed config") {
  const auto dir = scratch("solve");
  const auto cfg = write_config(dir, "problem:\n  n: 64\nrun:\n  scheme: lbdf2\n  steps: 25\n");
  REQUIRE(run({"solve", "--config", cfg.string(), "--out", (dir / "a").string()}) == 0);
  const auto rows = lines(dir / "a" / "run.csv");
  REQUIRE(rows.size() == 26);
  CHECK(rows[0] == "step,time,error,wall_clock");
  CHECK(rows[25].rfind("25,1,", 0) == 0);
  const auto s = read_json(dir / "a" / "summary.json");
  CHECK(s["steps"] == 25);
  CHECK(s["timing"]["precompute_seconds"].get<double>() > 0);
  CHECK(s["final_error"].get<double>() == doctest::Approx(7.2e-3).epsilon(0.1));
  CHECK(s["threads"].get<int>() >= 1);

  // the echoed config reproduces the run
  REQUIRE(run({"solve", "--config", (dir / "a" / "config.yaml").string(), "--out", (dir / "b").string()}) == 0);
  CHECK(without_timing(lines(dir / "a" / "run.csv")) == without_timing(lines(dir / "b" / "run.csv")));
  CHECK(slurp(dir / "a" / "config.yaml").find("dir: " + (dir / "b").string()) == std::string::npos);

  // and a plain rerun is identical apart from timing
  REQUIRE(run({"solve", "--config", cfg.string(), "--out", (dir / "c").string()}) == 0);
  CHECK(without_timing(lines(dir / "a" / "run.csv")) == without_timing(lines(dir / "c" / "run.csv")));
}

TEST_CASE("snapshots of a Strang run") {
  const auto dir = scratch("snap");
  const auto cfg = write_config(
      dir, "problem:\n  name: example2\n  n: 200\nrun:\n  scheme: strang\n  steps: 20\n  snapshots: [0, 0.25, 0.5, 1]\n");
  REQUIRE(run({"solve", "--config", cfg.string(), "--out", (dir / "o").string(), "--threads", "2"}) == 0);
  for (int step : {0, 5, 10, 20}) {
    const auto base = dir / "o" / ("snapshot_step" + std::to_string(step));
    CHECK(fs::exists(base.string() + ".bin"));
    const auto rows = lines(base.string() + "_abs.csv");
    CHECK(rows.size() == 200 * 200 + 1);
  }
  const auto u0 = read_binary((dir / "o" / "snapshot_step0.bin").string());
  CHECK(u0 == example2_setup(2, 200).initial());
  const auto s = read_json(dir / "o" / "summary.json");
  CHECK(s["snapshots"].size() == 4);
  CHECK(s["threads"] == 2);
  CHECK(s["final_error"].is_null());
}

TEST_CASE("coefficient listing") {
  std::ostringstream a;
  cmd_coeffs(2.0, 2, 6, 1.0, a);
  std::istringstream ia(a.str());
  std::string line;
  std::getline(ia, line);
  CHECK(line == "k,coefficient,eigenvalue");
  const double want[] = {2, -1, 0, 0, 0, 0};
  for (double w : want) {
    std::getline(ia, line);
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(c1 + 1, c2 - c1 - 1)) == w);
    CHECK(line.find("-0,") == std::string::npos);
  }

  std::ostringstream b;
  cmd_coeffs(1.5, 2, 10, 0.1, b);
  std::istringstream ib(b.str());
  std::getline(ib, line);
  int rows = 0;
  double max_eig = -1e300;
  while (std::getline(ib, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const double g = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK((rows == 0 ? g > 0 : g < 0));
    max_eig = std::max(max_eig, std::stod(line.substr(c2 + 1)));
    ++rows;
  }
  CHECK(rows == 10);
  CHECK(max_eig < 0);
  CHECK_THROWS_AS(cmd_coeffs(0.5, 2, 10, 0.1, b), DomainError);
}

TEST_CASE("exit codes of the installed binary") {
  const std::string bin = FCGLE_CLI_PATH;
  const auto dir = scratch("exit");
  CHECK(exit_status(bin + " coeffs --alpha 1.5 -n 4") == 0);
  CHECK(exit_status(bin + " coeffs --alpha 0.5 -n 4") == 1);
  CHECK(exit_status(bin + " solve --config " + write_config(dir, "run:\n  stepz: 3\n").string()) == 1);
  CHECK(exit_status(bin + " frobnicate") == 1);
  CHECK(exit_status(bin + " solve --config /nonexistent.yaml") == 1);

  // explicit cubic term with a huge coefficient overflows within a few steps
  const auto blow = write_config(dir,
                                 "problem:\n  name: custom\n  n: 8\n  alpha: [1.5, 1.5]\n"
                                 "  domain: [[-1, 1], [-1, 1]]\n  kappa: 1000\nrun:\n  steps: 10\n");
  CHECK(exit_status(bin + " solve --config " + blow.string() + " --out " + (dir / "b").string()) == 3);

  const auto stall = write_config(dir,
                                  "problem:\n  n: 32\nrun:\n  engine: iterative\n  steps: 3\n"
                                  "solver:\n  tol: 1e-14\n  maxit: 1\n");
  CHECK(exit_status(bin + " solve --config " + stall.string() + " --out " + (dir / "s").string()) == 2);
  CHECK(exit_status(bin + " solve --precision single --config " + stall.string() + " --out " +
                    (dir / "t").string()) == 1);
}

TEST_CASE("convergence study") {
  const auto dir = scratch("conv");
  const auto cfg = write_config(
      dir, "problem:\n  n: 48\nrun:\n  scheme: lbdf2\nconvergence:\n  steps: [15, 20, 25, 30, 35]\n");
  REQUIRE(run({"convergence", "--config", cfg.string(), "--out", (dir / "o").string()}) == 0);
  const auto rows = lines(dir / "o" / "convergence.csv");
  CHECK(rows.size() == 6);
  CHECK(rows[0] == "steps,tau,n,h,error");
  const auto j = read_json(dir / "o" / "convergence.json");
  CHECK(j["order"].get<double>() == doctest::Approx(2.0).epsilon(0.05));

  const auto self = write_config(dir,
                                 "problem:\n  name: example2\n  n: 40\nrun:\n  scheme: strang\n"
                                 "convergence:\n  steps: [5, 10, 20]\n  mode: self\n");
  REQUIRE(run({"convergence", "--config", self.string(), "--out", (dir / "s").string()}) == 0);
  CHECK(read_json(dir / "s" / "convergence.json")["order"].get<double>() == doctest::Approx(2.0).epsilon(0.1));

  const auto space = write_config(dir,
                                  "problem:\n  source: analytic\nrun:\n  scheme: krogstad\n  steps: 40\n"
                                  "convergence:\n  n: [16, 32, 64]\n");
  REQUIRE(run({"convergence", "--config", space.string(), "--out", (dir / "n").string()}) == 0);
  CHECK(read_json(dir / "n" / "convergence.json")["variable"] == "h");

  const auto few = write_config(dir, "convergence:\n  steps: [10, 20]\n");
  CHECK(run({"convergence", "--config", few.string(), "--out", (dir / "f").string()}) == 1);
}

TEST_CASE("bench table") {
  const auto dir = scratch("bench");
  const auto same = write_config(dir,
                                 "problem:\n  name: example2\nrun:\n  scheme: strang\n  steps: 40\n"
                                 "bench:\n  n: [96]\n  engines: [spectral, spectral]\n");
  REQUIRE(run({"bench", "--config", same.string(), "--out", (dir / "a").string(), "--warmup"}) == 0);
  const auto rows = lines(dir / "a" / "bench.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].rfind("n,first_engine,second_engine,first_seconds,second_seconds,speedup", 0) == 0);
  std::vector<std::string> cols;
  std::stringstream ss(rows[1]);
  for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  const double speedup = std::stod(cols[5]);
  CHECK(speedup > 0.33);
  CHECK(speedup < 3.0);
  CHECK(std::stod(cols.back()) == 0.0);

  const auto vs = write_config(dir,
                               "problem:\n  n: 48\nrun:\n  scheme: lbdf2\n  steps: 10\n"
                               "bench:\n  n: [32, 48]\n");
  REQUIRE(run({"bench", "--config", vs.string(), "--out", (dir / "b").string()}) == 0);
  const auto rows2 = lines(dir / "b" / "bench.csv");
  REQUIRE(rows2.size() == 3);
  for (std::size_t i = 1; i < rows2.size(); ++i) {
    CHECK(rows2[i].find("spectral,iterative") != std::string::npos);
  }
}
