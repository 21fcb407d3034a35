#include "fcgle/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "fcgle/errors.hpp"

namespace fcgle::cli {

namespace {

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (node.IsDefined() && node.Mark().line >= 0) os << ':' << node.Mark().line + 1;
    os << ": " << msg;
    throw ConfigError(os.str());
  }

  void check_map(const YAML::Node& node, const std::string& section) const {
    if (!node.IsMap()) fail(node, "section '" + section + "' must be a mapping");
  }

  void check_keys(const YAML::Node& node, const std::string& section,
                  const std::set<std::string>& allowed) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        fail(kv.first, "unknown key '" + key + "' in section '" + section + "'");
      }
    }
  }

  template <typename T>
  T get(const YAML::Node& node, const std::string& what) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "invalid value for '" + what + "'");
    }
  }

  std::size_t count(const YAML::Node& node, const std::string& what) const {
    const auto v = get<long long>(node, what);
    if (v < 1) fail(node, "'" + what + "' must be a positive integer");
    return static_cast<std::size_t>(v);
  }

  std::vector<std::size_t> counts(const YAML::Node& node, const std::string& what) const {
    std::vector<std::size_t> out;
    if (node.IsSequence()) {
      for (const auto& item : node) out.push_back(count(item, what));
    } else {
      out.push_back(count(node, what));
    }
    return out;
  }

  std::vector<double> reals(const YAML::Node& node, const std::string& what) const {
    std::vector<double> out;
    if (node.IsSequence()) {
      for (const auto& item : node) out.push_back(get<double>(item, what));
    } else {
      out.push_back(get<double>(node, what));
    }
    return out;
  }

  template <typename F>
  auto convert(const YAML::Node& node, const std::string& what, F&& f) const {
    const auto s = get<std::string>(node, what);
    try {
      return f(s);
    } catch (const ConfigError& e) {
      fail(node, e.what());
    }
  }

  void parse(const YAML::Node& root, Config& c) const {
    if (root.IsNull() || !root.IsDefined()) return;
    check_map(root, "top level");
    check_keys(root, "top level", {"problem", "run", "solver", "convergence", "bench", "output"});
    if (auto n = root["problem"]) parse_problem(n, c.problem);
    if (auto n = root["run"]) parse_run(n, c);
    if (auto n = root["solver"]) parse_solver(n, c.run.solver);
    if (auto n = root["convergence"]) parse_convergence(n, c.convergence);
    if (auto n = root["bench"]) parse_bench(n, c.bench);
    if (auto n = root["output"]) {
      check_map(n, "output");
      check_keys(n, "output", {"dir"});
      if (n["dir"]) c.out_dir = get<std::string>(n["dir"], "dir");
    }
  }

 private:
  void parse_problem(const YAML::Node& node, ProblemConfig& p) const {
    check_map(node, "problem");
    check_keys(node, "problem",
               {"name", "d", "n", "fd_order", "source", "nu", "eta", "gamma", "kappa", "zeta",
                "alpha", "domain", "final_time", "initial"});
    if (node["name"]) {
      p.name = get<std::string>(node["name"], "name");
      if (p.name != "example1" && p.name != "example2" && p.name != "custom") {
        fail(node["name"], "problem name must be example1, example2 or custom");
      }
    }
    const bool custom = p.name == "custom";
    if (!custom) {
      for (const char* key : {"nu", "eta", "gamma", "kappa", "zeta", "alpha", "domain",
                              "final_time", "initial"}) {
        if (node[key]) fail(node[key], std::string("'") + key + "' applies to custom problems only");
      }
    }
    if (node["d"]) p.d = count(node["d"], "d");
    if (node["n"]) p.n = counts(node["n"], "n");
    if (node["fd_order"]) {
      p.fd_order = get<int>(node["fd_order"], "fd_order");
      if (p.fd_order != 2 && p.fd_order != 4) fail(node["fd_order"], "fd_order must be 2 or 4");
    }
    if (node["source"]) {
      p.source = convert(node["source"], "source", source_mode_from_string);
      if (p.source == SourceMode::custom) fail(node["source"], "custom sources need the library API");
      if (p.name != "example1" && p.source != SourceMode::none) {
        fail(node["source"], "only example1 carries a manufactured source");
      }
    } else if (p.name != "example1") {
      p.source = SourceMode::none;
    }
    if (!custom && p.d != 2 && p.d != 3) fail(node, "examples are defined for d = 2 or d = 3");
    if (custom) {
      auto& q = p.params;
      if (node["nu"]) q.nu = get<double>(node["nu"], "nu");
      if (node["eta"]) q.eta = get<double>(node["eta"], "eta");
      if (node["gamma"]) q.gamma = get<double>(node["gamma"], "gamma");
      if (node["kappa"]) q.kappa = get<double>(node["kappa"], "kappa");
      if (node["zeta"]) q.zeta = get<double>(node["zeta"], "zeta");
      if (node["final_time"]) q.final_time = get<double>(node["final_time"], "final_time");
      if (!node["alpha"]) fail(node, "custom problems need 'alpha'");
      q.alphas = reals(node["alpha"], "alpha");
      if (q.alphas.size() == 1) q.alphas.assign(p.d, q.alphas[0]);
      if (q.alphas.size() != p.d) fail(node["alpha"], "need one alpha or one per direction");
      if (!node["domain"]) fail(node, "custom problems need 'domain'");
      const auto dom = node["domain"];
      std::vector<Interval> iv;
      auto interval = [&](const YAML::Node& n) {
        const auto v = reals(n, "domain");
        if (v.size() != 2) fail(n, "an interval is a pair [a, b]");
        return Interval{v[0], v[1]};
      };
      if (dom.IsSequence() && dom.size() > 0 && dom[0].IsSequence()) {
        for (const auto& item : dom) iv.push_back(interval(item));
      } else {
        iv.push_back(interval(dom));
      }
      if (iv.size() == 1) iv.assign(p.d, iv[0]);
      if (iv.size() != p.d) fail(dom, "need one interval or one per direction");
      q.domain = iv;
      if (node["initial"]) p.initial = get<std::string>(node["initial"], "initial");
      if (p.initial != "example1" && p.initial != "example2") {
        fail(node["initial"], "initial must be example1 or example2");
      }
      try {
        q.validate();
      } catch (const DomainError& e) {
        fail(node, e.what());
      }
    }
    if (p.n.size() != 1 && p.n.size() != p.d) fail(node["n"], "need one n or one per direction");
  }

  void parse_run(const YAML::Node& node, Config& c) const {
    check_map(node, "run");
    check_keys(node, "run",
               {"scheme", "engine", "steps", "precision", "snapshots", "track_error"});
    auto& r = c.run;
    if (node["scheme"]) r.scheme = convert(node["scheme"], "scheme", scheme_from_string);
    if (node["engine"]) r.engine = convert(node["engine"], "engine", engine_from_string);
    if (node["steps"]) r.steps = count(node["steps"], "steps");
    if (node["precision"]) {
      c.precision = get<std::string>(node["precision"], "precision");
      if (c.precision != "single" && c.precision != "double") {
        fail(node["precision"], "precision must be single or double");
      }
    }
    if (node["snapshots"]) {
      r.snapshot_times = reals(node["snapshots"], "snapshots");
      for (double t : r.snapshot_times) {
        if (!(t >= 0.0)) fail(node["snapshots"], "snapshot times must be non-negative");
      }
    }
    if (node["track_error"]) r.track_error = get<bool>(node["track_error"], "track_error");
  }

  void parse_solver(const YAML::Node& node, SolverSettings& s) const {
    check_map(node, "solver");
    check_keys(node, "solver", {"tol", "maxit", "m", "xi_factor"});
    if (node["tol"]) {
      s.tol = get<double>(node["tol"], "tol");
      if (!(s.tol > 0.0)) fail(node["tol"], "tol must be positive");
    }
    if (node["maxit"]) s.maxit = static_cast<int>(count(node["maxit"], "maxit"));
    if (node["m"]) s.krylov_m = static_cast<int>(count(node["m"], "m"));
    if (node["xi_factor"]) {
      s.xi_factor = get<double>(node["xi_factor"], "xi_factor");
      if (!(s.xi_factor > 0.0)) fail(node["xi_factor"], "xi_factor must be positive");
    }
  }

  void parse_convergence(const YAML::Node& node, ConvergenceConfig& c) const {
    check_map(node, "convergence");
    check_keys(node, "convergence",
               {"steps", "n", "mode", "reference_scheme", "reference_steps"});
    if (node["steps"]) c.steps = counts(node["steps"], "steps");
    if (node["n"]) c.n = counts(node["n"], "n");
    if (node["mode"]) {
      c.mode = get<std::string>(node["mode"], "mode");
      if (c.mode != "exact" && c.mode != "self") fail(node["mode"], "mode must be exact or self");
    }
    if (node["reference_scheme"]) {
      c.reference_scheme =
          convert(node["reference_scheme"], "reference_scheme", scheme_from_string);
    }
    if (node["reference_steps"]) {
      c.reference_steps = count(node["reference_steps"], "reference_steps");
    }
    if (!c.steps.empty() && !c.n.empty()) fail(node, "give either a step list or an n list");
  }

  void parse_bench(const YAML::Node& node, BenchConfig& b) const {
    check_map(node, "bench");
    check_keys(node, "bench", {"n", "engines"});
    if (node["n"]) b.n = counts(node["n"], "n");
    if (node["engines"]) {
      const auto e = node["engines"];
      if (!e.IsSequence() || e.size() != 2) fail(e, "engines must be a list of two engines");
      b.first = convert(e[0], "engines", engine_from_string);
      b.second = convert(e[1], "engines", engine_from_string);
    }
  }

  std::string source_;
};

void emit_list(YAML::Emitter& out, const std::vector<std::size_t>& v) {
  out << YAML::Flow << YAML::BeginSeq;
  for (auto x : v) out << x;
  out << YAML::EndSeq;
}

}  // namespace

Config parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  Config c;
  Parser(source).parse(root, c);
  if (c.precision == "single" && c.run.engine == Engine::iterative) {
    throw ConfigError(source + ": the iterative engine runs in double precision only");
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string to_yaml(const Config& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;

  out << YAML::Key << "problem" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.problem.name;
  out << YAML::Key << "d" << YAML::Value << c.problem.d;
  out << YAML::Key << "n" << YAML::Value;
  emit_list(out, c.problem.n);
  out << YAML::Key << "fd_order" << YAML::Value << c.problem.fd_order;
  out << YAML::Key << "source" << YAML::Value << to_string(c.problem.source);
  if (c.problem.name == "custom") {
    const auto& q = c.problem.params;
    out << YAML::Key << "nu" << YAML::Value << q.nu;
    out << YAML::Key << "eta" << YAML::Value << q.eta;
    out << YAML::Key << "gamma" << YAML::Value << q.gamma;
    out << YAML::Key << "kappa" << YAML::Value << q.kappa;
    out << YAML::Key << "zeta" << YAML::Value << q.zeta;
    out << YAML::Key << "final_time" << YAML::Value << q.final_time;
    out << YAML::Key << "alpha" << YAML::Value << YAML::Flow << q.alphas;
    out << YAML::Key << "domain" << YAML::Value << YAML::BeginSeq;
    for (const auto& iv : q.domain) {
      out << YAML::Flow << YAML::BeginSeq << iv.a << iv.b << YAML::EndSeq;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "initial" << YAML::Value << c.problem.initial;
  }
  out << YAML::EndMap;

  out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "scheme" << YAML::Value << to_string(c.run.scheme);
  out << YAML::Key << "engine" << YAML::Value << to_string(c.run.engine);
  out << YAML::Key << "steps" << YAML::Value << c.run.steps;
  out << YAML::Key << "precision" << YAML::Value << c.precision;
  out << YAML::Key << "snapshots" << YAML::Value << YAML::Flow << c.run.snapshot_times;
  out << YAML::Key << "track_error" << YAML::Value << c.run.track_error;
  out << YAML::EndMap;

  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tol" << YAML::Value << c.run.solver.tol;
  out << YAML::Key << "maxit" << YAML::Value << c.run.solver.maxit;
  out << YAML::Key << "m" << YAML::Value << c.run.solver.krylov_m;
  out << YAML::Key << "xi_factor" << YAML::Value << c.run.solver.xi_factor;
  out << YAML::EndMap;

  out << YAML::Key << "convergence" << YAML::Value << YAML::BeginMap;
  if (!c.convergence.steps.empty()) {
    out << YAML::Key << "steps" << YAML::Value;
    emit_list(out, c.convergence.steps);
  }
  if (!c.convergence.n.empty()) {
    out << YAML::Key << "n" << YAML::Value;
    emit_list(out, c.convergence.n);
  }
  out << YAML::Key << "mode" << YAML::Value << c.convergence.mode;
  out << YAML::Key << "reference_scheme" << YAML::Value << to_string(c.convergence.reference_scheme);
  if (c.convergence.reference_steps > 0) {
    out << YAML::Key << "reference_steps" << YAML::Value << c.convergence.reference_steps;
  }
  out << YAML::EndMap;

  out << YAML::Key << "bench" << YAML::Value << YAML::BeginMap;
  if (!c.bench.n.empty()) {
    out << YAML::Key << "n" << YAML::Value;
    emit_list(out, c.bench.n);
  }
  out << YAML::Key << "engines" << YAML::Value << YAML::Flow << YAML::BeginSeq
      << to_string(c.bench.first) << to_string(c.bench.second) << YAML::EndSeq;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << c.out_dir;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

GridProblem build_problem(const ProblemConfig& p) {
  const std::size_t d = p.d;
  std::vector<std::size_t> n = p.n.size() == 1 ? std::vector<std::size_t>(d, p.n[0]) : p.n;
  if (p.name == "example1") return example1_setup(d, n, p.fd_order, p.source);
  if (p.name == "example2") return example2_setup(d, n, p.fd_order);
  return custom_setup(p.params, n, p.fd_order, p.initial);
}

GridProblem build_problem(const ProblemConfig& p, std::size_t n_override) {
  ProblemConfig q = p;
  q.n = {n_override};
  return build_problem(q);
}

}  // namespace fcgle::cli
