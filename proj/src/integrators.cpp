#include "fcgle/integrators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>

#include "fcgle/errors.hpp"

namespace fcgle {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::lbdf2: return "lbdf2";
    case Scheme::strang: return "strang";
    case Scheme::krogstad: return "krogstad";
  }
  return "unknown";
}

std::string to_string(Engine e) { return e == Engine::spectral ? "spectral" : "iterative"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "lbdf2") return Scheme::lbdf2;
  if (name == "strang") return Scheme::strang;
  if (name == "krogstad") return Scheme::krogstad;
  throw ConfigError("unknown scheme '" + name + "' (expected lbdf2, strang or krogstad)");
}

Engine engine_from_string(const std::string& name) {
  if (name == "spectral") return Engine::spectral;
  if (name == "iterative" || name == "iterative_baseline") return Engine::iterative;
  throw ConfigError("unknown engine '" + name + "' (expected spectral or iterative)");
}

IterationSummary summarize(const std::vector<int>& counts) {
  IterationSummary s;
  if (counts.empty()) return s;
  s.count = counts.size();
  s.min = *std::min_element(counts.begin(), counts.end());
  s.max = *std::max_element(counts.begin(), counts.end());
  double sum = 0.0;
  for (int c : counts) sum += c;
  s.mean = sum / static_cast<double>(counts.size());
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename F>
void for_each_index(std::size_t n, F&& f) {
  const auto m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < m; ++j) f(static_cast<std::size_t>(j));
}

template <typename Real>
class Lbdf2Spectral final : public Stepper<Real> {
 public:
  explicit Lbdf2Spectral(const GridProblem& problem) : problem_(problem) {}

  void prepare(double tau) override {
    tau_ = tau;
    cache_ = std::make_unique<SpectralCache<Real>>(problem_.op());
    r1_ = &cache_->resolvent(tau);
    r2_ = &cache_->resolvent(2.0 * tau / 3.0);
  }

  void step(std::size_t n, CTensor<Real>& u) override {
    const Real tau = static_cast<Real>(tau_);
    if (n == 0) {
      nonlinear_g_into(problem_, 0.0, u, g_);
      rhs_ = u;
      for_each_index(u.size(), [&](std::size_t j) { rhs_[j] += tau * g_[j]; });
      prev_ = u;
      cache_->apply_filter_into(*r1_, rhs_, u);
      return;
    }
    if (extrap_.dims() != u.dims()) extrap_ = CTensor<Real>(u.dims());
    for_each_index(u.size(), [&](std::size_t j) { extrap_[j] = Real(2) * u[j] - prev_[j]; });
    nonlinear_g_into(problem_, static_cast<double>(n + 1) * tau_, extrap_, g_);
    if (rhs_.dims() != u.dims()) rhs_ = CTensor<Real>(u.dims());
    const Real a = Real(4) / Real(3);
    const Real b = Real(1) / Real(3);
    const Real c = Real(2) * tau / Real(3);
    for_each_index(u.size(), [&](std::size_t j) { rhs_[j] = a * u[j] - b * prev_[j] + c * g_[j]; });
    std::swap(prev_, u);
    cache_->apply_filter_into(*r2_, rhs_, u);
  }

 private:
  const GridProblem& problem_;
  double tau_ = 0.0;
  std::unique_ptr<SpectralCache<Real>> cache_;
  const CTensor<Real>* r1_ = nullptr;
  const CTensor<Real>* r2_ = nullptr;
  CTensor<Real> prev_, extrap_, rhs_, g_;
};

template <typename Real>
class StrangSpectral final : public Stepper<Real> {
 public:
  explicit StrangSpectral(const GridProblem& problem) : problem_(problem) {
    if (problem.has_source()) {
      throw ConfigError("strang: the nonlinear flow has no closed form with a source term");
    }
  }

  void prepare(double tau) override {
    tau_ = tau;
    cache_ = std::make_unique<SpectralCache<Real>>(problem_.op());
    cache_->exp_factors(tau);
  }

  void step(std::size_t, CTensor<Real>& u) override {
    exact_flow_inplace(problem_.params(), 0.5 * tau_, u);
    cache_->apply_exp_into(tau_, u, tmp_);
    exact_flow_inplace(problem_.params(), 0.5 * tau_, tmp_);
    std::swap(u, tmp_);
  }

 private:
  const GridProblem& problem_;
  double tau_ = 0.0;
  std::unique_ptr<SpectralCache<Real>> cache_;
  CTensor<Real> tmp_;
};

template <typename Real>
class KrogstadSpectral final : public Stepper<Real> {
 public:
  explicit KrogstadSpectral(const GridProblem& problem) : problem_(problem) {}

  void prepare(double tau) override {
    tau_ = tau;
    cache_ = std::make_unique<SpectralCache<Real>>(problem_.op());
    p1h_ = &cache_->phi(1, 0.5 * tau);
    p2h_ = &cache_->phi(2, 0.5 * tau);
    p1_ = &cache_->phi(1, tau);
    p2_ = &cache_->phi(2, tau);
    p3_ = &cache_->phi(3, tau);
  }

  void step(std::size_t n, CTensor<Real>& u) override {
    const double t = static_cast<double>(n) * tau_;
    const Real tau = static_cast<Real>(tau_);
    const std::size_t size = u.size();
    const auto& P1h = *p1h_;
    const auto& P2h = *p2h_;
    const auto& P1 = *p1_;
    const auto& P2 = *p2_;
    const auto& P3 = *p3_;
    if (tmp_.dims() != u.dims()) tmp_ = CTensor<Real>(u.dims());

    nonlinear_g_into(problem_, t, u, gn_);
    cache_->apply_K_into(u, g_);
    for_each_index(size, [&](std::size_t j) { g_[j] += gn_[j]; });
    cache_->to_eigenbasis(g_, fh_);

    // U2 = U + tau/2 B(P1h o F)
    for_each_index(size, [&](std::size_t j) { tmp_[j] = Real(0.5) * tau * P1h[j] * fh_[j]; });
    stage_value(u);
    stage_difference(t + 0.5 * tau_, d2_);

    // U3 = U + tau B(P1h o F / 2 + P2h o D2)
    for_each_index(size, [&](std::size_t j) {
      tmp_[j] = tau * (Real(0.5) * P1h[j] * fh_[j] + P2h[j] * d2_[j]);
    });
    stage_value(u);
    stage_difference(t + 0.5 * tau_, d3_);

    // U4 = U + tau B(P1 o F + 2 P2 o D3)
    for_each_index(size, [&](std::size_t j) {
      tmp_[j] = tau * (P1[j] * fh_[j] + Real(2) * P2[j] * d3_[j]);
    });
    stage_value(u);
    stage_difference(t + tau_, d4_);

    for_each_index(size, [&](std::size_t j) {
      const auto s23 = d2_[j] + d3_[j];
      tmp_[j] = tau * (P1[j] * fh_[j] + P2[j] * (Real(2) * s23 - d4_[j]) +
                       P3[j] * (Real(4) * (d4_[j] - s23)));
    });
    cache_->from_eigenbasis(tmp_, stage_);
    for_each_index(size, [&](std::size_t j) { u[j] += stage_[j]; });
  }

 private:
  // stage_ = U + B(tmp_)
  void stage_value(const CTensor<Real>& u) {
    cache_->from_eigenbasis(tmp_, stage_);
    for_each_index(u.size(), [&](std::size_t j) { stage_[j] += u[j]; });
  }

  // dh = T(G(t, stage_) - G_n)
  void stage_difference(double t, CTensor<Real>& dh) {
    nonlinear_g_into(problem_, t, stage_, g_);
    for_each_index(g_.size(), [&](std::size_t j) { g_[j] -= gn_[j]; });
    cache_->to_eigenbasis(g_, dh);
  }

  const GridProblem& problem_;
  double tau_ = 0.0;
  std::unique_ptr<SpectralCache<Real>> cache_;
  const CTensor<Real>* p1h_ = nullptr;
  const CTensor<Real>* p2h_ = nullptr;
  const CTensor<Real>* p1_ = nullptr;
  const CTensor<Real>* p2_ = nullptr;
  const CTensor<Real>* p3_ = nullptr;
  CTensor<Real> gn_, g_, fh_, d2_, d3_, d4_, tmp_, stage_;
};

std::size_t nearest_step(double time, double tau, std::size_t steps) {
  const double k = std::round(time / tau);
  if (!(k > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(k), steps);
}

}  // namespace

template <typename Real>
std::unique_ptr<Stepper<Real>> make_spectral_stepper(const GridProblem& problem, Scheme scheme) {
  switch (scheme) {
    case Scheme::lbdf2: return std::make_unique<Lbdf2Spectral<Real>>(problem);
    case Scheme::strang: return std::make_unique<StrangSpectral<Real>>(problem);
    case Scheme::krogstad: return std::make_unique<KrogstadSpectral<Real>>(problem);
  }
  throw ConfigError("unknown scheme");
}

template <typename Real>
RunResult<Real> time_loop(const GridProblem& problem, const RunConfig& config,
                          Stepper<Real>& stepper) {
  if (config.steps < 1) throw ConfigError("steps must be at least 1");
  const auto start = Clock::now();
  RunResult<Real> result;
  const double tau = problem.params().final_time / static_cast<double>(config.steps);
  result.tau = tau;

  auto t0 = Clock::now();
  stepper.prepare(tau);
  result.precompute_seconds = seconds_since(t0);

  std::vector<std::pair<std::size_t, double>> wanted;
  for (double s : config.snapshot_times) wanted.emplace_back(nearest_step(s, tau, config.steps), s);
  auto capture = [&](std::size_t k, const CTensor<Real>& state) {
    for (const auto& [step, requested] : wanted) {
      if (step == k) {
        result.snapshots.push_back({requested, static_cast<double>(k) * tau, k, state});
      }
    }
  };

  CTensor<Real> u = problem.initial().template cast<Real>();
  capture(0, u);

  const bool errors = config.track_error && problem.has_exact();
  std::vector<int> outer, inner;
  result.steps.reserve(config.steps);
  for (std::size_t n = 0; n < config.steps; ++n) {
    t0 = Clock::now();
    stepper.step(n, u);
    const double dt = seconds_since(t0);
    result.stepping_seconds += dt;
    if (!u.all_finite()) {
      throw BlowUpError(n + 1, "non-finite state after step " + std::to_string(n + 1) + " of " +
                                   std::to_string(config.steps));
    }
    const double t = static_cast<double>(n + 1) * tau;
    StepRecord rec{n + 1, t, dt, std::nullopt};
    const StepIterations it = stepper.last_iterations();
    if (!it.outer.empty()) rec.mean_outer = summarize(it.outer).mean;
    if (!it.inner.empty()) rec.mean_inner = summarize(it.inner).mean;
    outer.insert(outer.end(), it.outer.begin(), it.outer.end());
    inner.insert(inner.end(), it.inner.begin(), it.inner.end());
    result.nonconverged += it.nonconverged;
    if (errors) rec.error = discrete_l2_error(u, problem.exact(t), problem.steps());
    result.steps.push_back(rec);
    capture(n + 1, u);
  }
  result.outer = summarize(outer);
  result.inner = summarize(inner);
  if (errors) result.final_error = result.steps.back().error;
  result.final_state = std::move(u);
  result.total_seconds = seconds_since(start);
  return result;
}

namespace {

template <typename Real>
RunResult<Real> spectral_run(const GridProblem& problem, const RunConfig& config, Scheme scheme) {
  auto stepper = make_spectral_stepper<Real>(problem, scheme);
  return time_loop(problem, config, *stepper);
}

}  // namespace

template <typename Real>
RunResult<Real> lbdf2_run(const GridProblem& problem, const RunConfig& config) {
  return spectral_run<Real>(problem, config, Scheme::lbdf2);
}

template <typename Real>
RunResult<Real> strang_run(const GridProblem& problem, const RunConfig& config) {
  return spectral_run<Real>(problem, config, Scheme::strang);
}

template <typename Real>
RunResult<Real> krogstad_run(const GridProblem& problem, const RunConfig& config) {
  return spectral_run<Real>(problem, config, Scheme::krogstad);
}

#define FCGLE_INSTANTIATE(Real)                                                                \
  template std::unique_ptr<Stepper<Real>> make_spectral_stepper<Real>(const GridProblem&,      \
                                                                      Scheme);                 \
  template RunResult<Real> time_loop<Real>(const GridProblem&, const RunConfig&, Stepper<Real>&); \
  template RunResult<Real> lbdf2_run<Real>(const GridProblem&, const RunConfig&);              \
  template RunResult<Real> strang_run<Real>(const GridProblem&, const RunConfig&);             \
  template RunResult<Real> krogstad_run<Real>(const GridProblem&, const RunConfig&);

FCGLE_INSTANTIATE(float)
FCGLE_INSTANTIATE(double)

}  // namespace fcgle
