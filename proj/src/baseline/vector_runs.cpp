#include "fcgle/baseline.hpp"
#include "fcgle/errors.hpp"

namespace fcgle {

namespace {

CVector to_vector(const CTensor<double>& t) {
  return Eigen::Map<const CVector>(t.data(), static_cast<Eigen::Index>(t.size()));
}

void from_vector(const CVector& v, CTensor<double>& t) {
  std::copy_n(v.data(), v.size(), t.data());
}

class Lbdf2Vector final : public Stepper<double> {
 public:
  Lbdf2Vector(const GridProblem& problem, const SolverSettings& s)
      : problem_(problem), settings_(s) {}

  void prepare(double tau) override {
    tau_ = tau;
    a1_ = std::make_unique<BttbOperator>(problem_.op(), tau);
    m1_ = std::make_unique<TauPreconditioner>(problem_.op(), tau);
    a2_ = std::make_unique<BttbOperator>(problem_.op(), 2.0 * tau / 3.0);
    m2_ = std::make_unique<TauPreconditioner>(problem_.op(), 2.0 * tau / 3.0);
  }

  void step(std::size_t n, CTensor<double>& u) override {
    const CVector un = to_vector(u);
    CVector rhs;
    if (n == 0) {
      nonlinear_g_into(problem_, 0.0, u, g_);
      rhs = un + tau_ * to_vector(g_);
    } else {
      CTensor<double> extrap(u.dims());
      for (std::size_t j = 0; j < u.size(); ++j) extrap[j] = 2.0 * u[j] - prev_[j];
      nonlinear_g_into(problem_, static_cast<double>(n + 1) * tau_, extrap, g_);
      rhs = (4.0 / 3.0) * un - (1.0 / 3.0) * prev_ + (2.0 * tau_ / 3.0) * to_vector(g_);
    }
    CVector x = un;
    const SolveReport rep = n == 0 ? pgmres_solve(*a1_, m1_.get(), rhs, x, settings_.tol, settings_.maxit)
                                   : pgmres_solve(*a2_, m2_.get(), rhs, x, settings_.tol, settings_.maxit);
    last_ = StepIterations{{rep.iterations}, {}, rep.converged ? 0u : 1u};
    prev_ = un;
    from_vector(x, u);
  }

  StepIterations last_iterations() const override { return last_; }

 private:
  const GridProblem& problem_;
  SolverSettings settings_;
  double tau_ = 0.0;
  std::unique_ptr<BttbOperator> a1_, a2_;
  std::unique_ptr<TauPreconditioner> m1_, m2_;
  CVector prev_;
  CTensor<double> g_;
  StepIterations last_;
};

// Shared plumbing for the Lanczos-based steppers.
class LanczosStepper : public Stepper<double> {
 public:
  LanczosStepper(const GridProblem& problem, const SolverSettings& s)
      : problem_(problem), settings_(s) {}

  void prepare(double tau) override {
    tau_ = tau;
    KrylovConfig kc{settings_.krylov_m, settings_.xi_factor * tau, settings_.tol, settings_.maxit};
    lanczos_ = std::make_unique<ShiftInvertLanczos>(problem_.op().directions(), kc);
  }

  StepIterations last_iterations() const override { return last_; }

 protected:
  ShiftInvertLanczos::Basis basis(const CVector& v) {
    auto b = lanczos_->build(v);
    last_.outer.push_back(b.dim());
    last_.inner.insert(last_.inner.end(), b.inner.begin(), b.inner.end());
    last_.nonconverged += b.nonconverged;
    return b;
  }

  CVector phi(const ShiftInvertLanczos::Basis& b, int ell, double theta) const {
    return lanczos_->apply(b, ell, theta, problem_.op().coeff());
  }

  const GridProblem& problem_;
  SolverSettings settings_;
  double tau_ = 0.0;
  std::unique_ptr<ShiftInvertLanczos> lanczos_;
  StepIterations last_;
};

class StrangVector final : public LanczosStepper {
 public:
  StrangVector(const GridProblem& problem, const SolverSettings& s) : LanczosStepper(problem, s) {
    if (problem.has_source()) {
      throw ConfigError("strang: the nonlinear flow has no closed form with a source term");
    }
  }

  void step(std::size_t, CTensor<double>& u) override {
    last_ = {};
    exact_flow_inplace(problem_.params(), 0.5 * tau_, u);
    from_vector(phi(basis(to_vector(u)), 0, tau_), u);
    exact_flow_inplace(problem_.params(), 0.5 * tau_, u);
  }
};

class KrogstadVector final : public LanczosStepper {
 public:
  using LanczosStepper::LanczosStepper;

  void prepare(double tau) override {
    LanczosStepper::prepare(tau);
    k_ = std::make_unique<BttbOperator>(problem_.op(), 0.0);
  }

  void step(std::size_t n, CTensor<double>& u) override {
    last_ = {};
    const double t = static_cast<double>(n) * tau_;
    const double tau = tau_;
    const CVector un = to_vector(u);
    nonlinear_g_into(problem_, t, u, g_);
    const CVector gn = to_vector(g_);
    CVector ku;
    k_->apply_K(un, ku);
    stage_ = CTensor<double>(u.dims());

    const auto bf = basis(ku + gn);
    const CVector f1h = phi(bf, 1, 0.5 * tau);
    const CVector u2 = un + 0.5 * tau * f1h;
    const CVector d2 = difference(t + 0.5 * tau, u2, gn);

    const auto b2 = basis(d2);
    const CVector u3 = un + 0.5 * tau * f1h + tau * phi(b2, 2, 0.5 * tau);
    const CVector d3 = difference(t + 0.5 * tau, u3, gn);

    const auto b3 = basis(d3);
    const CVector f1 = phi(bf, 1, tau);
    const CVector u4 = un + tau * f1 + 2.0 * tau * phi(b3, 2, tau);
    const CVector d4 = difference(t + tau, u4, gn);

    const CVector c2 = 2.0 * d2 + 2.0 * d3 - d4;
    const CVector c3 = -4.0 * d2 - 4.0 * d3 + 4.0 * d4;
    const CVector next =
        un + tau * f1 + tau * phi(basis(c2), 2, tau) + tau * phi(basis(c3), 3, tau);
    from_vector(next, u);
  }

 private:
  CVector difference(double t, const CVector& stage, const CVector& gn) {
    from_vector(stage, stage_);
    nonlinear_g_into(problem_, t, stage_, g_);
    return to_vector(g_) - gn;
  }

  std::unique_ptr<BttbOperator> k_;
  CTensor<double> g_, stage_;
};

}  // namespace

std::unique_ptr<Stepper<double>> make_vector_stepper(const GridProblem& problem, Scheme scheme,
                                                     const SolverSettings& settings) {
  switch (scheme) {
    case Scheme::lbdf2: return std::make_unique<Lbdf2Vector>(problem, settings);
    case Scheme::strang: return std::make_unique<StrangVector>(problem, settings);
    case Scheme::krogstad: return std::make_unique<KrogstadVector>(problem, settings);
  }
  throw ConfigError("unknown scheme");
}

namespace {

RunResult<double> vector_run(const GridProblem& problem, const RunConfig& config, Scheme scheme) {
  auto stepper = make_vector_stepper(problem, scheme, config.solver);
  return time_loop(problem, config, *stepper);
}

}  // namespace

RunResult<double> lbdf2_v_run(const GridProblem& problem, const RunConfig& config) {
  return vector_run(problem, config, Scheme::lbdf2);
}

RunResult<double> strang_v_run(const GridProblem& problem, const RunConfig& config) {
  return vector_run(problem, config, Scheme::strang);
}

RunResult<double> krogstad_v_run(const GridProblem& problem, const RunConfig& config) {
  return vector_run(problem, config, Scheme::krogstad);
}

}  // namespace fcgle
