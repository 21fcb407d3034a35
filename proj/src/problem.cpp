#include "fcgle/problem.hpp"

#include <cmath>

#include "fcgle/errors.hpp"

namespace fcgle {

void FcgleParams::validate(bool allow_integer_order) const {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (!(final_time > 0.0)) throw DomainError("final time must be positive");
  if (alphas.empty()) throw DomainError("at least one direction is required");
  if (alphas.size() != domain.size()) {
    throw DomainError("one fractional order and one interval per direction are required");
  }
  for (double a : alphas) {
    const bool ok = (a > 1.0 && a < 2.0) || (allow_integer_order && a == 2.0);
    if (!ok) throw DomainError("fractional order must lie in (1,2), got " + std::to_string(a));
  }
  for (const auto& iv : domain) {
    if (!(iv.b > iv.a)) throw DomainError("domain interval must satisfy a < b");
  }
}

std::string to_string(SourceMode mode) {
  switch (mode) {
    case SourceMode::none: return "none";
    case SourceMode::analytic_manufactured: return "analytic_manufactured";
    case SourceMode::discrete_manufactured: return "discrete_manufactured";
    case SourceMode::custom: return "custom";
  }
  return "none";
}

SourceMode source_mode_from_string(const std::string& name) {
  if (name == "none") return SourceMode::none;
  if (name == "analytic_manufactured" || name == "analytic") return SourceMode::analytic_manufactured;
  if (name == "discrete_manufactured" || name == "discrete") return SourceMode::discrete_manufactured;
  if (name == "custom") return SourceMode::custom;
  throw ConfigError("unknown source mode '" + name + "'");
}

namespace {

std::vector<FracOperator> make_directions(const FcgleParams& params, const Dims& n,
                                          int fd_order, const std::vector<double>& h) {
  std::vector<FracOperator> dirs;
  for (std::size_t mu = 0; mu < n.size(); ++mu) {
    dirs.emplace_back(params.alphas[mu], fd_order, n[mu], h[mu]);
  }
  return dirs;
}

std::vector<double> grid_steps(const FcgleParams& params, const Dims& n) {
  if (n.size() != params.alphas.size()) {
    throw DimensionError("grid needs one point count per direction");
  }
  std::vector<double> h;
  for (std::size_t mu = 0; mu < n.size(); ++mu) {
    if (n[mu] == 0) throw DimensionError("grid point count must be positive");
    h.push_back((params.domain[mu].b - params.domain[mu].a) / static_cast<double>(n[mu] + 1));
  }
  return h;
}

// prod_mu f_mu(x_mu) sampled on the grid.
CTensor<double> separable_samples(const std::vector<std::vector<double>>& factors) {
  Dims dims;
  for (const auto& f : factors) dims.push_back(f.size());
  CTensor<double> out(dims);
  std::vector<std::size_t> idx(dims.size(), 0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double v = 1.0;
    for (std::size_t mu = 0; mu < dims.size(); ++mu) v *= factors[mu][idx[mu]];
    out[j] = v;
    for (std::size_t mu = 0; mu < dims.size(); ++mu) {
      if (++idx[mu] < dims[mu]) break;
      idx[mu] = 0;
    }
  }
  return out;
}

}  // namespace

GridProblem::GridProblem(std::string name, FcgleParams params, std::vector<std::size_t> n,
                         int fd_order, CTensor<double> initial, SourceMode mode,
                         std::optional<SeparableSolution> exact, CustomSource custom)
    : name_(std::move(name)),
      params_(std::move(params)),
      n_(std::move(n)),
      h_(grid_steps(params_, n_)),
      fd_order_(fd_order),
      op_(make_directions(params_, n_, fd_order, h_), params_.diffusion()),
      initial_(std::move(initial)),
      mode_(mode),
      exact_(std::move(exact)),
      custom_(std::move(custom)) {
  params_.validate(mode_ != SourceMode::analytic_manufactured);
  if (initial_.dims() != n_) throw DimensionError("initial state does not match the grid");
  for (std::size_t mu = 0; mu < n_.size(); ++mu) {
    std::vector<double> x(n_[mu]);
    for (std::size_t j = 0; j < n_[mu]; ++j) {
      x[j] = params_.domain[mu].a + static_cast<double>(j + 1) * h_[mu];
    }
    nodes_.push_back(std::move(x));
  }
  if (exact_ && exact_->factors.size() != n_.size()) {
    throw DimensionError("exact solution needs one spatial factor per direction");
  }
  if ((mode_ == SourceMode::analytic_manufactured || mode_ == SourceMode::discrete_manufactured) &&
      !exact_) {
    throw ConfigError("manufactured source requires an exact solution");
  }
  if (mode_ == SourceMode::custom && !custom_) {
    throw ConfigError("custom source mode requires a source callback");
  }
  if (exact_) build_source();
}

void GridProblem::build_source() {
  std::vector<std::vector<double>> samples;
  for (std::size_t mu = 0; mu < n_.size(); ++mu) {
    std::vector<double> s(n_[mu]);
    for (std::size_t j = 0; j < n_[mu]; ++j) s[j] = exact_->factors[mu](nodes_[mu][j]);
    samples.push_back(std::move(s));
  }
  spatial_ = separable_samples(samples);
  if (mode_ == SourceMode::discrete_manufactured) {
    linear_ = apply_K(op_, spatial_);
  } else if (mode_ == SourceMode::analytic_manufactured) {
    linear_ = CTensor<double>(n_);
    for (std::size_t mu = 0; mu < n_.size(); ++mu) {
      std::vector<std::vector<double>> term = samples;
      for (std::size_t j = 0; j < n_[mu]; ++j) {
        term[mu][j] = riesz_exact_poly(exact_->factors[mu], params_.alphas[mu], nodes_[mu][j]);
      }
      const CTensor<double> part = separable_samples(term);
      for (std::size_t j = 0; j < linear_.size(); ++j) linear_[j] += part[j];
    }
    for (auto& z : linear_.values()) z *= params_.diffusion();
  }
}

CTensor<double> GridProblem::exact(double t) const {
  if (!exact_) throw ConfigError("problem '" + name_ + "' has no exact solution");
  const std::complex<double> a = exact_->time_factor(t);
  CTensor<double> out(n_);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = a * spatial_[j];
  return out;
}

GridProblem::SourceCoeffs GridProblem::source_coeffs(double t) const {
  const std::complex<double> a = exact_->time_factor(t);
  const std::complex<double> da = exact_->time_derivative(t);
  return {da - params_.gamma * a, -a, params_.cubic() * std::norm(a) * a};
}

std::complex<double> GridProblem::source_at(double t, std::size_t j) const {
  switch (mode_) {
    case SourceMode::none: return {0.0, 0.0};
    case SourceMode::custom:
      if (!(custom_time_ == t)) {
        if (!custom_buf_.same_shape(initial_)) custom_buf_ = CTensor<double>(n_);
        custom_(t, custom_buf_);
        custom_time_ = t;
      }
      return custom_buf_[j];
    default: return manufactured_at(source_coeffs(t), j);
  }
}

CTensor<double> manufactured_source(const GridProblem& problem, double t) {
  CTensor<double> out(problem.dims());
  const SourceMode mode = problem.source_mode();
  if (mode == SourceMode::analytic_manufactured || mode == SourceMode::discrete_manufactured) {
    const auto c = problem.source_coeffs(t);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = problem.manufactured_at(c, j);
  } else {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = problem.source_at(t, j);
  }
  return out;
}

template <typename Real>
void nonlinear_g_into(const GridProblem& problem, double t, const CTensor<Real>& u,
                      CTensor<Real>& out) {
  if (u.dims() != problem.dims()) throw DimensionError("nonlinear_g: dims mismatch");
  if (!out.same_shape(u)) out = CTensor<Real>(u.dims());
  const FcgleParams& p = problem.params();
  const std::complex<Real> gamma(static_cast<Real>(p.gamma));
  const std::complex<Real> cubic(p.cubic());
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  if (problem.source_mode() == SourceMode::custom) {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const std::complex<Real> z = u[j];
      out[j] = gamma * z - cubic * std::norm(z) * z +
               std::complex<Real>(problem.source_at(t, static_cast<std::size_t>(j)));
    }
    return;
  }
  if (!problem.has_source()) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const std::complex<Real> z = u[j];
      out[j] = gamma * z - cubic * std::norm(z) * z;
    }
    return;
  }
  const auto c = problem.source_coeffs(t);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const std::complex<Real> z = u[j];
    const std::complex<double> s = problem.manufactured_at(c, static_cast<std::size_t>(j));
    out[j] = gamma * z - cubic * std::norm(z) * z + std::complex<Real>(s);
  }
}

template <typename Real>
CTensor<Real> nonlinear_g(const GridProblem& problem, double t, const CTensor<Real>& u) {
  CTensor<Real> out;
  nonlinear_g_into(problem, t, u, out);
  return out;
}

std::complex<double> exact_flow_scalar(const FcgleParams& params, double t,
                                       std::complex<double> w) {
  const double z = 2.0 * params.gamma * t;
  const double phi1 = (z == 0.0) ? 1.0 : std::expm1(z) / z;
  const double arg = 1.0 + 2.0 * t * phi1 * params.kappa * std::norm(w);
  const std::complex<double> expo =
      t * params.gamma - params.cubic() / (2.0 * params.kappa) * std::log(arg);
  return std::exp(expo) * w;
}

template <typename Real>
void exact_flow_inplace(const FcgleParams& params, double t, CTensor<Real>& w) {
  const double z = 2.0 * params.gamma * t;
  const double phi1 = (z == 0.0) ? 1.0 : std::expm1(z) / z;
  const double lin = t * params.gamma;
  const double scale = 2.0 * t * phi1 * params.kappa;
  const std::complex<double> c = params.cubic() / (2.0 * params.kappa);
  const auto n = static_cast<std::ptrdiff_t>(w.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const std::complex<double> v(w[j]);
    const double arg = 1.0 + scale * std::norm(v);
    w[j] = std::complex<Real>(std::exp(lin - c * std::log(arg)) * v);
  }
}

template <typename Real>
CTensor<Real> exact_flow(const FcgleParams& params, double t, const CTensor<Real>& w) {
  CTensor<Real> out = w;
  exact_flow_inplace(params, t, out);
  return out;
}

double sech(double x) {
  const double e = std::exp(-std::abs(x));
  return 2.0 * e / (1.0 + e * e);
}

namespace {

FcgleParams example_params(std::size_t d, double gamma, double kappa, double zeta,
                           Interval iv) {
  if (d != 2 && d != 3) throw DomainError("examples are defined for d = 2 or d = 3");
  FcgleParams p;
  p.nu = 1.0;
  p.eta = 1.0;
  p.gamma = gamma;
  p.kappa = kappa;
  p.zeta = zeta;
  p.alphas = {1.2, 1.8};
  if (d == 3) p.alphas.push_back(1.5);
  p.domain.assign(d, iv);
  p.final_time = 1.0;
  return p;
}

}  // namespace

GridProblem example1_setup(std::size_t d, const std::vector<std::size_t>& n, int fd_order,
                           SourceMode mode) {
  FcgleParams p = example_params(d, 3.0, 1.0, 2.0, {-1.0, 1.0});
  if (n.size() != d) throw DimensionError("example1: one point count per direction");
  if (mode == SourceMode::custom) throw ConfigError("example1 has no custom source");
  SeparableSolution sol;
  sol.time_factor = [](double t) { return std::exp(std::complex<double>(0.0, -t)); };
  sol.time_derivative = [](double t) {
    return std::complex<double>(0.0, -1.0) * std::exp(std::complex<double>(0.0, -t));
  };
  for (std::size_t mu = 0; mu < d; ++mu) {
    sol.factors.push_back(BoundaryVanishingPoly::bump(-1.0, 1.0, 4));
  }
  // u0 = u_exact(0); built after the grid is known.
  Dims dims(n.begin(), n.end());
  std::vector<std::vector<double>> samples;
  for (std::size_t mu = 0; mu < d; ++mu) {
    const double h = 2.0 / static_cast<double>(n[mu] + 1);
    std::vector<double> s(n[mu]);
    for (std::size_t j = 0; j < n[mu]; ++j) {
      const double x = -1.0 + static_cast<double>(j + 1) * h;
      s[j] = sol.factors[mu](x);
    }
    samples.push_back(std::move(s));
  }
  CTensor<double> u0 = separable_samples(samples);
  return GridProblem("example1", std::move(p), dims, fd_order, std::move(u0), mode,
                     std::move(sol));
}

GridProblem example1_setup(std::size_t d, std::size_t n, int fd_order, SourceMode mode) {
  return example1_setup(d, std::vector<std::size_t>(d, n), fd_order, mode);
}

GridProblem example2_setup(std::size_t d, const std::vector<std::size_t>& n, int fd_order) {
  FcgleParams p = example_params(d, 1.0, 1.0, 1.0, {-10.0, 10.0});
  if (n.size() != d) throw DimensionError("example2: one point count per direction");
  Dims dims(n.begin(), n.end());
  CTensor<double> u0(dims);
  std::vector<std::vector<std::complex<double>>> f;
  for (std::size_t mu = 0; mu < d; ++mu) {
    const double h = 20.0 / static_cast<double>(n[mu] + 1);
    std::vector<std::complex<double>> s(n[mu]);
    for (std::size_t j = 0; j < n[mu]; ++j) {
      const double x = -10.0 + static_cast<double>(j + 1) * h;
      s[j] = sech(x) * std::exp(std::complex<double>(0.0, x));
    }
    f.push_back(std::move(s));
  }
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t j = 0; j < u0.size(); ++j) {
    std::complex<double> v(1.0, 0.0);
    for (std::size_t mu = 0; mu < d; ++mu) v *= f[mu][idx[mu]];
    u0[j] = v;
    for (std::size_t mu = 0; mu < d; ++mu) {
      if (++idx[mu] < dims[mu]) break;
      idx[mu] = 0;
    }
  }
  return GridProblem("example2", std::move(p), dims, fd_order, std::move(u0), SourceMode::none);
}

GridProblem example2_setup(std::size_t d, std::size_t n, int fd_order) {
  return example2_setup(d, std::vector<std::size_t>(d, n), fd_order);
}

GridProblem custom_setup(FcgleParams params, const std::vector<std::size_t>& n, int fd_order,
                         const std::string& initial_family) {
  const std::size_t d = params.alphas.size();
  if (n.size() != d || params.domain.size() != d) {
    throw DimensionError("custom problem: one alpha, interval and point count per direction");
  }
  const bool bump = initial_family == "example1";
  if (!bump && initial_family != "example2") {
    throw ConfigError("unknown initial family '" + initial_family + "'");
  }
  Dims dims(n.begin(), n.end());
  std::vector<std::vector<std::complex<double>>> f;
  for (std::size_t mu = 0; mu < d; ++mu) {
    const auto [a, b] = params.domain[mu];
    if (!(b > a)) throw DomainError("custom problem: empty interval");
    const double h = (b - a) / static_cast<double>(n[mu] + 1);
    const auto poly = BoundaryVanishingPoly::bump(a, b, 4);
    std::vector<std::complex<double>> s(n[mu]);
    for (std::size_t j = 0; j < n[mu]; ++j) {
      const double x = a + static_cast<double>(j + 1) * h;
      s[j] = bump ? std::complex<double>(poly(x)) : sech(x) * std::exp(std::complex<double>(0.0, x));
    }
    f.push_back(std::move(s));
  }
  CTensor<double> u0(dims);
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t j = 0; j < u0.size(); ++j) {
    std::complex<double> v(1.0, 0.0);
    for (std::size_t mu = 0; mu < d; ++mu) v *= f[mu][idx[mu]];
    u0[j] = v;
    for (std::size_t mu = 0; mu < d; ++mu) {
      if (++idx[mu] < dims[mu]) break;
      idx[mu] = 0;
    }
  }
  return GridProblem("custom", std::move(params), dims, fd_order, std::move(u0), SourceMode::none);
}

template <typename Real>
double discrete_l2(const CTensor<Real>& u, const std::vector<double>& h) {
  if (h.size() != u.order()) throw DimensionError("discrete_l2: one step per direction");
  double w = 1.0;
  for (double s : h) w *= s;
  double acc = 0.0;
  for (const auto& z : u.values()) acc += std::norm(std::complex<double>(z));
  return std::sqrt(w * acc);
}

template <typename Real, typename RefReal>
double discrete_l2_error(const CTensor<Real>& u, const CTensor<RefReal>& ref,
                         const std::vector<double>& h) {
  if (u.dims() != ref.dims()) throw DimensionError("discrete_l2_error: dims mismatch");
  if (h.size() != u.order()) throw DimensionError("discrete_l2_error: one step per direction");
  double w = 1.0;
  for (double s : h) w *= s;
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    acc += std::norm(std::complex<double>(u[j]) - std::complex<double>(ref[j]));
  }
  return std::sqrt(w * acc);
}

#define FCGLE_INSTANTIATE_PROBLEM(Real)                                                        \
  template void nonlinear_g_into(const GridProblem&, double, const CTensor<Real>&,             \
                                 CTensor<Real>&);                                              \
  template CTensor<Real> nonlinear_g(const GridProblem&, double, const CTensor<Real>&);        \
  template void exact_flow_inplace(const FcgleParams&, double, CTensor<Real>&);                \
  template CTensor<Real> exact_flow(const FcgleParams&, double, const CTensor<Real>&);         \
  template double discrete_l2(const CTensor<Real>&, const std::vector<double>&);

FCGLE_INSTANTIATE_PROBLEM(float)
FCGLE_INSTANTIATE_PROBLEM(double)

template double discrete_l2_error(const CTensor<double>&, const CTensor<double>&,
                                  const std::vector<double>&);
template double discrete_l2_error(const CTensor<float>&, const CTensor<double>&,
                                  const std::vector<double>&);
template double discrete_l2_error(const CTensor<float>&, const CTensor<float>&,
                                  const std::vector<double>&);

#undef FCGLE_INSTANTIATE_PROBLEM

}  // namespace fcgle
