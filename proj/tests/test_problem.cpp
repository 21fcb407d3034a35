#include <doctest.h>

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>

#include "fcgle/errors.hpp"
#include "fcgle/problem.hpp"
#include "oracles.hpp"

using namespace fcgle;
using cd = std::complex<double>;

namespace {

// w' = gamma w - (kappa + i zeta)|w|^2 w by adaptive Dormand-Prince.
cd ode_flow(const FcgleParams& p, double t, cd w0) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 2>;
  State s{w0.real(), w0.imag()};
  auto rhs = [&](const State& x, State& dx, double) {
    const cd w(x[0], x[1]);
    const cd f = p.gamma * w - p.cubic() * std::norm(w) * w;
    dx = {f.real(), f.imag()};
  };
  ode::integrate_adaptive(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_dopri5<State>()), rhs, s,
                          0.0, t, t / 100);
  return {s[0], s[1]};
}

FcgleParams example2_params() { return example2_setup(2, 8).params(); }

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += std::log(x[i]);
    sy += std::log(y[i]);
    sxx += std::log(x[i]) * std::log(x[i]);
    sxy += std::log(x[i]) * std::log(y[i]);
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST_CASE("nonlinear term") {
  const auto prob = example2_setup(2, 6);
  CTensor<double> zero(prob.dims());
  const auto g0 = nonlinear_g(prob, 0.0, zero);
  for (const auto& z : g0.values()) CHECK(z == cd(0.0));

  FcgleParams p = prob.params();
  p.gamma = 0;
  p.zeta = 0;
  const auto plain = custom_setup(p, {5, 4}, 2, "example2");
  CTensor<double> ones(plain.dims());
  ones.fill(1.0);
  const auto g1 = nonlinear_g(plain, 0.0, ones);
  for (const auto& z : g1.values()) CHECK(std::abs(z + 1.0) < 1e-15);
}

TEST_CASE("nonlinear term with source matches a pointwise loop") {
  const auto prob = example1_setup(2, 4, 2, SourceMode::discrete_manufactured);
  const auto u = oracle::random_tensor(prob.dims());
  const double t = 0.3;
  const auto g = nonlinear_g(prob, t, u);
  const auto s = manufactured_source(prob, t);
  const auto& p = prob.params();
  for (std::size_t j = 0; j < u.size(); ++j) {
    const cd ref = p.gamma * u[j] - cd(p.kappa, p.zeta) * std::norm(u[j]) * u[j] + s[j];
    CHECK(std::abs(g[j] - ref) <= 1e-14 * std::abs(ref));
  }
  const auto gf = nonlinear_g(prob, t, u.cast<float>());
  CHECK(oracle::rel_err(oracle::as_vector(gf), oracle::as_vector(g)) < 1e-6);
}

TEST_CASE("exact flow closed form and identity at t = 0") {
  FcgleParams p = example2_params();
  const cd w(0.3, -1.7);
  CHECK(exact_flow_scalar(p, 0.0, w) == w);
  p.gamma = 0;
  p.zeta = 0;
  p.kappa = 1;
  CHECK(std::abs(exact_flow_scalar(p, 0.5, 1.0)) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("exact flow agrees with an adaptive ODE solver") {
  const auto p = example2_params();
  std::normal_distribution<double> nd;
  double worst = 0;
  for (double tau : {0.1, 0.01}) {
    for (int i = 0; i < 100; ++i) {
      const cd w0(nd(oracle::rng()), nd(oracle::rng()));
      const cd ref = ode_flow(p, tau / 2, w0);
      const double err = std::abs(exact_flow_scalar(p, tau / 2, w0) - ref) / std::abs(ref);
      worst = std::max(worst, err);
      CHECK(err <= 1e-9);
    }
  }
  // Example 1 parameters over a longer interval
  const auto p1 = example1_setup(2, 4, 2, SourceMode::none).params();
  for (double r : {0.1, 1.0, 3.0}) {
    const cd w0 = std::polar(r, 0.7);
    const cd ref = ode_flow(p1, 0.4, w0);
    CHECK(std::abs(exact_flow_scalar(p1, 0.4, w0) - ref) <= 1e-9 * std::abs(ref));
  }
  MESSAGE("worst relative gap " << worst);
}

TEST_CASE("exact flow composes") {
  const auto p = example2_params();
  const auto w = oracle::random_tensor({7, 5});
  const auto a = exact_flow(p, 0.03, exact_flow(p, 0.05, w));
  const auto b = exact_flow(p, 0.08, w);
  CHECK(oracle::rel_err(oracle::as_vector(a), oracle::as_vector(b)) < 1e-11);
  auto c = w;
  exact_flow_inplace(p, 0.08, c);
  CHECK(c == b);
  for (std::size_t j = 0; j < w.size(); ++j) CHECK(std::abs(b[j] - exact_flow_scalar(p, 0.08, w[j])) < 1e-15 * std::abs(b[j]) + 1e-300);
}

TEST_CASE("discrete manufactured source makes the grid samples an exact solution") {
  for (std::size_t d : {2, 3}) {
    for (int fd : {2, 4}) {
      const auto prob = example1_setup(d, d == 2 ? 20 : 8, fd, SourceMode::discrete_manufactured);
      for (double t : {0.0, 0.37, 1.0}) {
        const auto u = prob.exact(t);
        const Eigen::VectorXcd lhs = -cd(0, 1) * oracle::as_vector(u);
        const Eigen::VectorXcd k = oracle::as_vector(apply_K(prob.op(), u));
        const Eigen::VectorXcd g = oracle::as_vector(nonlinear_g(prob, t, u));
        const Eigen::VectorXcd rhs = k + g;
        CHECK(oracle::rel_err(rhs, lhs) < 1e-12);
      }
    }
  }
}

TEST_CASE("manufactured source rotates with the exact solution's phase") {
  const auto prob = example1_setup(2, 10, 2, SourceMode::discrete_manufactured);
  const auto s0 = manufactured_source(prob, 0.0);
  const double t = 0.61;
  const auto st = manufactured_source(prob, t);
  const cd rot = std::exp(cd(0, -t));
  for (std::size_t j = 0; j < s0.size(); ++j) {
    CHECK(std::abs(st[j] - rot * s0[j]) <= 1e-13 * (1 + std::abs(s0[j])));
    CHECK(std::abs(prob.source_at(t, j) - st[j]) <= 1e-13 * (1 + std::abs(st[j])));
  }
  const auto none = example2_setup(2, 6);
  CHECK_FALSE(none.has_source());
  CHECK(none.source_at(0.2, 3) == cd(0.0));
}

TEST_CASE("analytic and discrete sources agree at the finite-difference order") {
  for (int fd : {2, 4}) {
    std::vector<double> hs, gaps;
    for (std::size_t n : {32, 64, 128, 256}) {
      const auto disc = example1_setup(2, n, fd, SourceMode::discrete_manufactured);
      const auto anal = example1_setup(2, n, fd, SourceMode::analytic_manufactured);
      const auto a = manufactured_source(disc, 0.2);
      const auto b = manufactured_source(anal, 0.2);
      // interior max over the middle half, away from the non-smooth zero extension
      double gap = 0;
      for (std::size_t j = 0; j < a.size(); ++j) {
        const auto idx = multi_index(j, disc.dims());
        if (idx[0] < n / 4 || idx[0] >= 3 * n / 4 || idx[1] < n / 4 || idx[1] >= 3 * n / 4) continue;
        gap = std::max(gap, std::abs(a[j] - b[j]));
      }
      hs.push_back(disc.steps()[0]);
      gaps.push_back(gap);
    }
    CAPTURE(fd);
    CHECK(std::abs(fit_slope(hs, gaps) - fd) <= 0.3);
  }
}

TEST_CASE("example 1 setup") {
  const auto p2 = example1_setup(2, 4, 2, SourceMode::discrete_manufactured);
  CHECK(p2.params().alphas == std::vector<double>{1.2, 1.8});
  CHECK(p2.params().gamma == 3.0);
  CHECK(p2.params().zeta == 2.0);
  CHECK(p2.steps()[0] == doctest::Approx(0.4));
  CHECK(p2.nodes()[0][0] == doctest::Approx(-0.6));
  const auto& u0 = p2.initial();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const std::size_t a[] = {i, j};
      const std::size_t b[] = {3 - i, 3 - j};
      CHECK(u0[vec_index(a, u0.dims())].imag() == 0.0);
      CHECK(std::abs(u0[vec_index(a, u0.dims())] - u0[vec_index(b, u0.dims())]) < 1e-15);
    }
  }
  const auto e0 = p2.exact(0.0);
  CHECK(e0 == u0);
  const auto p3 = example1_setup(3, 5, 4, SourceMode::none);
  CHECK(p3.params().alphas == std::vector<double>{1.2, 1.8, 1.5});
  CHECK(p3.dims() == Dims{5, 5, 5});
  CHECK_THROWS(example1_setup(4, 5, 2, SourceMode::none));
}

TEST_CASE("example 2 setup") {
  const auto p = example2_setup(2, 101);
  CHECK_FALSE(p.has_source());
  CHECK(p.params().gamma == 1.0);
  CHECK(p.params().zeta == 1.0);
  const std::size_t mid[] = {50, 50};
  CHECK(std::abs(p.initial()[vec_index(mid, p.dims())]) == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t j = 0; j < p.initial().size(); ++j) {
    const auto idx = multi_index(j, p.dims());
    const double x = p.nodes()[0][idx[0]];
    const double y = p.nodes()[1][idx[1]];
    const cd ref = 1.0 / (std::cosh(x) * std::cosh(y)) * std::exp(cd(0, x + y));
    CHECK(std::abs(p.initial()[j] - ref) < 1e-15);
    if (std::max(std::abs(x), std::abs(y)) > 9.5) CHECK(std::abs(p.initial()[j]) < 1.5e-4);
    if (std::min(std::abs(x), std::abs(y)) > 9.5) CHECK(std::abs(p.initial()[j]) < 2.3e-8);
  }
  CHECK(example2_setup(3, 6).params().alphas == std::vector<double>{1.2, 1.8, 1.5});
  CHECK(sech(10.0) == doctest::Approx(1 / std::cosh(10.0)).epsilon(1e-15));
  CHECK(std::isfinite(sech(800.0)));
}

TEST_CASE("custom problems and parameter validation") {
  FcgleParams p;
  p.alphas = {1.4, 1.6};
  p.domain = {{-2, 2}, {-1, 1}};
  p.gamma = 0.5;
  const auto prob = custom_setup(p, {9, 7}, 4, "example1");
  CHECK(prob.dims() == Dims{9, 7});
  CHECK(prob.source_mode() == SourceMode::none);
  CHECK(prob.steps()[0] == doctest::Approx(0.4));
  CHECK(custom_setup(p, {9, 7}, 2, "example2").initial().size() == 63);
  CHECK_THROWS(custom_setup(p, {9, 7}, 2, "gaussian"));
  FcgleParams bad = p;
  bad.nu = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.kappa = -1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.alphas = {2.0, 1.5};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_NOTHROW(bad.validate(true));
  CHECK(source_mode_from_string("discrete") == SourceMode::discrete_manufactured);
  CHECK(source_mode_from_string(to_string(SourceMode::analytic_manufactured)) ==
        SourceMode::analytic_manufactured);
}

TEST_CASE("discrete L2 norm") {
  const auto prob = example2_setup(2, 30);
  const auto u = oracle::random_tensor(prob.dims());
  CHECK(discrete_l2_error(u, u, prob.steps()) == 0.0);
  const double nu = discrete_l2(u, prob.steps());
  auto v = u;
  for (auto& z : v.values()) z *= cd(0, -3);
  CHECK(discrete_l2(v, prob.steps()) == doctest::Approx(3 * nu).epsilon(1e-14));
  for (std::size_t n : {10, 100, 1000}) {
    CTensor<double> ones(Dims{n, n});
    ones.fill(1.0);
    const double h = 2.0 / static_cast<double>(n + 1);
    CHECK(discrete_l2(ones, {h, h}) == doctest::Approx(h * static_cast<double>(n)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(discrete_l2_error(u, oracle::random_tensor({30, 29}), prob.steps()), DimensionError);
}
