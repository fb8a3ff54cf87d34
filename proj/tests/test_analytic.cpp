#include <random>

#include "doctest.h"
#include "ecorb/analytic.hpp"
#include "ecorb/dynamics.hpp"
#include "ecorb/ecfinder.hpp"
#include "ecorb/integrator.hpp"
#include "ecorb/system.hpp"
#include "oracles.hpp"

using namespace ecorb;

namespace {

// second tau-derivative of the truncated series by a five-point stencil
Vec4 series_residual(double tau, double th, double eps, double mu) {
  const double h = 1e-3;
  auto d = [&](int i) {
    return (-series_state(tau + 2 * h, th, eps, mu)[i] + 8 * series_state(tau + h, th, eps, mu)[i] -
            8 * series_state(tau - h, th, eps, mu)[i] + series_state(tau - 2 * h, th, eps, mu)[i]) /
           (12 * h);
  };
  const Vec4 z = series_state(tau, th, eps, mu);
  const Vec4 f = normalized_rhs_k(z, mu, 1 / (eps * eps));
  return {d(0) - z[2], d(1) - z[3], d(2) - f[2], d(3) - f[3]};
}

double max_abs(const Vec4& v) {
  return std::max(std::max(std::abs(v[0]), std::abs(v[1])), std::max(std::abs(v[2]), std::abs(v[3])));
}

double momentum_terms(int n, double th, double eps, double mu, int order) {
  const double nu = std::cbrt(1 - mu), e3 = eps * eps * eps, e6 = e3 * e3;
  double M = -(15 * mu * n * pi / 4) * std::sin(4 * th) * e6;
  if (order >= 8)
    M += (105 * mu * nu * n * pi / 64) * (std::sin(2 * th) + 5 * std::sin(6 * th)) * e6 * eps * eps;
  if (order >= 9) M += (15 * mu * n * n * pi * pi / 2) * std::cos(4 * th) * e6 * e3;
  if (order >= 10)
    M -= (315 * mu * nu * nu * n * pi / 128) * (2 * std::sin(4 * th) + 7 * std::sin(8 * th)) * e6 * e6 /
         (eps * eps);
  return M;
}

}  // namespace

TEST_CASE("vanishing and leading series coefficients") {
  for (int j : {1, 2, 4, 5, 7})
    for (double tau : {0.0, 1.3, 4.0}) CHECK(u_series(j, tau, 0.7, 0.4) == Vec4{0, 0, 0, 0});
  for (double th : {0.0, 0.4, 2.1})
    for (double tau : {0.5, 2.0}) {
      const Vec4 u0 = u_series(0, tau, th, 0.3);
      CHECK(u0[0] == doctest::Approx(std::cos(th) * std::sin(tau)).epsilon(1e-15));
      CHECK(u0[1] == doctest::Approx(std::sin(th) * std::sin(tau)).epsilon(1e-15));
      CHECK(u0[2] == doctest::Approx(std::cos(th) * std::cos(tau)).epsilon(1e-15));
      CHECK(series_state(tau, th, 0.0, 0.3) == u0);
    }
  // every coefficient starts at the origin
  for (int j : {3, 6, 8, 9, 10}) {
    const Vec4 u = u_series(j, 0.0, 0.9, 0.5);
    CHECK(std::abs(u[0]) < 1e-15);
    CHECK(std::abs(u[1]) < 1e-15);
  }
  CHECK_THROWS_AS(u_series(11, 0.0, 0.0, 0.1), DomainError);
  CHECK_THROWS_AS(u_series(-1, 0.0, 0.0, 0.1), DomainError);
  CHECK_THROWS_AS(series_state(1.0, 0.0, 0.1, 0.1, 11), DomainError);
}

TEST_CASE("truncated series solves the scaled system to order eps^11") {
  for (double mu : {0.1, 0.9})
    for (int n : {1, 2})
      for (double th : {0.3, 1.2}) {
        double worst[2] = {0, 0};
        int k = 0;
        for (double eps : {0.3, 0.15}) {
          for (int i = 1; i <= 12; ++i) {
            const double tau = n * pi * i / 12.0;
            worst[k] = std::max(worst[k], max_abs(series_residual(tau, th, eps, mu)));
          }
          ++k;
        }
        INFO("mu=" << mu << " n=" << n << " th=" << th << " residuals " << worst[0] << " " << worst[1]);
        CHECK(worst[0] / worst[1] >= 1024.0);
      }
}

TEST_CASE("series agrees with integration") {
  const IntegratorConfig cfg = IntegratorConfig{}.tightened(1e-14);
  for (double mu : {0.1, 0.5, 0.9}) {
    double err[2];
    int k = 0;
    for (double eps : {0.2, 0.1}) {
      auto f = [&](const Vec4& z) { return normalized_rhs_k(z, mu, 1 / (eps * eps)); };
      const Vec4 z = propagate(f, ejection_initial_normalized(0.4), 0.0, 2 * pi, cfg);
      err[k++] = oracle::max_abs_diff(z, series_state(2 * pi, 0.4, eps, mu));
    }
    INFO("mu=" << mu << " " << err[0] << " " << err[1]);
    CHECK(err[0] / err[1] >= 1024.0);
  }
}

TEST_CASE("momentum series matches its closed form") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> Th(0, pi), Mu(0, 1), Ep(0, 0.4);
  for (int k = 0; k < 50; ++k) {
    const double th = Th(rng), mu = Mu(rng), eps = Ep(rng);
    const int n = 1 + k % 4;
    for (int order : {6, 8, 9, 10}) {
      const double want = momentum_terms(n, th, eps, mu, order);
      CHECK(momentum_series(n, th, eps, mu, order) == doctest::Approx(want).epsilon(1e-12).scale(1e-12));
    }
    const double h = 1e-5;
    const double fd = (momentum_series(n, th + h, eps, mu) - momentum_series(n, th - h, eps, mu)) / (2 * h);
    CHECK(momentum_series_dtheta(n, th, eps, mu) == doctest::Approx(fd).epsilon(1e-7).scale(1e-9));
  }
  CHECK(momentum_series(2, 0.3, 0.0, 0.1) == 0.0);
  CHECK(momentum_series(2, 0.3, 0.2, 0.0) == 0.0);
  CHECK_THROWS_AS(momentum_series(1, 0.1, 0.1, 0.1, 7), DomainError);
}

TEST_CASE("momentum series terms under a quarter turn") {
  const double mu = 0.3, eps = 0.25;
  for (double th : {0.1, 0.7, 1.9}) {
    auto term = [&](double t, int order, int prev) {
      const double hi = momentum_series(2, t, eps, mu, order);
      return prev ? hi - momentum_series(2, t, eps, mu, prev) : hi;
    };
    const double q = th + pi / 2;
    CHECK(term(q, 6, 0) == doctest::Approx(term(th, 6, 0)).epsilon(1e-12).scale(1e-12));
    CHECK(term(q, 8, 6) == doctest::Approx(-term(th, 8, 6)).epsilon(1e-10).scale(1e-12));
    CHECK(term(q, 9, 8) == doctest::Approx(term(th, 9, 8)).epsilon(1e-10).scale(1e-12));
    CHECK(term(q, 10, 9) == doctest::Approx(term(th, 10, 9)).epsilon(1e-10).scale(1e-12));
  }
}

TEST_CASE("collision time series") {
  CHECK(tau_star_series(3, 0.2, 0.3, 0.4, 0) == doctest::Approx(3 * pi));
  CHECK(tau_star_series(2, 0.2, 0.0, 0.4) == doctest::Approx(2 * pi));
  CHECK_THROWS_AS(tau_star_series(1, 0.2, 0.1, 0.1, 12), DomainError);
  const IntegratorConfig cfg = IntegratorConfig{}.tightened(1e-14);
  double err[2];
  int k = 0;
  for (double eps : {0.2, 0.1}) {
    RtbpSystem sys(0.5, c_from_k(0.5, 1 / (eps * eps)));
    const MomentumSample s = momentum_at_nth_min(sys, 2, 0.6, cfg);
    err[k++] = std::abs(s.tau_star - tau_star_series(2, 0.6, eps, 0.5));
  }
  INFO(err[0] << " " << err[1]);
  CHECK(err[0] / err[1] >= 1024.0);
}

TEST_CASE("predicted roots") {
  const PredictedRoots r = predicted_roots(2, 0.05, 0.1);
  const PredictedRoots half = predicted_roots(2, 0.025, 0.1);
  REQUIRE(r.roots.size() == 4);
  REQUIRE(half.roots.size() == 4);
  // offsets from m pi/4 shrink at least like eps^2 (eps^3 where the eps^2 part vanishes)
  for (int m = 0; m < 4; ++m) {
    const double d = std::abs(r.roots[m] - m * pi / 4), dh = std::abs(half.roots[m] - m * pi / 4);
    CHECK(d < 0.05 * 0.05);
    if (d > 1e-12) CHECK(d / dh >= 3.0);
  }
  CHECK(r.unresolved_seeds.empty());
  for (double t : r.roots) CHECK(std::abs(momentum_series(2, t, 0.05, 0.1)) < 1e-20);
  CHECK(std::is_sorted(r.roots.begin(), r.roots.end()));
  CHECK(predicted_roots(2, 0.2, 0.0).degenerate);
  CHECK_THROWS_AS(predicted_roots(2, 0.2, 0.1, 7), DomainError);
}

TEST_CASE("Kepler closed form solves its system") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> Th(0, pi), Xi(0.05, 0.3), Tt(0, 2 * pi);
  for (int k = 0; k < 12; ++k) {
    const int n = 1 + k % 3;
    const double th = Th(rng), xi = Xi(rng), T = Tt(rng);
    const KeplerPoint p0 = kepler_lc_ejection(n, th, xi, 0.0);
    CHECK(oracle::max_abs_diff(p0.state_hat, {0, 0, n * std::cos(th), n * std::sin(th)}) < 1e-15);
    auto f = [&](const oracle::V4& z) { return oracle::kepler_hat(z, n, xi); };
    const oracle::V4 num = oracle::rk4(f, p0.state_hat, T, 20000);
    const KeplerPoint p = kepler_lc_ejection(n, th, xi, T);
    CHECK(oracle::max_abs_diff(num, p.state_hat) < 1e-9);
    CHECK(p.tau == doctest::Approx(n * T));
    for (int i = 0; i < 4; ++i) {
      CHECK(kepler_hat_rhs(p.state_hat, n, xi)[i] ==
            doctest::Approx(oracle::kepler_hat(p.state_hat, n, xi)[i]).epsilon(1e-14).scale(1e-14));
      CHECK(p.state_tau[i] == doctest::Approx(i < 2 ? p.state_hat[i] : p.state_hat[i] / n).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(kepler_lc_ejection(0, 0.1, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(kepler_lc_ejection(1, 0.1, -0.1, 1.0), DomainError);
}

TEST_CASE("fundamental matrix along the Kepler orbit") {
  for (int n : {1, 2, 3}) {
    const Mat4 X0 = fundamental_matrix_kepler(n, 0.8, 0.25, 0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(X0[i][j] == (i == j ? 1.0 : 0.0));
  }
  for (auto [n, th, xi, T] : {std::tuple{1, 0.7, 0.2, 1.1}, {2, 0.3, 0.25, 2.5}, {3, 1.9, 0.3, 4.0}}) {
    const Mat4 X = fundamental_matrix_kepler(n, th, xi, T);
    auto f = [&](const oracle::V4& z) { return oracle::kepler_hat(z, n, xi); };
    const oracle::V4 z0{0, 0, n * std::cos(th), n * std::sin(th)};
    const double h = 1e-5;
    for (int j = 0; j < 4; ++j) {
      oracle::V4 a = z0, b = z0;
      a[j] += h;
      b[j] -= h;
      const oracle::V4 fa = oracle::rk4(f, a, T, 40000), fb = oracle::rk4(f, b, T, 40000);
      for (int i = 0; i < 4; ++i) CHECK(X[i][j] == doctest::Approx((fa[i] - fb[i]) / (2 * h)).epsilon(1e-6).scale(1.0));
    }
  }
  CHECK_THROWS_AS(fundamental_matrix_kepler(0, 0.1, 0.1, 1.0), DomainError);
}

TEST_CASE("scaling curves") {
  CHECK(hill_scaling_curves(1.0, 5) == doctest::Approx(std::pow(2.0, 2.0 / 3.0) * std::pow(5.0, 2.0 / 3.0)));
  CHECK(hill_scaling_curves(2.0, 8) == doctest::Approx(4.0));
  CHECK_THROWS_AS(hill_scaling_curves(0.5, 2), DomainError);
  CHECK_THROWS_AS(hill_scaling_curves(1.0, 0), DomainError);
}
