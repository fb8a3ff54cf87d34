#include "ecorb/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace ecorb {

namespace {

// Forward-mode value/derivative pair in tau.
struct Dual {
  double v, d;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator-(Dual a) { return {-a.v, -a.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator*(double k, Dual a) { return {k * a.v, k * a.d}; }
Dual operator*(Dual a, double k) { return {k * a.v, k * a.d}; }
Dual operator+(double k, Dual a) { return {a.v + k, a.d}; }
Dual operator-(double k, Dual a) { return {k - a.v, -a.d}; }

Dual pw(Dual a, int k) {
  Dual r{1.0, 0.0};
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

struct Pair {
  Dual U, V;
};

Pair coefficient(int j, double tau, double th, double mu) {
  const Dual t{tau, 1.0};
  const Dual s{std::sin(tau), std::cos(tau)};
  const Dual c{std::cos(tau), -std::sin(tau)};
  const double ct = std::cos(th), st = std::sin(th);
  const double ct2 = ct * ct, st2 = st * st;
  const double nu = std::cbrt(1.0 - mu);
  const Dual zero{0.0, 0.0};
  const Dual w = t - c * s;
  switch (j) {
    case 0:
      return {ct * s, st * s};
    case 3:
      return {w * s * st, -(w * s * ct)};
    case 6: {
      const Dual A = w * w * s;
      const Dual B = 15.0 * t * c - (8.0 + 9.0 * pw(c, 2) - 2.0 * pw(c, 4)) * s;
      return {-0.5 * ct * (A - mu * (1.0 - 2.0 * ct2 * ct2) * B),
              -0.5 * st * (A - mu * (1.0 - 2.0 * st2 * st2) * B)};
    }
    case 8: {
      const Dual E = 105.0 * t * c - (48.0 + 87.0 * pw(c, 2) - 38.0 * pw(c, 4) + 8.0 * pw(c, 6)) * s;
      const double k = mu * nu / 6.0;
      return {k * (5.0 * std::pow(ct, 6) - 6.0 * ct2 + 2.0) * ct * E,
              -k * (5.0 * std::pow(st, 6) - 6.0 * st2 + 2.0) * st * E};
    }
    case 9: {
      auto nine = [&](double a2, double a4) {
        const Dual c2 = pw(c, 2), c4 = pw(c, 4), c6 = pw(c, 6);
        const Dual bracket =
            3.0 * t * (23.0 + 144.0 * c2 + 8.0 * c4) * s - (379.0 - 217.0 * c2 - 178.0 * c4 + 16.0 * c6) * c -
            480.0 * a2 * t * (1.0 + 6.0 * c2) * s + 32.0 * a2 * (81.0 - 53.0 * c2 - 32.0 * c4 + 4.0 * c6) * c -
            360.0 * a4 * t * t * c + 240.0 * a4 * t * (3.0 + 15.0 * c2 - c4) * s -
            8.0 * a4 * (374.0 - 257.0 * c2 - 143.0 * c4 + 26.0 * c6) * c;
        return 4.0 * pw(w, 3) * s - mu * bracket;
      };
      return {-(st / 24.0) * nine(ct2, ct2 * ct2), (ct / 24.0) * nine(st2, st2 * st2)};
    }
    case 10: {
      const Dual F = 315.0 * t * c -
                     (128.0 + 325.0 * pw(c, 2) - 210.0 * pw(c, 4) + 88.0 * pw(c, 6) - 16.0 * pw(c, 8)) * s;
      const double k = mu * nu * nu / 8.0;
      auto poly = [](double a2) { return 3.0 - 20.0 * a2 + 30.0 * a2 * a2 - 14.0 * std::pow(a2, 4); };
      return {k * poly(ct2) * ct * F, k * poly(st2) * st * F};
    }
    case 1:
    case 2:
    case 4:
    case 5:
    case 7:
      return {zero, zero};
    default:
      throw DomainError("series order must be in 0..10");
  }
}

}  // namespace

Vec4 u_series(int j, double tau, double theta0, double mu) {
  const Pair p = coefficient(j, tau, theta0, mu);
  return {p.U.v, p.V.v, p.U.d, p.V.d};
}

Vec4 series_state(double tau, double theta0, double eps, double mu, int order) {
  if (order < 0 || order > 10) throw DomainError("series order must be in 0..10");
  Vec4 out{};
  for (int j = 0; j <= order; ++j) {
    const Vec4 c = u_series(j, tau, theta0, mu);
    const double e = std::pow(eps, j);
    for (int i = 0; i < 4; ++i) out[i] += c[i] * e;
  }
  return out;
}

double tau_star_series(int n, double theta0, double eps, double mu, int order) {
  if (order < 0 || order > 10) throw DomainError("series order must be in 0..10");
  const double nu = std::cbrt(1.0 - mu);
  const double N = n, c2 = std::cos(2 * theta0), c4 = std::cos(4 * theta0);
  double t = N * pi;
  if (order >= 6) t += 15.0 * mu * N * pi * (1.0 + 3.0 * c4) / 8.0 * std::pow(eps, 6);
  if (order >= 8) t -= 35.0 * mu * nu * N * pi * c2 * (5.0 * c2 * c2 - 3.0) / 4.0 * std::pow(eps, 8);
  if (order >= 9) t += 15.0 * mu * N * N * pi * pi * std::sin(4 * theta0) / 2.0 * std::pow(eps, 9);
  if (order >= 10)
    t += 315.0 * mu * nu * nu * N * pi * (13.0 - 10.0 * c4 - 35.0 * c4 * c4) / 256.0 * std::pow(eps, 10);
  return t;
}

namespace {

void check_momentum_order(int order) {
  if (order != 6 && order != 8 && order != 9 && order != 10)
    throw DomainError("momentum series order must be 6, 8, 9 or 10");
}

}  // namespace

double momentum_series(int n, double th, double eps, double mu, int order) {
  check_momentum_order(order);
  const double nu = std::cbrt(1.0 - mu), N = n;
  double m = -15.0 * mu * N * pi / 4.0 * std::sin(4 * th) * std::pow(eps, 6);
  if (order >= 8)
    m += 105.0 * mu * nu * N * pi / 64.0 * (std::sin(2 * th) + 5.0 * std::sin(6 * th)) * std::pow(eps, 8);
  if (order >= 9) m += 15.0 * mu * N * N * pi * pi / 2.0 * std::cos(4 * th) * std::pow(eps, 9);
  if (order >= 10)
    m -= 315.0 * mu * nu * nu * N * pi / 128.0 * (2.0 * std::sin(4 * th) + 7.0 * std::sin(8 * th)) *
         std::pow(eps, 10);
  return m;
}

double momentum_series_dtheta(int n, double th, double eps, double mu, int order) {
  check_momentum_order(order);
  const double nu = std::cbrt(1.0 - mu), N = n;
  double m = -15.0 * mu * N * pi * std::cos(4 * th) * std::pow(eps, 6);
  if (order >= 8)
    m += 105.0 * mu * nu * N * pi / 64.0 * (2.0 * std::cos(2 * th) + 30.0 * std::cos(6 * th)) *
         std::pow(eps, 8);
  if (order >= 9) m -= 30.0 * mu * N * N * pi * pi * std::sin(4 * th) * std::pow(eps, 9);
  if (order >= 10)
    m -= 315.0 * mu * nu * nu * N * pi / 128.0 * (8.0 * std::cos(4 * th) + 56.0 * std::cos(8 * th)) *
         std::pow(eps, 10);
  return m;
}

PredictedRoots predicted_roots(int n, double eps, double mu, int order) {
  check_momentum_order(order);
  PredictedRoots out;
  if (mu == 0.0 || eps == 0.0) {
    out.degenerate = true;
    return out;
  }
  auto M = [&](double t) { return momentum_series(n, t, eps, mu, order); };
  auto add = [&](double r) {
    r = std::fmod(r, pi);
    if (r < 0) r += pi;
    for (double x : out.roots) {
      const double d = std::abs(x - r);
      if (std::min(d, pi - d) < 1e-9) return;
    }
    out.roots.push_back(r);
  };
  for (int m = 0; m < 4; ++m) {
    double t = m * pi / 4;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      const double d = momentum_series_dtheta(n, t, eps, mu, order);
      if (d == 0.0) break;
      const double step = M(t) / d;
      t -= step;
      if (std::abs(step) < 1e-14) {
        ok = true;
        break;
      }
    }
    if (ok)
      add(t);
    else
      out.unresolved_seeds.push_back(m);
  }
  if (order >= 8) {
    constexpr int G = 4096;
    for (int i = 0; i < G; ++i) {
      double a = pi * i / G, b = pi * (i + 1) / G;
      double fa = M(a), fb = M(b);
      if (std::signbit(fa) == std::signbit(fb)) continue;
      for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
        const double mid = 0.5 * (a + b), fm = M(mid);
        if (std::signbit(fm) == std::signbit(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      add(0.5 * (a + b));
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  return out;
}

KeplerPoint kepler_lc_ejection(int n, double theta0, double xi, double T) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(xi >= 0)) throw DomainError("xi must be non-negative");
  const double N = n, x3 = xi * xi * xi;
  const double s = std::sin(N * T), c = std::cos(N * T);
  const double t = 2.0 * (T - c * s / N) * x3;
  const double dt = 4.0 * s * s * x3;
  const double phi = theta0 - 0.5 * t;
  const double cp = std::cos(phi), sp = std::sin(phi);
  KeplerPoint k;
  k.t = t;
  k.tau = N * T;
  k.state_hat = {cp * s, sp * s, 0.5 * dt * sp * s + N * cp * c, -0.5 * dt * cp * s + N * sp * c};
  k.state_tau = {k.state_hat[0], k.state_hat[1], k.state_hat[2] / N, k.state_hat[3] / N};
  return k;
}

Vec4 kepler_hat_rhs(const Vec4& z, int n, double xi) {
  const auto [U, V, Ud, Vd] = z;
  const double P = U * U + V * V, x3 = xi * xi * xi, x6 = x3 * x3, n2 = double(n) * n;
  return {Ud, Vd, -n2 * U + 8.0 * P * Vd * x3 + 12.0 * P * P * U * x6,
          -n2 * V - 8.0 * P * Ud * x3 + 12.0 * P * P * V * x6};
}

Mat4 fundamental_matrix_kepler(int n, double theta, double xi, double T) {
  if (n < 1) throw DomainError("n must be >= 1");
  const double N = n;
  const double s = std::sin(N * T), c = std::cos(N * T);
  const double s2 = std::sin(2 * theta), st = std::pow(std::sin(theta), 2), ct = std::pow(std::cos(theta), 2);
  const double x3 = xi * xi * xi, x6 = x3 * x3, x9 = x6 * x3;
  const double B = T * (1 + 2 * c * c) - 3 * c * s / N;
  const double Q = T - c * s / N;
  const double W = 8 - 13 * c * c + 2 * c * c * c * c;
  const double s3 = s * s * s;
  Mat4 a{};
  a[0][0] = c - s2 * (T * c - s * (1 + s * s) / N) * x3 + 2 * st / N * B * s * x6;
  a[0][1] = 2 * (ct * T * c - s * (ct - st * s * s) / N) * x3 - s2 / N * B * s * x6;
  a[0][2] = s / N + s2 / N * Q * s * x3;
  a[0][3] = 2 * st / N * Q * s * x3;
  a[1][0] = -2 * (st * T * c - s * (st - ct * s * s) / N) * x3 - s2 / N * B * s * x6;
  a[1][1] = c + s2 * (T * c - s * (1 + s * s) / N) * x3 + 2 * ct / N * B * s * x6;
  a[1][2] = -2 * ct / N * Q * s * x3;
  a[1][3] = s / N - s2 / N * Q * s * x3;
  a[2][0] = -N * s + s2 * s * (N * T + 3 * c * s) * x3 +
            2 * (st * T * (8 * c * c - 5) * c - s / N * (ct * W + 9 * c * c - 6)) * x6 -
            2 * s2 / N * B * s3 * x9;
  a[2][1] = -2 * (N * ct * T - (1 + 3 * st) * c * s) * s * x3 + s2 * (T * (5 - 8 * c * c) * c - W / N * s) * x6 +
            4 * ct / N * B * s3 * x9;
  a[2][2] = c + s2 * (T * c + (2 - 3 * c * c) / N * s) * x3 - 4 * ct / N * Q * s3 * x6;
  a[2][3] = 2 * (st * Q * c + (2 * st + 1) / N * s3) * x3 - 2 * s2 / N * Q * s3 * x6;
  a[3][0] = 2 * (N * st * T - (1 + 3 * ct) * c * s) * s * x3 + s2 * (T * (5 - 8 * c * c) * c - W / N * s) * x6 -
            4 * st / N * B * s3 * x9;
  a[3][1] = -N * s - s2 * s * (N * T + 3 * c * s) * x3 +
            2 * (-ct * T * (5 - 8 * c * c) * c - s / N * (st * W + 9 * c * c - 6)) * x6 +
            2 * s2 / N * B * s3 * x9;
  a[3][2] = -2 * (ct * Q * c + (2 * ct + 1) / N * s3) * x3 - 2 * s2 / N * Q * s3 * x6;
  a[3][3] = c - s2 * (T * c + (2 - 3 * c * c) / N * s) * x3 - 4 * st / N * Q * s3 * x6;

  // rotation by -t/2 applied to position and velocity blocks
  const double t = 2.0 * (T - c * s / N) * x3;
  const double r = -0.5 * t, cr = std::cos(r), sr = std::sin(r);
  Mat4 X{};
  for (int j = 0; j < 4; ++j) {
    X[0][j] = cr * a[0][j] - sr * a[1][j];
    X[1][j] = sr * a[0][j] + cr * a[1][j];
    X[2][j] = cr * a[2][j] - sr * a[3][j];
    X[3][j] = sr * a[2][j] + cr * a[3][j];
  }
  return X;
}

double hill_scaling_curves(double p, double n) {
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  if (!(n > 0)) throw DomainError("n must be positive");
  return std::pow(2.0 / p, 2.0 / 3.0) * std::pow(n, 2.0 / 3.0);
}

}  // namespace ecorb
