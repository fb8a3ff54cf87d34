#include "ecorb/dynamics.hpp"

#include <cmath>

namespace ecorb {

namespace {

struct Distances {
  double r1, r2;
};

Distances distances(double x, double y, double mu) {
  Distances d{std::hypot(x - mu, y), std::hypot(x - mu + 1.0, y)};
  if (d.r1 == 0.0 || d.r2 == 0.0)
    throw DomainError("position coincides with a primary");
  return d;
}

double scale_c(double mu, double C) {
  const double D = C - 3.0 * mu;
  if (!(D > 0.0)) throw DomainError("scaled variables need C > 3 mu");
  return D;
}

}  // namespace

double omega(double x, double y, double mu) {
  const auto [r1, r2] = distances(x, y, mu);
  return 0.5 * (x * x + y * y) + (1.0 - mu) / r1 + mu / r2 + 0.5 * mu * (1.0 - mu);
}

double jacobi_synodic(const SynodicState& s, double mu) {
  return 2.0 * omega(s.x, s.y, mu) - s.vx * s.vx - s.vy * s.vy;
}

Vec4 synodic_rhs(const SynodicState& s, double mu) {
  const auto [r1, r2] = distances(s.x, s.y, mu);
  const double a = (1.0 - mu) / (r1 * r1 * r1), b = mu / (r2 * r2 * r2);
  const double ox = s.x - a * (s.x - mu) - b * (s.x - mu + 1.0);
  const double oy = s.y - a * s.y - b * s.y;
  return {s.vx, s.vy, 2.0 * s.vy + ox, -2.0 * s.vx + oy};
}

Vec4 lc_rhs(const LCState& z, double mu, double C) {
  const auto [u, v, up, vp] = z;
  const double rho = u * u + v * v;
  const double r2 = std::hypot(1.0 + u * u - v * v, 2.0 * u * v);
  if (r2 == 0.0) throw DomainError("collision with the second primary");
  const double r23 = r2 * r2 * r2;
  const double fu = 4.0 * mu * u + 16.0 * mu * u * u * u + 12.0 * rho * rho * u +
                    8.0 * mu * u / r2 - 8.0 * mu * u * rho * (rho + 1.0) / r23 - 4.0 * C * u;
  const double fv = 4.0 * mu * v - 16.0 * mu * v * v * v + 12.0 * rho * rho * v +
                    8.0 * mu * v / r2 - 8.0 * mu * v * rho * (rho - 1.0) / r23 - 4.0 * C * v;
  return {up, vp, 8.0 * rho * vp + fu, -8.0 * rho * up + fv};
}

double jacobi_residual_lc(const LCState& z, double mu, double C) {
  const auto [u, v, up, vp] = z;
  const double rho = u * u + v * v;
  const double r2sq = (1.0 + u * u - v * v) * (1.0 + u * u - v * v) + 4.0 * u * u * v * v;
  const double r2 = std::sqrt(r2sq);
  // 8 rho U, with the 1/rho of the potential cancelled analytically
  const double shell = 4.0 * (1.0 - mu) * rho * rho * rho + 4.0 * mu * rho * r2sq +
                       8.0 * (1.0 - mu) + 8.0 * mu * rho / r2 - 4.0 * C * rho;
  return up * up + vp * vp - shell;
}

LCState ejection_initial_lc(double theta0, double mu) {
  if (!(mu < 1.0)) throw DomainError("ejection speed vanishes for mu >= 1");
  const double s = 2.0 * std::sqrt(2.0 * (1.0 - mu));
  return {0.0, 0.0, s * std::cos(theta0), s * std::sin(theta0)};
}

namespace {

struct ScaledTerms {
  double P, p, q, e2, e3, e6, d, R;
};

ScaledTerms scaled_terms(double U, double V, double mu, double K) {
  if (!(K > 0.0)) throw DomainError("K must be positive");
  const double nu = std::cbrt(1.0 - mu);
  ScaledTerms t{};
  t.p = U * U;
  t.q = V * V;
  t.P = t.p + t.q;
  t.e2 = 1.0 / K;
  t.e3 = t.e2 * std::sqrt(t.e2);
  t.e6 = t.e3 * t.e3;
  t.d = 4.0 * t.e2 * ((t.p - t.q) + nu * t.P * t.P * t.e2);
  const double r2sq = 1.0 + nu * t.d;
  if (!(r2sq > 0.0)) throw DomainError("collision with the second primary");
  t.R = std::sqrt(r2sq);
  return t;
}

}  // namespace

Vec4 normalized_rhs_k(const NormalizedState& z, double mu, double K) {
  const auto [U, V, Ud, Vd] = z;
  const ScaledTerms t = scaled_terms(U, V, mu, K);
  const double R = t.R, R3 = R * R * R;
  // (R - 1)/nu, finite as nu -> 0
  const double s = t.d / (1.0 + R);
  const double e4 = t.e2 * t.e2;
  const double t1 = 4.0 * e4 * (t.p - t.q) * s * (R + 2.0) / (R * (1.0 + R)) -
                    8.0 * t.e6 * t.P * t.P / (R * (1.0 + R));
  const double t2 = 4.0 * t.P * e4 * s * (R * R + R + 1.0) / R3;
  const double common = 12.0 * t.P * t.P * t.e6 - 8.0 * mu * t.P * t.P * t.e6 / R3;
  const double Udd = -U + 8.0 * t.P * Vd * t.e3 + common * U + mu * U * (t1 + t2);
  const double Vdd = -V - 8.0 * t.P * Ud * t.e3 + common * V + mu * V * (t1 - t2);
  return {Ud, Vd, Udd, Vdd};
}

Vec4 normalized_rhs(const NormalizedState& z, double mu, double C) {
  scale_c(mu, C);
  if (!(mu < 1.0)) throw DomainError("use normalized_rhs_k for mu = 1");
  return normalized_rhs_k(z, mu, k_from_c(mu, C));
}

double normalized_residual_k(const NormalizedState& z, double mu, double K) {
  const auto [U, V, Ud, Vd] = z;
  const ScaledTerms t = scaled_terms(U, V, mu, K);
  const double R = t.R;
  const double shell = 1.0 - t.P + 4.0 * (1.0 - mu) * t.e6 * t.P * t.P * t.P +
                       mu * t.e2 * t.P * t.d * t.d * (R + 2.0) / ((1.0 + R) * (1.0 + R) * R);
  return Ud * Ud + Vd * Vd - shell;
}

double normalized_residual(const NormalizedState& z, double mu, double C) {
  scale_c(mu, C);
  return normalized_residual_k(z, mu, k_from_c(mu, C));
}

NormalizedState ejection_initial_normalized(double theta0) {
  return {0.0, 0.0, std::cos(theta0), std::sin(theta0)};
}

LCPoint normalized_to_lc(const NormalizedState& z, double tau, double mu, double C) {
  const double D = scale_c(mu, C);
  const double a = std::sqrt(2.0 * (1.0 - mu) / D);
  const double b = 2.0 * std::sqrt(D);
  return {{a * z[0], a * z[1], a * b * z[2], a * b * z[3]}, tau / b};
}

NormalizedPoint lc_to_normalized(const LCState& z, double s, double mu, double C) {
  const double D = scale_c(mu, C);
  const double a = std::sqrt(2.0 * (1.0 - mu) / D);
  const double b = 2.0 * std::sqrt(D);
  return {{z[0] / a, z[1] / a, z[2] / (a * b), z[3] / (a * b)}, s * b};
}

SynodicPoint lc_to_synodic(const LCState& z, double mu) {
  const auto [u, v, up, vp] = z;
  SynodicPoint out;
  out.state.x = mu + u * u - v * v;
  out.state.y = 2.0 * u * v;
  const double dtds = 4.0 * (u * u + v * v);
  if (dtds == 0.0) {
    out.velocity_available = false;
    out.state.vx = out.state.vy = std::nan("");
    return out;
  }
  out.state.vx = 2.0 * (u * up - v * vp) / dtds;
  out.state.vy = 2.0 * (up * v + u * vp) / dtds;
  return out;
}

double cl1(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) throw DomainError("cl1 needs 0 < mu < 1");
  // Omega_x on the segment between the primaries; strictly increasing there
  auto f = [mu](double x) {
    return x + (1.0 - mu) / ((mu - x) * (mu - x)) - mu / ((x - mu + 1.0) * (x - mu + 1.0));
  };
  auto df = [mu](double x) {
    return 1.0 + 2.0 * (1.0 - mu) / std::pow(mu - x, 3) + 2.0 * mu / std::pow(x - mu + 1.0, 3);
  };
  double lo = mu - 1.0, hi = mu;
  double x = mu - 1.0 + std::cbrt(mu / 3.0);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double fx = f(x);
    if (fx < 0.0) lo = x; else hi = x;
    double next = x - fx / df(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-13 || hi - lo <= 1e-13) {
      x = next;
      return 2.0 * omega(x, 0.0, mu);
    }
    x = next;
  }
  throw NumericError("cl1: no convergence in 100 iterations");
}

bool in_hill_region(double x, double y, double mu, double C) {
  return 2.0 * omega(x, y, mu) >= C;
}

}  // namespace ecorb
