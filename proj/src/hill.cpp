#include "ecorb/hill.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ecorb/analytic.hpp"
#include "ecorb/parallel.hpp"

namespace ecorb {

double hill_psi(double x, double y) {
  const double r = std::hypot(x, y);
  if (r == 0.0) throw DomainError("Hill potential is singular at the origin");
  return 1.5 * x * x + 1.0 / r;
}

double hill_jacobi(const SynodicState& s) {
  return 2.0 * hill_psi(s.x, s.y) - s.vx * s.vx - s.vy * s.vy;
}

Vec4 hill_rhs(const SynodicState& s) {
  const double r = std::hypot(s.x, s.y);
  if (r == 0.0) throw DomainError("Hill field is singular at the origin");
  const double r3 = r * r * r;
  return {s.vx, s.vy, 2.0 * s.vy + 3.0 * s.x - s.x / r3, -2.0 * s.vx - s.y / r3};
}

Vec4 hill_lc_rhs(const LCState& z, double K) {
  const auto [u, v, up, vp] = z;
  const double u2 = u * u, v2 = v * v, rho = u2 + v2;
  const double au = 12.0 * (2.0 * (u2 * u2 - 2.0 * u2 * v2 - v2 * v2) + rho * rho) * u;
  const double av = 12.0 * (2.0 * (v2 * v2 - 2.0 * u2 * v2 - u2 * u2) + rho * rho) * v;
  return {up, vp, 8.0 * rho * vp - 4.0 * K * u + au, -8.0 * rho * up - 4.0 * K * v + av};
}

double hill_lc_residual(const LCState& z, double K) {
  const auto [u, v, up, vp] = z;
  const double rho = u * u + v * v, w = u * u - v * v;
  return up * up + vp * vp - (12.0 * rho * w * w + 8.0 - 4.0 * K * rho);
}

LCState hill_ejection_initial_lc(double theta0) {
  const double a = 2.0 * std::sqrt(2.0);
  return {0.0, 0.0, a * std::cos(theta0), a * std::sin(theta0)};
}

SynodicPoint hill_lc_to_synodic(const LCState& z) { return lc_to_synodic(z, 0.0); }

std::array<std::array<double, 2>, 4> hill_equilibria_lc() {
  const double a = std::pow(3.0, -1.0 / 6.0);
  return {{{a, 0.0}, {-a, 0.0}, {0.0, a}, {0.0, -a}}};
}

Vec4 hill_scaled_rhs(const NormalizedState& z, double K) {
  if (!(K > 0)) throw DomainError("K must be positive");
  const auto [U, V, Ud, Vd] = z;
  const double p = U * U, q = V * V, P = p + q;
  const double e3 = 1.0 / (K * std::sqrt(K)), e6 = e3 * e3;
  const double Udd = -U + 8.0 * P * Vd * e3 + 12.0 * (2.0 * (p * p - 2.0 * p * q - q * q) + P * P) * U * e6;
  const double Vdd = -V - 8.0 * P * Ud * e3 + 12.0 * (2.0 * (q * q - 2.0 * p * q - p * p) + P * P) * V * e6;
  return {Ud, Vd, Udd, Vdd};
}

double hill_scaled_residual(const NormalizedState& z, double K) {
  if (!(K > 0)) throw DomainError("K must be positive");
  const auto [U, V, Ud, Vd] = z;
  const double p = U * U, q = V * V, P = p + q;
  return Ud * Ud + Vd * Vd - (1.0 - P + 12.0 * P * (p - q) * (p - q) / (K * K * K));
}

LCPoint hill_scaled_to_lc(const NormalizedState& z, double tau, double K) {
  if (!(K > 0)) throw DomainError("K must be positive");
  const double a = std::sqrt(2.0 / K), b = 2.0 * std::sqrt(K);
  return {{a * z[0], a * z[1], a * b * z[2], a * b * z[3]}, tau / b};
}

RootReport hill_find_ec(int n, double K, const FindConfig& cfg) {
  HillSystem sys(K);
  return find_roots(sys, n, cfg);
}

BifurcationReport hill_k_hat(int n, const BifurcationConfig& cfg, double k_min, double k_max) {
  if (n < 1) throw DomainError("n must be >= 1");
  const double ref = hill_scaling_curves(1.0, n);
  if (k_max <= 0) k_max = std::max(1.5 * ref, 8.0);
  if (k_min <= 0) k_min = 0.5 * ref;
  return detect_bifurcations(hill_factory(), n, k_min, k_max, cfg);
}

std::vector<PeriodicFinding> detect_periodic_ec(int n, double k_min, double k_max,
                                                const PeriodicConfig& cfg) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(k_max > k_min && k_min > 0)) throw DomainError("need 0 < k_min < k_max");
  if (!(cfg.k_step > 0 && cfg.k_tol > 0)) throw DomainError("k_step and k_tol must be positive");
  auto M = [&](double theta, double K) {
    HillSystem sys(K);
    return momentum_at_nth_min(sys, n, theta, cfg.integ).M;
  };
  // the quarter-turn symmetry makes pi/2 and 3pi/4 copies of 0 and pi/4
  const double specials[2] = {0.0, pi / 4};
  const long steps = long(std::ceil((k_max - k_min) / cfg.k_step - 1e-9));
  std::vector<double> Ks(steps + 1);
  for (long i = 0; i <= steps; ++i) Ks[i] = i == steps ? k_min : k_max - double(i) * cfg.k_step;

  auto bisect = [&](double th, double hi, double lo, double Mhi) {
    while (hi - lo > cfg.k_tol) {
      const double mid = 0.5 * (lo + hi);
      const double Mm = M(th, mid);
      if (std::signbit(Mm) == std::signbit(Mhi)) {
        hi = mid;
        Mhi = Mm;
      } else {
        lo = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  // |M| touching zero without a sign change: golden-section search on |M|
  auto touch = [&](double th, double lo, double hi) -> std::optional<double> {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = M(th, x1), f2 = M(th, x2);
    while (b - a > cfg.k_tol) {
      if (std::signbit(f1) != std::signbit(f2)) return bisect(th, std::max(x1, x2), std::min(x1, x2), x1 > x2 ? f1 : f2);
      if (std::abs(f1) < std::abs(f2)) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = M(th, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = M(th, x2);
      }
    }
    const double K = 0.5 * (a + b);
    if (std::abs(M(th, K)) > cfg.zero_tol) return std::nullopt;
    return K;
  };

  std::vector<PeriodicFinding> out;
  for (double th : specials) {
    std::vector<double> vals(Ks.size());
    parallel_for(Ks.size(), cfg.jobs, [&](std::size_t i) { vals[i] = M(th, Ks[i]); });
    std::vector<double> hits;
    for (std::size_t i = 0; i + 1 < Ks.size(); ++i)
      if (std::signbit(vals[i]) != std::signbit(vals[i + 1])) hits.push_back(bisect(th, Ks[i], Ks[i + 1], vals[i]));
    for (std::size_t i = 1; i + 1 < Ks.size(); ++i) {
      const double m = std::abs(vals[i]);
      const bool same = std::signbit(vals[i - 1]) == std::signbit(vals[i]) &&
                        std::signbit(vals[i]) == std::signbit(vals[i + 1]);
      if (same && m <= std::abs(vals[i - 1]) && m <= std::abs(vals[i + 1]))
        if (auto K = touch(th, Ks[i + 1], Ks[i - 1])) hits.push_back(*K);
    }
    for (double K : hits) {
      HillSystem sys(K);
      const Certification c = certify_collision(sys, n, th, cfg.integ);
      PeriodicFinding f;
      f.K = K;
      f.n = n;
      f.theta0 = th;
      f.collision_angle = wrap_pi(std::atan2(c.state[3], c.state[2]));
      const double d_self = angle_distance_pi(f.collision_angle, th);
      const double d_comp = angle_distance_pi(f.collision_angle, th + pi / 2);
      if (std::min(d_self, d_comp) > cfg.match_tol) continue;
      f.kind = d_self <= d_comp ? "self" : "composed";
      const bool axis = th == 0.0;
      f.families = (axis == (f.kind == "composed")) ? "beta/delta" : "alpha/gamma";
      out.push_back(f);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const PeriodicFinding& a, const PeriodicFinding& b) { return a.K > b.K; });
  return out;
}

}  // namespace ecorb
