#pragma once

#include <array>
#include <string>
#include <vector>

#include "ecorb/continuation.hpp"
#include "ecorb/dynamics.hpp"
#include "ecorb/ecfinder.hpp"

namespace ecorb {

// K at the two collinear equilibria
inline double hill_k_l() { return std::pow(3.0, 4.0 / 3.0); }

double hill_psi(double x, double y);
double hill_jacobi(const SynodicState& s);
Vec4 hill_rhs(const SynodicState& s);

Vec4 hill_lc_rhs(const LCState& z, double K);
double hill_lc_residual(const LCState& z, double K);
LCState hill_ejection_initial_lc(double theta0);
SynodicPoint hill_lc_to_synodic(const LCState& z);
// LC positions of the duplicated equilibria (+-3^{-1/6}, 0) and (0, +-3^{-1/6})
std::array<std::array<double, 2>, 4> hill_equilibria_lc();

// Scaled Hill field: u = sqrt(2/K) U, tau = 2 sqrt(K) s.
Vec4 hill_scaled_rhs(const NormalizedState& z, double K);
double hill_scaled_residual(const NormalizedState& z, double K);
LCPoint hill_scaled_to_lc(const NormalizedState& z, double tau, double K);

RootReport hill_find_ec(int n, double K, const FindConfig& cfg);

// Descending sweep in K for the root-count events.  The upper end defaults to
// max(1.5 * 2^{2/3} n^{2/3}, 8): for small n the first event lies well above
// the reference curve.  The lower end defaults to half the reference value.
BifurcationReport hill_k_hat(int n, const BifurcationConfig& cfg, double k_min = 0,
                             double k_max = 0);

struct PeriodicFinding {
  double K = 0;
  int n = 1;
  double theta0 = 0;          // special angle hit by a root
  double collision_angle = 0;  // in [0, pi)
  // "self": the orbit closes on itself; "composed": it closes through the
  // root at theta0 + pi/2
  std::string kind;
  std::string families;  // "alpha/gamma" or "beta/delta"
};

struct PeriodicConfig {
  double k_step = 0.005;
  double k_tol = 1e-10;
  // |M| below this at a touching minimum counts as a root
  double zero_tol = 1e-9;
  double match_tol = 1e-4;
  IntegratorConfig integ{};
  int jobs = 1;
};

// Energies in [k_min, k_max] at which a root of M sits exactly on one of the
// angles 0, pi/4, pi/2, 3pi/4, found as sign changes or touching zeros of M
// at those angles.
std::vector<PeriodicFinding> detect_periodic_ec(int n, double k_min, double k_max,
                                                const PeriodicConfig& cfg);

}  // namespace ecorb
