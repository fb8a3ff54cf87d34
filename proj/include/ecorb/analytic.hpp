#pragma once

#include <array>
#include <vector>

#include "ecorb/types.hpp"

namespace ecorb {

// Coefficient j of the eps-expansion of the scaled ejection orbit, returned as
// (U_j, V_j, dU_j/dtau, dV_j/dtau).  Orders 1, 2, 4, 5 and 7 vanish.
Vec4 u_series(int j, double tau, double theta0, double mu);
// Sum of the coefficients up to the given order.
Vec4 series_state(double tau, double theta0, double eps, double mu, int order = 10);

double tau_star_series(int n, double theta0, double eps, double mu, int order = 10);
double momentum_series(int n, double theta0, double eps, double mu, int order = 10);
double momentum_series_dtheta(int n, double theta0, double eps, double mu, int order = 10);

struct PredictedRoots {
  std::vector<double> roots;  // ascending in [0, pi)
  std::vector<int> unresolved_seeds;  // m of seeds whose Newton iteration failed
  bool degenerate = false;  // mu = 0: every angle is a root
};

PredictedRoots predicted_roots(int n, double eps, double mu, int order = 10);

struct KeplerPoint {
  // derivatives with respect to That
  Vec4 state_hat{};
  // same orbit in the scaled time tau = n That
  Vec4 state_tau{};
  double tau = 0;
  double t = 0;
};

// Closed-form ejection orbit of the scaled problem with mu = 0 in the
// n-scaled parameterization (xi = 1/sqrt(L)).
KeplerPoint kepler_lc_ejection(int n, double theta0, double xi, double T);
// Right-hand side of the same system, with derivatives in That.
Vec4 kepler_hat_rhs(const Vec4& z, int n, double xi);

using Mat4 = std::array<std::array<double, 4>, 4>;

// Fundamental matrix of the That system along the closed-form orbit.
Mat4 fundamental_matrix_kepler(int n, double theta0, double xi, double T);

// K on the curve (2/p)^{2/3} n^{2/3}
double hill_scaling_curves(double p, double n);

}  // namespace ecorb
