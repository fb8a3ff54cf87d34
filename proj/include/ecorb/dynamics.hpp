#pragma once

#include "ecorb/types.hpp"

namespace ecorb {

struct SynodicState {
  double x = 0, y = 0, vx = 0, vy = 0;
};

// (u, v, u', v') with ' = d/ds
using LCState = Vec4;
// (U, V, dU/dtau, dV/dtau)
using NormalizedState = Vec4;

double omega(double x, double y, double mu);
double jacobi_synodic(const SynodicState& s, double mu);
Vec4 synodic_rhs(const SynodicState& s, double mu);

Vec4 lc_rhs(const LCState& z, double mu, double C);
double jacobi_residual_lc(const LCState& z, double mu, double C);
LCState ejection_initial_lc(double theta0, double mu);

// Scaled field in the (mu, K) parameterization; valid on the closed range
// 0 <= mu <= 1, where mu = 1 is the Hill limit.
Vec4 normalized_rhs_k(const NormalizedState& z, double mu, double K);
Vec4 normalized_rhs(const NormalizedState& z, double mu, double C);
// U'^2 + V'^2 minus its value on the energy shell.
double normalized_residual_k(const NormalizedState& z, double mu, double K);
double normalized_residual(const NormalizedState& z, double mu, double C);
NormalizedState ejection_initial_normalized(double theta0);

struct LCPoint {
  LCState z;
  double s;
};
struct NormalizedPoint {
  NormalizedState z;
  double tau;
};
LCPoint normalized_to_lc(const NormalizedState& z, double tau, double mu, double C);
NormalizedPoint lc_to_normalized(const LCState& z, double s, double mu, double C);

struct SynodicPoint {
  SynodicState state;
  bool velocity_available = true;
};
SynodicPoint lc_to_synodic(const LCState& z, double mu);

double cl1(double mu);

// Debug aid only; never used to guard trajectories.
bool in_hill_region(double x, double y, double mu, double C);

}  // namespace ecorb
