#pragma once

#include <string>
#include <vector>

#include "ecorb/integrator.hpp"
#include "ecorb/system.hpp"
#include "ecorb/types.hpp"

namespace ecorb {

struct MomentumSample {
  double theta0 = 0;
  double M = 0;
  double tau_star = 0;
  double r_min = 0;
  double max_residual = 0;
  bool ok = true;
  std::string error;
};

MomentumSample momentum_at_nth_min(const EjectionSystem& sys, int n, double theta0,
                                   const IntegratorConfig& cfg);
MomentumSample momentum_at_nth_min(const Params& p, double theta0, const IntegratorConfig& cfg);

// Uniform grid over [0, span), span = pi unless given; failures are marked
// per sample instead of aborting the sweep.
std::vector<MomentumSample> scan(const EjectionSystem& sys, int n, int grid,
                                 const IntegratorConfig& cfg, int jobs = 1, double span = pi);
std::vector<MomentumSample> scan(const Params& p, int grid, const IntegratorConfig& cfg,
                                 int jobs = 1);

struct FindConfig {
  int grid = 1024;
  int max_grid = 8192;
  double theta_tol = 1e-12;
  double certify_threshold = 1e-6;
  double certify_tol = 1e-13;
  double tangency_threshold = 1e-8;
  // local re-sampling around small |M| to resolve close root clusters
  bool zoom = true;
  int zoom_points = 32;
  int zoom_levels = 2;
  // scan [0, pi/2) and rotate; valid only for systems with the quarter-turn symmetry
  bool quarter = false;
  IntegratorConfig integ{};
  int jobs = 1;
};

struct ECOrbit {
  double theta0_star = 0;
  int m = 0;  // index of the nearest reference angle m*pi/4
  std::string family;
  std::string system;
  double mu = 0, C = 0, K = 0;
  int n = 1;
  double tau_star = 0;
  double collision_residual = 0;
  double momentum_residual = 0;
  // direction of the velocity at collision, in [0, pi)
  double collision_angle = 0;
  bool certified = false;
  std::string note;  // why a candidate was rejected
};

struct RootReport {
  std::vector<ECOrbit> roots;
  std::vector<ECOrbit> rejected;
  std::vector<double> tangency_candidates;
  int grid_used = 0;
  double max_residual = 0;
  long evaluations = 0;
};

RootReport find_roots(const EjectionSystem& sys, int n, const FindConfig& cfg);
RootReport find_roots(const Params& p, const FindConfig& cfg);

struct Certification {
  double collision_residual = 0;
  double tau_star = 0;
  Vec4 state{};
  double max_residual = 0;
};

Certification certify_collision(const EjectionSystem& sys, int n, double theta0,
                                const IntegratorConfig& cfg, double tol = 1e-13);
Certification certify_collision(const Params& p, double theta0, const IntegratorConfig& cfg,
                                double tol = 1e-13);

struct Bracket {
  double a, b, Ma, Mb;
};

struct BracketScan {
  std::vector<Bracket> brackets;
  std::vector<double> tangency_candidates;
  int grid_used = 0;
  double max_residual = 0;
  long evaluations = 0;
};

// Sign changes of M over [0, pi) with optional zoom; no root refinement.
BracketScan bracket_roots(const EjectionSystem& sys, int n, const FindConfig& cfg);
int count_roots(const EjectionSystem& sys, int n, const FindConfig& cfg);

double bisect_root(const EjectionSystem& sys, int n, Bracket br, const IntegratorConfig& cfg,
                   double tol, long* evaluations = nullptr);

// m = 0..3 -> gamma, delta, alpha, beta
std::string family_name(int m);
void label_families(std::vector<ECOrbit>& roots);

// angle mod pi in [0, pi)
double wrap_pi(double theta);
// smallest distance between two angles on the circle of length pi
double angle_distance_pi(double a, double b);

}  // namespace ecorb
