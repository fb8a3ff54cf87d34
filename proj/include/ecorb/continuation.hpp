#pragma once

#include <string>
#include <vector>

#include "ecorb/ecfinder.hpp"
#include "ecorb/system.hpp"

namespace ecorb {

// The continuation parameter is C for the restricted problem and K for Hill;
// both are called "energy" below and are passed to a SystemFactory.

struct BranchPoint {
  double energy = 0;
  double theta0 = 0;
  double tau_star = 0;
  double collision_residual = 0;
  double momentum_residual = 0;
};

struct FamilyBranch {
  int m = 0;
  std::string label;
  std::vector<BranchPoint> points;  // ascending energy
  bool terminated = false;
  std::string reason;
};

struct StepControl {
  double step = 0.01;
  double min_step = 1e-6;
  double max_step = 0.05;
  // half-width of the initial bracket search around the prediction
  double window = 2e-3;
};

FamilyBranch continue_family(const SystemFactory& factory, int n, double e_start, double e_end,
                             double theta_seed, int m, const StepControl& ctl,
                             const FindConfig& cfg);

struct BifurcationEvent {
  double value = 0;  // C or K at the event
  std::string kind;  // tangency_birth, pitchfork_from_branch, collapse
  std::vector<double> theta0_at;
  int n = 1;
  double mu = 0;
  int count_above = 0;
  int count_below = 0;
};

struct BifurcationConfig {
  double step = 0.01;
  double tol = 1e-8;
  bool stop_at_first = false;
  FindConfig find{};
};

struct SweepSample {
  double energy;
  int count;
};

struct BifurcationReport {
  std::vector<BifurcationEvent> events;  // descending energy
  std::vector<SweepSample> sweep;
  bool has_hat = false;
  double hat = 0;  // largest energy at which more than four roots appear
};

BifurcationReport detect_bifurcations(const SystemFactory& factory, int n, double e_min,
                                      double e_max, const BifurcationConfig& cfg);
BifurcationReport detect_bifurcations(double mu, int n, double c_min, double c_max,
                                      const BifurcationConfig& cfg);

struct Diagram {
  std::string system;
  double mu = 0;
  int n = 1;
  std::vector<double> theta0;
  std::vector<double> energy;  // ascending
  std::vector<std::vector<double>> M;  // M[i][j] at energy[i], theta0[j]
  std::vector<std::vector<bool>> ok;
  IntegratorConfig integ{};
};

Diagram diagram(const SystemFactory& factory, int n, int theta_grid,
                const std::vector<double>& energies, const IntegratorConfig& cfg, int jobs = 1);

struct CHatPoint {
  double mu = 0;
  bool found = false;
  double C_hat = 0, K_hat = 0, L_hat = 0;
};

std::vector<CHatPoint> c_hat_curve(const std::vector<double>& mus, int n, double c_max,
                                   const BifurcationConfig& cfg);

}  // namespace ecorb
