#include "ecorb/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "ecorb/dynamics.hpp"
#include "ecorb/parallel.hpp"

namespace ecorb {

namespace {

double momentum(const EjectionSystem& sys, int n, double theta, const IntegratorConfig& cfg) {
  return momentum_at_nth_min(sys, n, theta, cfg).M;
}

// Root of M nearest to theta_p inside [theta_p - w, theta_p + w], sampled on
// a small local grid.
std::optional<double> local_root(const EjectionSystem& sys, int n, double theta_p, double w,
                                 const FindConfig& cfg) {
  constexpr int K = 8;
  std::vector<double> th(2 * K + 1), M(2 * K + 1);
  for (int i = 0; i <= 2 * K; ++i) th[i] = theta_p - w + w * i / K;
  parallel_for(th.size(), cfg.jobs, [&](std::size_t i) { M[i] = momentum(sys, n, th[i], cfg.integ); });
  std::optional<Bracket> best;
  double best_d = 0;
  for (int i = 0; i < 2 * K; ++i) {
    if (std::signbit(M[i]) == std::signbit(M[i + 1])) continue;
    const double d = std::abs(0.5 * (th[i] + th[i + 1]) - theta_p);
    if (!best || d < best_d) {
      best = Bracket{th[i], th[i + 1], M[i], M[i + 1]};
      best_d = d;
    }
  }
  if (!best) return std::nullopt;
  return bisect_root(sys, n, *best, cfg.integ, cfg.theta_tol);
}

BranchPoint make_point(const EjectionSystem& sys, int n, double energy, double theta,
                       const FindConfig& cfg) {
  const Certification c = certify_collision(sys, n, theta, cfg.integ, cfg.certify_tol);
  BranchPoint p;
  p.energy = energy;
  p.theta0 = wrap_pi(theta);
  p.tau_star = c.tau_star;
  p.collision_residual = c.collision_residual;
  p.momentum_residual = std::abs(angular_momentum(c.state));
  return p;
}

struct RootSet {
  std::vector<double> theta;  // sorted in [0, pi)
};

RootSet root_set(const EjectionSystem& sys, int n, const FindConfig& cfg) {
  RootSet r;
  for (const Bracket& b : bracket_roots(sys, n, cfg).brackets) r.theta.push_back(wrap_pi(0.5 * (b.a + b.b)));
  std::sort(r.theta.begin(), r.theta.end());
  return r;
}

// Groups of mutually close roots in the larger set; each group is the site
// of one event (two roots for a tangency, three for a pitchfork).
std::vector<std::vector<double>> close_clusters(const std::vector<double>& th) {
  std::vector<std::vector<double>> out;
  const std::size_t N = th.size();
  if (N < 2) return out;
  auto gap = [&](std::size_t i) {
    const double a = th[i], b = th[(i + 1) % N] + (i + 1 == N ? pi : 0.0);
    return b - a;
  };
  double g_min = pi;
  for (std::size_t i = 0; i < N; ++i) g_min = std::min(g_min, gap(i));
  const double thr = std::max(20.0 * g_min, 1e-9);
  // start at a gap that is wide, so clusters do not straddle the seam
  std::size_t start = 0;
  for (std::size_t i = 0; i < N; ++i)
    if (gap(i) >= thr) {
      start = (i + 1) % N;
      break;
    }
  std::vector<double> cur{th[start]};
  for (std::size_t k = 1; k <= N; ++k) {
    const std::size_t prev = (start + k - 1) % N;
    if (k < N && gap(prev) < thr) {
      cur.push_back(th[(start + k) % N]);
      continue;
    }
    if (cur.size() >= 2) out.push_back(cur);
    if (k < N) cur = {th[(start + k) % N]};
  }
  return out;
}

double cluster_center(const std::vector<double>& c) {
  // members are consecutive on the circle; unwrap relative to the first
  double sum = 0;
  for (double t : c) sum += t < c.front() ? t + pi : t;
  return wrap_pi(sum / double(c.size()));
}

BifurcationEvent classify(const EjectionSystem& above, const EjectionSystem& below, int n,
                          double value, int count_above, int count_below, const FindConfig& cfg) {
  BifurcationEvent ev;
  ev.value = value;
  ev.n = n;
  ev.mu = above.mu();
  ev.count_above = count_above;
  ev.count_below = count_below;
  const bool birth = count_below > count_above;
  const RootSet big = root_set(birth ? below : above, n, cfg);
  bool pitchfork = false;
  for (const auto& c : close_clusters(big.theta)) {
    ev.theta0_at.push_back(cluster_center(c));
    if (c.size() % 2 == 1) pitchfork = true;
  }
  if (!birth)
    ev.kind = "collapse";
  else
    ev.kind = pitchfork ? "pitchfork_from_branch" : "tangency_birth";
  return ev;
}

}  // namespace

FamilyBranch continue_family(const SystemFactory& factory, int n, double e_start, double e_end,
                             double theta_seed, int m, const StepControl& ctl,
                             const FindConfig& cfg) {
  if (!(ctl.step > 0 && ctl.min_step > 0 && ctl.min_step <= ctl.step && ctl.window > 0))
    throw DomainError("invalid step control");
  FamilyBranch br;
  br.m = m;
  br.label = family_name(((m % 4) + 4) % 4);

  auto sys0 = factory(e_start);
  std::optional<double> seed;
  for (double w = ctl.window; w <= pi / 8 && !seed; w *= 4) seed = local_root(*sys0, n, theta_seed, w, cfg);
  if (!seed) throw NumericError("no root of M near the seed angle at the starting energy");
  BranchPoint p0 = make_point(*sys0, n, e_start, *seed, cfg);
  if (p0.collision_residual > cfg.certify_threshold)
    throw NumericError("seed root fails collision certification");
  br.points.push_back(p0);

  const double dir = e_end < e_start ? -1.0 : 1.0;
  double e = e_start, theta = *seed, slope = 0.0, h = ctl.step;
  while (dir * (e_end - e) > 1e-15 * (1.0 + std::abs(e))) {
    const double hh = std::min(h, std::abs(e_end - e));
    const double e_new = std::abs(e_end - e) <= h ? e_end : e + dir * hh;
    const double predicted = theta + slope * (e_new - e);
    const double w = std::max(ctl.window, 2.0 * std::abs(predicted - theta));
    auto sys = factory(e_new);
    std::optional<double> root = local_root(*sys, n, predicted, w, cfg);
    const bool continuous =
        root && std::abs(*root - theta) <= 10.0 * std::abs(predicted - theta) + ctl.window;
    if (!continuous) {
      h *= 0.5;
      if (h < ctl.min_step) {
        std::ostringstream os;
        os.precision(12);
        os << "branch lost below energy " << e << ": no root in the predicted bracket";
        br.terminated = true;
        br.reason = os.str();
        break;
      }
      continue;
    }
    br.points.push_back(make_point(*sys, n, e_new, *root, cfg));
    slope = (*root - theta) / (e_new - e);
    theta = *root;
    e = e_new;
    h = std::min(2.0 * h, ctl.step);
  }
  if (!br.terminated) br.reason = "reached end of range";
  std::sort(br.points.begin(), br.points.end(),
            [](const BranchPoint& a, const BranchPoint& b) { return a.energy < b.energy; });
  return br;
}

BifurcationReport detect_bifurcations(const SystemFactory& factory, int n, double e_min,
                                      double e_max, const BifurcationConfig& cfg) {
  if (!(e_max > e_min)) throw DomainError("need e_min < e_max");
  if (!(cfg.step > 0 && cfg.tol > 0)) throw DomainError("step and tol must be positive");
  auto count = [&](double e) { return count_roots(*factory(e), n, cfg.find); };

  BifurcationReport rep;
  double e_hi = e_max;
  int c_hi = count(e_hi);
  rep.sweep.push_back({e_hi, c_hi});
  const long steps = long(std::ceil((e_max - e_min) / cfg.step - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double e_lo = k == steps ? e_min : e_max - double(k) * cfg.step;
    const int c_lo = count(e_lo);
    rep.sweep.push_back({e_lo, c_lo});
    // several events may share one sweep interval; peel them off from the top
    while (c_lo != c_hi) {
      double lo = e_lo, hi = e_hi;
      int c_at_lo = c_lo;
      while (hi - lo > cfg.tol) {
        const double mid = 0.5 * (lo + hi);
        const int cm = count(mid);
        if (cm == c_hi) {
          hi = mid;
        } else {
          lo = mid;
          c_at_lo = cm;
        }
      }
      BifurcationEvent ev =
          classify(*factory(hi), *factory(lo), n, 0.5 * (lo + hi), c_hi, c_at_lo, cfg.find);
      rep.events.push_back(ev);
      if (!rep.has_hat && c_at_lo > 4) {
        rep.has_hat = true;
        rep.hat = ev.value;
      }
      if (cfg.stop_at_first && rep.has_hat) return rep;
      e_hi = lo;
      c_hi = c_at_lo;
      if (lo == e_lo) break;
    }
    e_hi = e_lo;
    c_hi = c_lo;
  }
  return rep;
}

BifurcationReport detect_bifurcations(double mu, int n, double c_min, double c_max,
                                      const BifurcationConfig& cfg) {
  return detect_bifurcations(rtbp_factory(mu), n, c_min, c_max, cfg);
}

Diagram diagram(const SystemFactory& factory, int n, int theta_grid,
                const std::vector<double>& energies, const IntegratorConfig& cfg, int jobs) {
  if (theta_grid < 16) throw DomainError("theta grid must be >= 16");
  Diagram d;
  d.n = n;
  d.integ = cfg;
  d.energy = energies;
  std::sort(d.energy.begin(), d.energy.end());
  for (int j = 0; j < theta_grid; ++j) d.theta0.push_back(pi * j / theta_grid);
  d.M.assign(d.energy.size(), std::vector<double>(theta_grid, 0.0));
  d.ok.assign(d.energy.size(), std::vector<bool>(theta_grid, true));
  for (std::size_t i = 0; i < d.energy.size(); ++i) {
    auto sys = factory(d.energy[i]);
    if (i == 0) {
      d.system = sys->name();
      d.mu = sys->mu();
    }
    const auto row = scan(*sys, n, theta_grid, cfg, jobs);
    for (int j = 0; j < theta_grid; ++j) {
      d.M[i][j] = row[j].M;
      d.ok[i][j] = row[j].ok;
    }
  }
  return d;
}

std::vector<CHatPoint> c_hat_curve(const std::vector<double>& mus, int n, double c_max,
                                   const BifurcationConfig& cfg) {
  std::vector<CHatPoint> out;
  BifurcationConfig c = cfg;
  c.stop_at_first = true;
  for (double mu : mus) {
    CHatPoint p;
    p.mu = mu;
    const BifurcationReport r = detect_bifurcations(mu, n, cl1(mu), c_max, c);
    if (r.has_hat) {
      p.found = true;
      p.C_hat = r.hat;
      p.K_hat = k_from_c(mu, r.hat);
      p.L_hat = p.K_hat / std::pow(double(n), 2.0 / 3.0);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace ecorb
