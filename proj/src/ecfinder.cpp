#include "ecorb/ecfinder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecorb/dynamics.hpp"
#include "ecorb/parallel.hpp"

namespace ecorb {

namespace {

struct Evaluation {
  EventRecord event;
  double max_residual = 0;
};

// U^2 + V^2 beyond which the orbit is taken to have left the primary; bound
// ejection orbits stay below about 2 in these units.
constexpr double escape_p = 1e4;

Evaluation evaluate(const EjectionSystem& sys, int n, double theta0, const IntegratorConfig& cfg) {
  auto f = [&sys](const Vec4& z) {
    if (z[0] * z[0] + z[1] * z[1] > escape_p)
      throw PropagationError("orbit escaped before the n-th minimum");
    return sys.rhs(z);
  };
  auto monitor = [&sys](const Vec4& z) { return sys.residual(z); };
  TrajectorySummary summary;
  try {
    Evaluation out;
    out.event = propagate_to_nth_min(f, ejection_initial_normalized(theta0), n, cfg, &summary, monitor);
    out.max_residual = summary.max_residual;
    return out;
  } catch (const PropagationError& e) {
    std::ostringstream os;
    os.precision(17);
    os << e.what() << " (system=" << sys.name() << " mu=" << sys.mu() << " K=" << sys.K()
       << " n=" << n << " theta0=" << theta0 << ")";
    throw PropagationError(os.str());
  }
}

MomentumSample to_sample(double theta0, const Evaluation& ev) {
  MomentumSample s;
  s.theta0 = theta0;
  s.M = angular_momentum(ev.event.state);
  s.tau_star = ev.event.tau;
  s.r_min = ev.event.state[0] * ev.event.state[0] + ev.event.state[1] * ev.event.state[1];
  s.max_residual = ev.max_residual;
  return s;
}

MomentumSample safe_sample(const EjectionSystem& sys, int n, double theta0,
                           const IntegratorConfig& cfg) {
  try {
    return to_sample(theta0, evaluate(sys, n, theta0, cfg));
  } catch (const NumericError& e) {
    MomentumSample s;
    s.theta0 = theta0;
    s.ok = false;
    s.M = s.tau_star = s.r_min = std::nan("");
    s.error = e.what();
    return s;
  }
}

bool negative(double m) { return std::signbit(m); }

// ok = false where the n-th minimum does not exist (escape, step failure);
// such points split the circle and never bound a bracket.
struct Point {
  double theta, M;
  bool ok;
};

std::vector<Point> evaluate_points(const EjectionSystem& sys, int n, const std::vector<double>& th,
                                   const FindConfig& cfg, double& worst, long& evals) {
  std::vector<MomentumSample> s(th.size());
  parallel_for(th.size(), cfg.jobs,
               [&](std::size_t i) { s[i] = safe_sample(sys, n, th[i], cfg.integ); });
  std::vector<Point> out;
  out.reserve(th.size());
  for (const auto& x : s) {
    if (x.ok) worst = std::max(worst, x.max_residual);
    out.push_back({x.theta0, x.M, x.ok});
  }
  evals += long(th.size());
  return out;
}

double abs_or_inf(const Point& p) { return p.ok ? std::abs(p.M) : HUGE_VAL; }

// Indices of discrete local minima of |M| on a cyclic sorted point list.
std::vector<std::size_t> abs_minima(const std::vector<Point>& pts, double cutoff) {
  std::vector<std::size_t> idx;
  const std::size_t N = pts.size();
  for (std::size_t i = 0; i < N; ++i) {
    if (!pts[i].ok) continue;
    const double m = std::abs(pts[i].M);
    const double l = abs_or_inf(pts[(i + N - 1) % N]);
    const double r = abs_or_inf(pts[(i + 1) % N]);
    if (m <= l && m <= r && m <= cutoff) idx.push_back(i);
  }
  return idx;
}

BracketScan bracket_span(const EjectionSystem& sys, int n, int N, double span,
                         const FindConfig& cfg) {
  BracketScan out;
  out.grid_used = N;
  std::vector<double> th(N);
  for (int i = 0; i < N; ++i) th[i] = span * i / N;
  std::vector<Point> pts = evaluate_points(sys, n, th, cfg, out.max_residual, out.evaluations);

  if (cfg.zoom) {
    double maxabs = 0;
    for (const auto& p : pts)
      if (p.ok) maxabs = std::max(maxabs, std::abs(p.M));
    const double cutoff = 0.1 * maxabs;
    for (int level = 0; level < cfg.zoom_levels; ++level) {
      const std::size_t P = pts.size();
      std::vector<double> fresh;
      for (std::size_t i : abs_minima(pts, cutoff)) {
        double a = pts[(i + P - 1) % P].theta, b = pts[(i + 1) % P].theta;
        if (a > pts[i].theta) a -= span;
        if (b < pts[i].theta) b += span;
        for (int j = 1; j <= cfg.zoom_points; ++j) {
          double t = a + (b - a) * j / (cfg.zoom_points + 1);
          if (t < 0) t += span;
          if (t >= span) t -= span;
          fresh.push_back(t);
        }
      }
      std::sort(fresh.begin(), fresh.end());
      fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
      if (fresh.empty()) break;
      std::vector<Point> add =
          evaluate_points(sys, n, fresh, cfg, out.max_residual, out.evaluations);
      pts.insert(pts.end(), add.begin(), add.end());
      std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) { return x.theta < y.theta; });
      pts.erase(std::unique(pts.begin(), pts.end(),
                            [](const Point& x, const Point& y) { return x.theta == y.theta; }),
                pts.end());
    }
  }

  const std::size_t P = pts.size();
  for (std::size_t i = 0; i < P; ++i) {
    const Point& a = pts[i];
    Point b = pts[(i + 1) % P];
    if (i + 1 == P) b.theta += span;
    if (a.ok && b.ok && negative(a.M) != negative(b.M)) out.brackets.push_back({a.theta, b.theta, a.M, b.M});
  }
  for (std::size_t i : abs_minima(pts, cfg.tangency_threshold)) {
    const Point& l = pts[(i + P - 1) % P];
    const Point& r = pts[(i + 1) % P];
    const double m = pts[i].M;
    if (l.ok && r.ok && negative(l.M) == negative(m) && negative(r.M) == negative(m))
      out.tangency_candidates.push_back(pts[i].theta);
  }
  return out;
}

void check_config(const EjectionSystem& sys, int n, const FindConfig& cfg) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (cfg.grid < 16) throw DomainError("grid must be >= 16");
  if (cfg.max_grid < cfg.grid) throw DomainError("max_grid must be >= grid");
  if (cfg.zoom_points < 1 || cfg.zoom_levels < 0) throw DomainError("invalid zoom settings");
  if (!(cfg.theta_tol > 0)) throw DomainError("theta_tol must be positive");
  if (cfg.quarter && sys.name() != "hill")
    throw DomainError("quarter-range scan requires the quarter-turn symmetry of the Hill problem");
  cfg.integ.validate();
}

double min_separation(const std::vector<Bracket>& br, double span) {
  if (br.size() < 2) return span;
  double best = span;
  for (std::size_t i = 0; i < br.size(); ++i) {
    const double c0 = 0.5 * (br[i].a + br[i].b);
    const double c1 = 0.5 * (br[(i + 1) % br.size()].a + br[(i + 1) % br.size()].b) +
                      (i + 1 == br.size() ? span : 0.0);
    best = std::min(best, c1 - c0);
  }
  return best;
}

BracketScan bracket_impl(const EjectionSystem& sys, int n, const FindConfig& cfg, bool doubling) {
  check_config(sys, n, cfg);
  const double span = cfg.quarter ? pi / 2 : pi;
  int N = cfg.grid;
  long evals = 0;
  BracketScan out;
  for (;;) {
    const int points = cfg.quarter ? N / 2 : N;
    out = bracket_span(sys, n, points, span, cfg);
    evals += out.evaluations;
    if (!doubling || N >= cfg.max_grid) break;
    if (min_separation(out.brackets, span) >= 4.0 * span / points) break;
    N = std::min(2 * N, cfg.max_grid);
  }
  out.evaluations = evals;
  out.grid_used = N;
  if (cfg.quarter) {
    const std::size_t k = out.brackets.size();
    for (std::size_t i = 0; i < k; ++i) {
      Bracket b = out.brackets[i];
      b.a += span;
      b.b += span;
      out.brackets.push_back(b);
    }
    const std::size_t t = out.tangency_candidates.size();
    for (std::size_t i = 0; i < t; ++i) out.tangency_candidates.push_back(out.tangency_candidates[i] + span);
  }
  return out;
}

}  // namespace

double wrap_pi(double theta) {
  double t = std::fmod(theta, pi);
  if (t < 0) t += pi;
  if (t >= pi) t -= pi;
  return t;
}

double angle_distance_pi(double a, double b) {
  const double d = wrap_pi(a - b);
  return std::min(d, pi - d);
}

MomentumSample momentum_at_nth_min(const EjectionSystem& sys, int n, double theta0,
                                   const IntegratorConfig& cfg) {
  if (n < 1) throw DomainError("n must be >= 1");
  return to_sample(theta0, evaluate(sys, n, theta0, cfg));
}

MomentumSample momentum_at_nth_min(const Params& p, double theta0, const IntegratorConfig& cfg) {
  p.validate();
  RtbpSystem sys(p.mu, p.C);
  return momentum_at_nth_min(sys, p.n, theta0, cfg);
}

std::vector<MomentumSample> scan(const EjectionSystem& sys, int n, int grid,
                                 const IntegratorConfig& cfg, int jobs, double span) {
  if (grid < 16) throw DomainError("grid must be >= 16");
  if (n < 1) throw DomainError("n must be >= 1");
  cfg.validate();
  std::vector<MomentumSample> out(grid);
  parallel_for(std::size_t(grid), jobs, [&](std::size_t i) {
    out[i] = safe_sample(sys, n, span * double(i) / grid, cfg);
  });
  return out;
}

std::vector<MomentumSample> scan(const Params& p, int grid, const IntegratorConfig& cfg, int jobs) {
  p.validate();
  RtbpSystem sys(p.mu, p.C);
  return scan(sys, p.n, grid, cfg, jobs);
}

BracketScan bracket_roots(const EjectionSystem& sys, int n, const FindConfig& cfg) {
  return bracket_impl(sys, n, cfg, false);
}

int count_roots(const EjectionSystem& sys, int n, const FindConfig& cfg) {
  return int(bracket_roots(sys, n, cfg).brackets.size());
}

double bisect_root(const EjectionSystem& sys, int n, Bracket br, const IntegratorConfig& cfg,
                   double tol, long* evaluations) {
  double a = br.a, b = br.b, Ma = br.Ma;
  if (negative(br.Ma) == negative(br.Mb)) throw DomainError("bracket without sign change");
  long evals = 0;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double Mm = angular_momentum(evaluate(sys, n, mid, cfg).event.state);
    ++evals;
    if (negative(Mm) == negative(Ma)) {
      a = mid;
      Ma = Mm;
    } else {
      b = mid;
    }
  }
  if (evaluations) *evaluations += evals;
  return 0.5 * (a + b);
}

Certification certify_collision(const EjectionSystem& sys, int n, double theta0,
                                const IntegratorConfig& cfg, double tol) {
  const Evaluation ev = evaluate(sys, n, theta0, cfg.tightened(tol));
  Certification c;
  c.state = ev.event.state;
  c.tau_star = ev.event.tau;
  c.collision_residual = std::hypot(c.state[0], c.state[1]);
  c.max_residual = ev.max_residual;
  return c;
}

Certification certify_collision(const Params& p, double theta0, const IntegratorConfig& cfg,
                                double tol) {
  p.validate();
  RtbpSystem sys(p.mu, p.C);
  return certify_collision(sys, p.n, theta0, cfg, tol);
}

std::string family_name(int m) {
  static const char* names[4] = {"gamma", "delta", "alpha", "beta"};
  if (m < 0 || m > 3) throw DomainError("family index must be 0..3");
  return names[m];
}

void label_families(std::vector<ECOrbit>& roots) {
  std::sort(roots.begin(), roots.end(),
            [](const ECOrbit& a, const ECOrbit& b) { return a.theta0_star < b.theta0_star; });
  std::vector<int> owner(4, -1);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double t = roots[i].theta0_star;
    int m = int(std::lround(wrap_pi(t) / (pi / 4))) % 4;
    roots[i].m = m;
    const double d = angle_distance_pi(t, m * pi / 4);
    if (owner[m] < 0 || d < angle_distance_pi(roots[owner[m]].theta0_star, m * pi / 4)) owner[m] = int(i);
  }
  int extra = 0;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (owner[roots[i].m] == int(i))
      roots[i].family = family_name(roots[i].m);
    else
      roots[i].family = "extra_" + std::to_string(++extra);
  }
}

RootReport find_roots(const EjectionSystem& sys, int n, const FindConfig& cfg) {
  BracketScan bs = bracket_impl(sys, n, cfg, true);
  RootReport rep;
  rep.grid_used = bs.grid_used;
  rep.tangency_candidates = bs.tangency_candidates;
  rep.max_residual = bs.max_residual;
  rep.evaluations = bs.evaluations;

  std::vector<ECOrbit> cand(bs.brackets.size());
  std::vector<long> evals(bs.brackets.size(), 0);
  std::vector<double> worst(bs.brackets.size(), 0);
  parallel_for(bs.brackets.size(), cfg.jobs, [&](std::size_t i) {
    ECOrbit& o = cand[i];
    o.system = sys.name();
    o.mu = sys.mu();
    o.K = sys.K();
    o.C = sys.name() == "rtbp" ? c_from_k(sys.mu(), sys.K()) : 0.0;
    o.n = n;
    try {
      const double root = bisect_root(sys, n, bs.brackets[i], cfg.integ, cfg.theta_tol, &evals[i]);
      Certification c = certify_collision(sys, n, root, cfg.integ, cfg.certify_tol);
      const double amb_lo = 0.1 * cfg.certify_threshold, amb_hi = 10.0 * cfg.certify_threshold;
      if (c.collision_residual > amb_lo && c.collision_residual < amb_hi) {
        c = certify_collision(sys, n, root, cfg.integ, 0.1 * cfg.certify_tol);
        ++evals[i];
      }
      ++evals[i];
      o.theta0_star = wrap_pi(root);
      o.tau_star = c.tau_star;
      o.collision_residual = c.collision_residual;
      o.momentum_residual = std::abs(angular_momentum(c.state));
      o.collision_angle = wrap_pi(std::atan2(c.state[3], c.state[2]));
      o.certified = c.collision_residual <= cfg.certify_threshold;
      worst[i] = c.max_residual;
    } catch (const NumericError& e) {
      o.theta0_star = wrap_pi(0.5 * (bs.brackets[i].a + bs.brackets[i].b));
      o.collision_residual = o.momentum_residual = std::nan("");
      o.certified = false;
      o.note = e.what();
    }
  });
  for (std::size_t i = 0; i < cand.size(); ++i) {
    rep.evaluations += evals[i];
    rep.max_residual = std::max(rep.max_residual, worst[i]);
    (cand[i].certified ? rep.roots : rep.rejected).push_back(cand[i]);
  }
  label_families(rep.roots);
  std::sort(rep.rejected.begin(), rep.rejected.end(),
            [](const ECOrbit& a, const ECOrbit& b) { return a.theta0_star < b.theta0_star; });
  return rep;
}

RootReport find_roots(const Params& p, const FindConfig& cfg) {
  p.validate();
  RtbpSystem sys(p.mu, p.C);
  return find_roots(sys, p.n, cfg);
}

}  // namespace ecorb
