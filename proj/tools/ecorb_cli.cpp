#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ecorb/analytic.hpp"
#include "ecorb/continuation.hpp"
#include "ecorb/dynamics.hpp"
#include "ecorb/ecfinder.hpp"
#include "ecorb/hill.hpp"
#include "ecorb/parallel.hpp"
#include "emit.hpp"

using namespace ecorb;
using namespace ecorb::cli;

namespace {

// exit status for a run that finished but left something uncertified
constexpr int kPartial = 1;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

struct Common {
  int jobs = default_jobs();
  double tol = 1e-12;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--jobs", jobs, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "integrator absolute and relative tolerance")
        ->check(CLI::PositiveNumber);
    app->add_option("--out", out, "output file (default: standard output)");
  }
  IntegratorConfig integ() const { return IntegratorConfig{}.tightened(tol); }
  json to_json() const { return {{"jobs", jobs}, {"integrator_tol", tol}, {"out", out}}; }
};

// Energy of a single-system command: C or K for the restricted problem, K for Hill.
struct Energy {
  double C = std::numeric_limits<double>::quiet_NaN();
  double K = std::numeric_limits<double>::quiet_NaN();
};

struct Problem {
  bool hill = false;
  double mu = 0;
  int n = 1;

  const char* label() const { return hill ? "K" : "C"; }
  SystemFactory factory() const { return hill ? hill_factory() : rtbp_factory(mu); }

  double resolve(const Energy& e) const {
    if (hill) return e.K;
    const double C = std::isnan(e.C) ? c_from_k(mu, e.K) : e.C;
    Params::from_C(mu, n, C);
    warn_below_l1(C);
    return C;
  }
  void warn_below_l1(double C) const {
    if (hill || mu <= 0) return;
    const double l1 = cl1(mu);
    if (C < l1)
      std::cerr << "warning: C = " << num(C) << " is below C_L1 = " << num(l1)
                << "; the ejection region is open and orbits may escape\n";
  }
  json to_json() const {
    json j = {{"system", hill ? "hill" : "rtbp"}, {"n", n}};
    if (!hill) j["mu"] = mu;
    return j;
  }
};

void add_problem(CLI::App* app, Problem& p, Energy* e, bool hill) {
  p.hill = hill;
  if (!hill) app->add_option("--mu", p.mu, "mass parameter in [0,1)")->required();
  app->add_option("--n", p.n, "number of radial maxima before collision")->required()->check(
      CLI::PositiveNumber);
  if (!e) return;
  if (hill) {
    app->add_option("--K", e->K, "scaled energy")->required();
  } else {
    auto* c = app->add_option("--C", e->C, "Jacobi constant");
    auto* k = app->add_option("--K", e->K, "scaled energy (C = 3 mu + K (1-mu)^{2/3})");
    c->excludes(k);
    k->excludes(c);
    app->callback([app] {
      if (app->count("--C") + app->count("--K") != 1) throw CLI::ValidationError("exactly one of --C or --K is required");
    });
  }
}

json orbit_json(const ECOrbit& o) {
  json j = {{"theta0_star", o.theta0_star}, {"m", o.m},
            {"family", o.family},           {"system", o.system},
            {"n", o.n},                     {"K", o.K}};
  if (o.system != "hill") {
    j["mu"] = o.mu;
    j["C"] = o.C;
  }
  j["tau_star"] = o.tau_star;
  j["collision_residual"] = o.collision_residual;
  j["momentum_residual"] = o.momentum_residual;
  j["collision_angle"] = o.collision_angle;
  j["certified"] = o.certified;
  if (!o.note.empty()) j["note"] = o.note;
  return j;
}

json event_json(const BifurcationEvent& e, const char* label) {
  return {{label, e.value},
          {"kind", e.kind},
          {"theta0_at", e.theta0_at},
          {"count_above", e.count_above},
          {"count_below", e.count_below}};
}

// ---- scan ----

struct ScanOpts {
  Problem p;
  Energy e;
  Common c;
  int grid = 1024;
};

int run_scan(const ScanOpts& o, const std::string& name) {
  Manifest m{name};
  const double E = o.p.resolve(o.e);
  auto sys = o.p.factory()(E);
  const auto samples = scan(*sys, o.p.n, o.grid, o.c.integ(), o.c.jobs);
  CsvWriter csv({"theta0", "M", "tau_star", "r_min", "status"});
  json failures = json::array();
  double max_res = 0;
  for (const auto& s : samples) {
    csv.row({s.theta0, s.M, s.tau_star, s.r_min}, s.ok ? "ok" : "failed");
    if (!s.ok) failures.push_back({{"theta0", s.theta0}, {"error", s.error}});
    max_res = std::max(max_res, s.max_residual);
  }
  m.params = o.p.to_json();
  m.params[o.p.label()] = E;
  m.params["grid"] = o.grid;
  m.params.update(o.c.to_json());
  emit_csv(o.c.out, csv, m, {{"max_residual", max_res}, {"failures", failures}});
  return failures.empty() ? 0 : kPartial;
}

// ---- find ----

struct FindOpts {
  Problem p;
  Energy e;
  Common c;
  int grid = 1024;
  bool quarter = false;
};

FindConfig find_config(const Common& c, int grid, bool quarter) {
  FindConfig f;
  f.grid = grid;
  f.max_grid = std::max(f.max_grid, grid);
  f.quarter = quarter;
  f.integ = c.integ();
  f.jobs = c.jobs;
  return f;
}

int run_find(const FindOpts& o, const std::string& name) {
  Manifest m{name};
  const double E = o.p.resolve(o.e);
  auto sys = o.p.factory()(E);
  const FindConfig cfg = find_config(o.c, o.grid, o.quarter);
  const RootReport r = find_roots(*sys, o.p.n, cfg);
  json roots = json::array(), rejected = json::array();
  bool all = r.rejected.empty();
  for (const auto& x : r.roots) {
    roots.push_back(orbit_json(x));
    all = all && x.certified;
  }
  for (const auto& x : r.rejected) rejected.push_back(orbit_json(x));
  m.params = o.p.to_json();
  m.params[o.p.label()] = E;
  m.params["grid"] = o.grid;
  m.params["quarter"] = o.quarter;
  m.params["theta_tol"] = cfg.theta_tol;
  m.params["certify_threshold"] = cfg.certify_threshold;
  m.params.update(o.c.to_json());
  emit_json(o.c.out,
            {{"count", r.roots.size()},
             {"roots", roots},
             {"rejected", rejected},
             {"tangency_candidates", r.tangency_candidates},
             {"grid_used", r.grid_used},
             {"max_residual", r.max_residual},
             {"evaluations", r.evaluations}},
            m);
  return all ? 0 : kPartial;
}

// ---- continue ----

struct ContinueOpts {
  Problem p;
  Common c;
  double from = 0, to = 0, theta = 0;
  int m = -1;
  StepControl ctl;
  int grid = 1024;
};

int run_continue(const ContinueOpts& o, const std::string& name) {
  Manifest man{name};
  if (!o.p.hill) {
    Params::from_C(o.p.mu, o.p.n, std::min(o.from, o.to));
    o.p.warn_below_l1(std::min(o.from, o.to));
  }
  const int m = o.m >= 0 ? o.m : int(std::lround(wrap_pi(o.theta) / (pi / 4))) % 4;
  const FindConfig cfg = find_config(o.c, o.grid, false);
  const FamilyBranch b = continue_family(o.p.factory(), o.p.n, o.from, o.to, o.theta, m, o.ctl, cfg);
  CsvWriter csv({o.p.label(), "theta0", "tau_star", "collision_residual", "momentum_residual"});
  for (const auto& q : b.points)
    csv.row({q.energy, q.theta0, q.tau_star, q.collision_residual, q.momentum_residual});
  man.params = o.p.to_json();
  man.params.update(json{{"from", o.from},
                         {"to", o.to},
                         {"theta_seed", o.theta},
                         {"m", m},
                         {"step", o.ctl.step},
                         {"min_step", o.ctl.min_step},
                         {"max_step", o.ctl.max_step},
                         {"window", o.ctl.window}});
  man.params.update(o.c.to_json());
  emit_csv(o.c.out, csv, man,
           {{"family", b.label}, {"points", b.points.size()}, {"terminated", b.terminated},
            {"reason", b.reason}});
  if (b.terminated) std::cerr << "branch terminated: " << b.reason << "\n";
  return b.terminated ? kPartial : 0;
}

// ---- bifurcate ----

struct BifurcateOpts {
  Problem p;
  Common c;
  std::string lo = "auto";
  double hi = 0;
  double step = 0.01;
  double btol = 1e-8;
  int grid = 1024;
  bool first = false;
  bool quarter = false;
};

int run_bifurcate(const BifurcateOpts& o, const std::string& name) {
  Manifest m{name};
  BifurcationConfig cfg;
  cfg.step = o.step;
  cfg.tol = o.btol;
  cfg.stop_at_first = o.first;
  cfg.find = find_config(o.c, o.grid, o.quarter);
  double lo = 0, hi = o.hi;
  BifurcationReport r;
  if (o.p.hill) {
    lo = o.lo == "auto" ? 0.0 : std::stod(o.lo);
    r = hill_k_hat(o.p.n, cfg, lo, hi);
    const double ref = hill_scaling_curves(1.0, o.p.n);
    if (lo <= 0) lo = 0.5 * ref;
    if (hi <= 0) hi = std::max(1.5 * ref, 8.0);
  } else {
    lo = o.lo == "auto" ? cl1(o.p.mu) : std::stod(o.lo);
    if (hi <= 0) hi = 8.0;
    Params::from_C(o.p.mu, o.p.n, lo);
    if (o.lo != "auto") o.p.warn_below_l1(lo);
    r = detect_bifurcations(o.p.mu, o.p.n, lo, hi, cfg);
  }
  const std::string hat = std::string(o.p.label()) + "_hat";
  json events = json::array(), sweep = json::array();
  for (const auto& e : r.events) events.push_back(event_json(e, o.p.label()));
  for (const auto& s : r.sweep) sweep.push_back({{o.p.label(), s.energy}, {"count", s.count}});
  m.params = o.p.to_json();
  m.params.update(json{{"min", lo},
                       {"max", hi},
                       {"step", o.step},
                       {"bisection_tol", o.btol},
                       {"grid", o.grid},
                       {"stop_at_first", o.first},
                       {"quarter", o.quarter}});
  m.params.update(o.c.to_json());
  json body;
  body[hat] = r.has_hat ? json(r.hat) : json(nullptr);
  body["events"] = events;
  body["sweep"] = sweep;
  emit_json(o.c.out, body, m);
  return 0;
}

// ---- diagram ----

struct DiagramOpts {
  Problem p;
  Common c;
  std::string lo = "auto";
  double hi = 8.0;
  int theta_grid = 256;
  int levels = 64;
};

int run_diagram(const DiagramOpts& o, const std::string& name) {
  Manifest m{name};
  if (o.c.out.empty()) throw DomainError("diagram needs --out for its metadata file");
  if (o.levels < 2) throw DomainError("--levels must be at least 2");
  double lo;
  if (o.p.hill) {
    lo = o.lo == "auto" ? hill_k_l() : std::stod(o.lo);
  } else {
    lo = o.lo == "auto" ? cl1(o.p.mu) : std::stod(o.lo);
    Params::from_C(o.p.mu, o.p.n, lo);
    if (o.lo != "auto") o.p.warn_below_l1(lo);
  }
  if (!(o.hi > lo)) throw DomainError("upper energy must exceed the lower one");
  std::vector<double> energies(o.levels);
  for (int i = 0; i < o.levels; ++i)
    energies[i] = i + 1 == o.levels ? o.hi : lo + (o.hi - lo) * double(i) / double(o.levels - 1);
  const Diagram d = diagram(o.p.factory(), o.p.n, o.theta_grid, energies, o.c.integ(), o.c.jobs);
  std::vector<std::string> header{o.p.label()};
  for (std::size_t j = 0; j < d.theta0.size(); ++j) header.push_back("M" + std::to_string(j));
  CsvWriter csv(header);
  long failed = 0;
  for (std::size_t i = 0; i < d.energy.size(); ++i) {
    std::vector<double> row{d.energy[i]};
    for (std::size_t j = 0; j < d.theta0.size(); ++j) {
      row.push_back(d.ok[i][j] ? d.M[i][j] : std::numeric_limits<double>::quiet_NaN());
      failed += !d.ok[i][j];
    }
    csv.row(row);
  }
  m.params = o.p.to_json();
  m.params.update(json{{"min", lo}, {"max", o.hi}, {"theta_grid", o.theta_grid}, {"levels", o.levels}});
  m.params.update(o.c.to_json());
  emit_csv(o.c.out, csv, m,
           {{"theta0", d.theta0}, {"energy", d.energy}, {"failed_cells", failed}});
  return failed ? kPartial : 0;
}

// ---- hill periodic ----

struct PeriodicOpts {
  int n = 1;
  Common c;
  double k_min = 0, k_max = 8.0, k_step = 0.005, k_tol = 1e-10;
};

int run_periodic(const PeriodicOpts& o, const std::string& name) {
  Manifest m{name};
  PeriodicConfig cfg;
  cfg.k_step = o.k_step;
  cfg.k_tol = o.k_tol;
  cfg.integ = o.c.integ();
  cfg.jobs = o.c.jobs;
  const double lo = o.k_min > 0 ? o.k_min : hill_k_l();
  const auto found = detect_periodic_ec(o.n, lo, o.k_max, cfg);
  json arr = json::array();
  for (const auto& f : found)
    arr.push_back({{"K", f.K},
                   {"theta0", f.theta0},
                   {"collision_angle", f.collision_angle},
                   {"kind", f.kind},
                   {"families", f.families}});
  m.params = {{"system", "hill"}, {"n", o.n}, {"k_min", lo}, {"k_max", o.k_max},
              {"k_step", o.k_step}, {"k_tol", o.k_tol}, {"zero_tol", cfg.zero_tol}};
  m.params.update(o.c.to_json());
  emit_json(o.c.out, {{"events", arr}}, m);
  return 0;
}

// ---- analytic ----

struct AnalyticOpts {
  int j = 3, n = 1, order = 10;
  std::vector<double> theta{0.0}, tau{0.0}, T{0.0};
  double mu = 0, eps = 0, xi = 0, p = 1;
  std::string out;
};

json vec_json(const Vec4& v) { return json(std::vector<double>(v.begin(), v.end())); }

int run_analytic(const std::string& op, const AnalyticOpts& o) {
  Manifest m{"analytic " + op};
  json pts = json::array();
  m.params = {{"n", o.n}, {"mu", o.mu}, {"eps", o.eps}, {"order", o.order}};
  if (op == "series") {
    m.params = {{"j", o.j}, {"mu", o.mu}};
    for (double th : o.theta)
      for (double t : o.tau)
        pts.push_back({{"theta0", th}, {"tau", t}, {"u", vec_json(u_series(o.j, t, th, o.mu))}});
  } else if (op == "state") {
    for (double th : o.theta)
      for (double t : o.tau)
        pts.push_back({{"theta0", th},
                       {"tau", t},
                       {"state", vec_json(series_state(t, th, o.eps, o.mu, o.order))}});
  } else if (op == "tau-star") {
    for (double th : o.theta)
      pts.push_back({{"theta0", th}, {"tau_star", tau_star_series(o.n, th, o.eps, o.mu, o.order)}});
  } else if (op == "momentum") {
    for (double th : o.theta)
      pts.push_back({{"theta0", th},
                     {"M", momentum_series(o.n, th, o.eps, o.mu, o.order)},
                     {"dM_dtheta0", momentum_series_dtheta(o.n, th, o.eps, o.mu, o.order)}});
  } else if (op == "roots") {
    const PredictedRoots r = predicted_roots(o.n, o.eps, o.mu, o.order);
    emit_json(o.out,
              {{"roots", r.roots}, {"unresolved_seeds", r.unresolved_seeds}, {"degenerate", r.degenerate}},
              m);
    return r.unresolved_seeds.empty() ? 0 : kPartial;
  } else if (op == "kepler" || op == "matrix") {
    m.params = {{"n", o.n}, {"xi", o.xi}};
    for (double th : o.theta)
      for (double T : o.T) {
        if (op == "kepler") {
          const KeplerPoint k = kepler_lc_ejection(o.n, th, o.xi, T);
          pts.push_back({{"theta0", th}, {"T", T}, {"state_hat", vec_json(k.state_hat)},
                         {"state_tau", vec_json(k.state_tau)}, {"tau", k.tau}, {"t", k.t}});
        } else {
          const Mat4 X = fundamental_matrix_kepler(o.n, th, o.xi, T);
          json rows = json::array();
          for (const auto& r : X) rows.push_back(vec_json(r));
          pts.push_back({{"theta0", th}, {"T", T}, {"X", rows}});
        }
      }
  } else if (op == "curve") {
    m.params = {{"p", o.p}, {"n", o.n}};
    emit_json(o.out, {{"K", hill_scaling_curves(o.p, o.n)}}, m);
    return 0;
  }
  emit_json(o.out, {{"points", pts}}, m);
  return 0;
}

int fail(const char* kind, const std::string& msg, int code) {
  std::cerr << json{{"error", kind}, {"message", msg}}.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ejection-collision orbits of the restricted three-body and Hill problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version);

  ScanOpts scan_o, hscan_o;
  FindOpts find_o, hfind_o;
  ContinueOpts cont_o, hcont_o;
  BifurcateOpts bif_o, hbif_o;
  DiagramOpts dia_o, hdia_o;
  PeriodicOpts per_o;
  AnalyticOpts an_o;

  auto setup = [](CLI::App* root, bool hill, ScanOpts& s, FindOpts& f, ContinueOpts& c,
                  BifurcateOpts& b, DiagramOpts& d) {
    auto* scan_c = root->add_subcommand("scan", "sample M over theta0 in [0, pi)");
    add_problem(scan_c, s.p, &s.e, hill);
    s.c.add(scan_c);
    scan_c->add_option("--grid", s.grid, "number of samples")->check(CLI::Range(16, 1 << 22));

    auto* find_c = root->add_subcommand("find", "locate and certify all n-EC orbits");
    add_problem(find_c, f.p, &f.e, hill);
    f.c.add(find_c);
    find_c->add_option("--grid", f.grid, "initial scan size")->check(CLI::Range(8, 1 << 20));
    if (hill) find_c->add_flag("--quarter", f.quarter, "scan [0, pi/2) and rotate by pi/2");

    auto* cont_c = root->add_subcommand("continue", "follow one family in the energy");
    add_problem(cont_c, c.p, nullptr, hill);
    c.c.add(cont_c);
    cont_c->add_option("--from", c.from, "starting energy (a root must exist at theta)")->required();
    cont_c->add_option("--to", c.to, "final energy")->required();
    cont_c->add_option("--theta", c.theta, "root at the starting energy")->required();
    cont_c->add_option("--m", c.m, "family index 0..3 (default: nearest m*pi/4)")->check(CLI::Range(0, 3));
    cont_c->add_option("--step", c.ctl.step)->check(CLI::PositiveNumber);
    cont_c->add_option("--min-step", c.ctl.min_step)->check(CLI::PositiveNumber);
    cont_c->add_option("--max-step", c.ctl.max_step)->check(CLI::PositiveNumber);
    cont_c->add_option("--window", c.ctl.window, "theta half-width of the correction search")
        ->check(CLI::PositiveNumber);

    auto* bif_c = root->add_subcommand("bifurcate", "sweep down in energy and refine root-count changes");
    add_problem(bif_c, b.p, nullptr, hill);
    b.c.add(bif_c);
    const char* lo = hill ? "--k-min" : "--c-min";
    const char* hi = hill ? "--k-max" : "--c-max";
    bif_c->add_option(lo, b.lo, hill ? "lower K (auto: half the scaling-law value)" : "lower C (auto: C_L1)");
    bif_c->add_option(hi, b.hi, hill ? "upper K (default: max(1.5 x scaling-law value, 8))" : "upper C (default 8)");
    bif_c->add_option("--step", b.step, "sweep step")->check(CLI::PositiveNumber);
    bif_c->add_option("--bisection-tol", b.btol, "event refinement tolerance")->check(CLI::PositiveNumber);
    bif_c->add_option("--grid", b.grid, "root count scan size")->check(CLI::Range(8, 1 << 20));
    bif_c->add_flag("--first", b.first, "stop once the hat value is found");
    if (hill) bif_c->add_flag("--quarter", b.quarter, "scan [0, pi/2) and rotate by pi/2");

    auto* dia_c = root->add_subcommand("diagram", "dense M matrix over energy and theta0");
    add_problem(dia_c, d.p, nullptr, hill);
    d.c.add(dia_c);
    dia_c->add_option(lo, d.lo, hill ? "lower K (auto: K_L)" : "lower C (auto: C_L1)");
    dia_c->add_option(hi, d.hi, "upper energy (default 8)");
    dia_c->add_option("--theta-grid", d.theta_grid)->check(CLI::Range(16, 1 << 16));
    dia_c->add_option("--levels", d.levels, "number of energies")->check(CLI::Range(2, 1 << 16));
  };

  setup(&app, false, scan_o, find_o, cont_o, bif_o, dia_o);
  auto* hill = app.add_subcommand("hill", "the same commands for the Hill problem, in K");
  hill->require_subcommand(1);
  setup(hill, true, hscan_o, hfind_o, hcont_o, hbif_o, hdia_o);
  auto* per_c = hill->add_subcommand("periodic", "energies where a root hits 0 or pi/4 (periodic EC orbits)");
  per_c->add_option("--n", per_o.n)->required()->check(CLI::PositiveNumber);
  per_o.c.add(per_c);
  per_c->add_option("--k-min", per_o.k_min, "lower K (default K_L)");
  per_c->add_option("--k-max", per_o.k_max);
  per_c->add_option("--k-step", per_o.k_step)->check(CLI::PositiveNumber);
  per_c->add_option("--k-tol", per_o.k_tol)->check(CLI::PositiveNumber);

  auto* an = app.add_subcommand("analytic", "evaluate the small-eps series and the mu = 0 closed forms");
  an->require_subcommand(1);
  std::string an_op;
  const std::pair<const char*, const char*> an_ops[] = {
      {"series", "coefficient j of the eps-expansion at given tau"},
      {"state", "truncated series state (U, V, U', V')"},
      {"tau-star", "series collision time"},
      {"momentum", "series angular momentum M at the n-th minimum"},
      {"roots", "roots of the series M over [0, pi)"},
      {"kepler", "mu = 0 closed-form ejection orbit"},
      {"matrix", "fundamental matrix along the mu = 0 orbit"},
      {"curve", "K on the scaling curve (2/p)^(2/3) n^(2/3)"}};
  for (const auto& [op, help] : an_ops) {
    auto* s = an->add_subcommand(op, help);
    s->add_option("--out", an_o.out);
    s->final_callback([&an_op, op] { an_op = op; });
    const std::string o = op;
    if (o == "series") {
      s->add_option("--j", an_o.j)->required();
      s->add_option("--tau", an_o.tau)->required();
    }
    if (o == "state") s->add_option("--tau", an_o.tau)->required();
    if (o == "series" || o == "state" || o == "tau-star" || o == "momentum" || o == "kepler" || o == "matrix")
      s->add_option("--theta", an_o.theta)->required();
    if (o != "series" && o != "curve") s->add_option("--n", an_o.n)->check(CLI::PositiveNumber);
    if (o == "curve") {
      s->add_option("--n", an_o.n)->required()->check(CLI::PositiveNumber);
      s->add_option("--p", an_o.p)->required();
    }
    if (o == "series" || o == "state" || o == "tau-star" || o == "momentum" || o == "roots")
      s->add_option("--mu", an_o.mu)->required();
    if (o == "state" || o == "tau-star" || o == "momentum" || o == "roots") {
      s->add_option("--eps", an_o.eps)->required();
      s->add_option("--order", an_o.order)->check(CLI::Range(0, 10));
    }
    if (o == "kepler" || o == "matrix") {
      s->add_option("--xi", an_o.xi)->required();
      s->add_option("--T", an_o.T)->required();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  auto parsed = [](CLI::App* parent, const char* name) { return parent->got_subcommand(name); };
  try {
    if (parsed(&app, "scan")) return run_scan(scan_o, "scan");
    if (parsed(&app, "find")) return run_find(find_o, "find");
    if (parsed(&app, "continue")) return run_continue(cont_o, "continue");
    if (parsed(&app, "bifurcate")) return run_bifurcate(bif_o, "bifurcate");
    if (parsed(&app, "diagram")) return run_diagram(dia_o, "diagram");
    if (parsed(&app, "hill")) {
      if (parsed(hill, "scan")) return run_scan(hscan_o, "hill scan");
      if (parsed(hill, "find")) return run_find(hfind_o, "hill find");
      if (parsed(hill, "continue")) return run_continue(hcont_o, "hill continue");
      if (parsed(hill, "bifurcate")) return run_bifurcate(hbif_o, "hill bifurcate");
      if (parsed(hill, "diagram")) return run_diagram(hdia_o, "hill diagram");
      if (parsed(hill, "periodic")) return run_periodic(per_o, "hill periodic");
    }
    if (parsed(&app, "analytic")) return run_analytic(an_op, an_o);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), kUsage);
  } catch (const std::invalid_argument& e) {
    return fail("domain", std::string("bad number: ") + e.what(), kUsage);
  } catch (const NumericError& e) {
    return fail("numeric", e.what(), kNumeric);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kNumeric);
  }
  return kUsage;
}
