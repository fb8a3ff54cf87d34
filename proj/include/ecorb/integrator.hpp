#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ecorb/types.hpp"

namespace ecorb {

struct IntegratorConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double h_init = 1e-2;
  double h_min = 1e-12;
  double h_max = 0.25;
  long max_steps = 2'000'000;

  void validate() const {
    if (!(abs_tol > 0 && rel_tol > 0)) throw DomainError("tolerances must be positive");
    if (!(h_min > 0 && h_min <= h_init && h_init <= h_max))
      throw DomainError("need 0 < h_min <= h_init <= h_max");
    if (max_steps < 1) throw DomainError("max_steps must be positive");
  }

  IntegratorConfig tightened(double tol) const {
    IntegratorConfig c = *this;
    c.abs_tol = c.rel_tol = tol;
    return c;
  }
};

enum class EventKind { radial_min, radial_max };

inline const char* to_string(EventKind k) {
  return k == EventKind::radial_min ? "radial_min" : "radial_max";
}

struct EventRecord {
  double tau = 0;
  Vec4 state{};
  EventKind kind = EventKind::radial_min;
  int index = 0;
};

struct TrajectorySummary {
  std::vector<EventRecord> events;
  double max_residual = 0;
  long steps = 0;
  long rejected = 0;
};

struct StepResult {
  Vec4 y{};
  double tau = 0;
  double h_next = 0;
  double error = 0;
};

inline double angular_momentum(const Vec4& z) { return z[0] * z[3] - z[1] * z[2]; }

// radial velocity proxy U U' + V V'
inline double radial_rate(const Vec4& z) { return z[0] * z[2] + z[1] * z[3]; }

namespace rk87 {

// Prince & Dormand RK8(7)13M
inline constexpr int S = 13;
inline constexpr double c[S] = {0.0,
                                 1.0 / 18,
                                 1.0 / 12,
                                 1.0 / 8,
                                 5.0 / 16,
                                 3.0 / 8,
                                 59.0 / 400,
                                 93.0 / 200,
                                 5490023248.0 / 9719169821,
                                 13.0 / 20,
                                 1201146811.0 / 1299019798,
                                 1.0,
                                 1.0};
inline constexpr double a[S][S - 1] = {
    {},
    {1.0 / 18},
    {1.0 / 48, 1.0 / 16},
    {1.0 / 32, 0, 3.0 / 32},
    {5.0 / 16, 0, -75.0 / 64, 75.0 / 64},
    {3.0 / 80, 0, 0, 3.0 / 16, 3.0 / 20},
    {29443841.0 / 614563906, 0, 0, 77736538.0 / 692538347, -28693883.0 / 1125000000,
     23124283.0 / 1800000000},
    {16016141.0 / 946692911, 0, 0, 61564180.0 / 158732637, 22789713.0 / 633445777,
     545815736.0 / 2771057229, -180193667.0 / 1043307555},
    {39632708.0 / 573591083, 0, 0, -433636366.0 / 683701615, -421739975.0 / 2616292301,
     100302831.0 / 723423059, 790204164.0 / 839813087, 800635310.0 / 3783071287},
    {246121993.0 / 1340847787, 0, 0, -37695042795.0 / 15268766246, -309121744.0 / 1061227803,
     -12992083.0 / 490766935, 6005943493.0 / 2108947869, 393006217.0 / 1396673457,
     123872331.0 / 1001029789},
    {-1028468189.0 / 846180014, 0, 0, 8478235783.0 / 508512852, 1311729495.0 / 1432422823,
     -10304129995.0 / 1701304382, -48777925059.0 / 3047939560, 15336726248.0 / 1032824649,
     -45442868181.0 / 3398467696, 3065993473.0 / 597172653},
    {185892177.0 / 718116043, 0, 0, -3185094517.0 / 667107341, -477755414.0 / 1098053517,
     -703635378.0 / 230739211, 5731566787.0 / 1027545527, 5232866602.0 / 850066563,
     -4093664535.0 / 808688257, 3962137247.0 / 1805957418, 65686358.0 / 487910083},
    {403863854.0 / 491063109, 0, 0, -5068492393.0 / 434740067, -411421997.0 / 543043805,
     652783627.0 / 914296604, 11173962825.0 / 925320556, -13158990841.0 / 6184727034,
     3936647629.0 / 1978049680, -160528059.0 / 685178525, 248638103.0 / 1413531060, 0}};
inline constexpr double b8[S] = {14005451.0 / 335480064,    0, 0, 0, 0,
                                 -59238493.0 / 1068277825,  181606767.0 / 758867731,
                                 561292985.0 / 797845732,   -1041891430.0 / 1371343529,
                                 760417239.0 / 1151165299,  118820643.0 / 751138087,
                                 -528747749.0 / 2220607170, 1.0 / 4};
inline constexpr double b7[S] = {13451932.0 / 455176623,    0, 0, 0, 0,
                                 -808719846.0 / 976000145,  1757004468.0 / 5645159321,
                                 656045339.0 / 265891186,   -3867574721.0 / 1518517206,
                                 465885868.0 / 322736535,   53011238.0 / 667516719,
                                 2.0 / 45,                  0};

// One RK8(7) attempt: eighth-order result and the embedded error vector.
template <class Rhs>
Vec4 attempt(Rhs& f, const Vec4& y, double h, Vec4& err) {
  Vec4 k[S];
  for (int i = 0; i < S; ++i) {
    Vec4 yi = y;
    for (int j = 0; j < i; ++j) {
      const double aij = a[i][j];
      if (aij == 0.0) continue;
      for (int d = 0; d < 4; ++d) yi[d] += h * aij * k[j][d];
    }
    k[i] = f(yi);
  }
  Vec4 out = y;
  err = {};
  for (int i = 0; i < S; ++i) {
    for (int d = 0; d < 4; ++d) {
      out[d] += h * b8[i] * k[i][d];
      err[d] += h * (b8[i] - b7[i]) * k[i][d];
    }
  }
  return out;
}

inline double error_norm(const Vec4& err, const Vec4& y0, const Vec4& y1,
                         const IntegratorConfig& cfg) {
  double e = 0;
  for (int d = 0; d < 4; ++d) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[d]), std::abs(y1[d]));
    e = std::max(e, std::abs(err[d]) / sc);
  }
  return e;
}

}  // namespace rk87

// Adaptive stepper with a PI controller.  Holds only the previous accepted
// error, so a fresh instance per trajectory keeps runs independent.
class Stepper {
 public:
  explicit Stepper(const IntegratorConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

  // Advances by an accepted step of size at most |h| in the direction of h.
  template <class Rhs>
  StepResult step(Rhs& f, const Vec4& y, double tau, double h) {
    const double dir = h < 0 ? -1.0 : 1.0;
    double ah = std::min(std::abs(h), cfg_.h_max);
    for (;;) {
      if (ah < cfg_.h_min)
        throw PropagationError("step size fell below h_min at tau=" + std::to_string(tau));
      Vec4 err;
      const Vec4 y1 = rk87::attempt(f, y, dir * ah, err);
      double e = rk87::error_norm(err, y, y1, cfg_);
      if (!std::isfinite(e)) e = 1e10;
      if (e <= 1.0) {
        const double en = std::max(e, 1e-10);
        double fac = 0.9 * std::pow(en, -0.7 / 8.0) * std::pow(prev_err_, 0.4 / 8.0);
        fac = std::clamp(fac, 0.2, 5.0);
        prev_err_ = std::max(e, 1e-4);
        const double hn = std::clamp(ah * fac, cfg_.h_min, cfg_.h_max);
        return {y1, tau + dir * ah, dir * hn, e};
      }
      ++rejected_;
      ah *= std::max(0.2, 0.9 * std::pow(e, -1.0 / 8.0));
    }
  }

  long rejected() const { return rejected_; }

 private:
  IntegratorConfig cfg_;
  double prev_err_ = 1.0;
  long rejected_ = 0;
};

template <class Rhs>
StepResult step(Rhs&& f, const Vec4& y, double tau, double h, const IntegratorConfig& cfg) {
  Stepper s(cfg);
  return s.step(f, y, tau, h);
}

struct NoMonitor {
  double operator()(const Vec4&) const { return 0.0; }
};

// Integrates from t0 to t1 (either direction), landing exactly on t1.
template <class Rhs, class Monitor = NoMonitor>
Vec4 propagate(Rhs&& f, Vec4 y, double t0, double t1, const IntegratorConfig& cfg,
               TrajectorySummary* summary = nullptr, Monitor monitor = {}) {
  Stepper st(cfg);
  const double dir = t1 < t0 ? -1.0 : 1.0;
  double tau = t0, h = dir * cfg.h_init;
  long steps = 0;
  double worst = std::abs(monitor(y));
  while (dir * (t1 - tau) > 0) {
    if (++steps > cfg.max_steps) throw PropagationError("max_steps exceeded");
    const double remaining = t1 - tau;
    const bool last = std::abs(h) >= std::abs(remaining);
    StepResult r = st.step(f, y, tau, last ? remaining : h);
    y = r.y;
    tau = (last && r.tau == tau + remaining) ? t1 : r.tau;
    h = r.h_next;
    worst = std::max(worst, std::abs(monitor(y)));
  }
  if (summary) {
    summary->max_residual = std::max(summary->max_residual, worst);
    summary->steps += steps;
    summary->rejected += st.rejected();
  }
  return y;
}

namespace detail {

// Locates the zero of the radial rate inside one accepted step by
// re-integrating single RK8 steps from the step start.
template <class Rhs>
EventRecord refine_event(Rhs& f, const Vec4& y0, double tau0, double h, double g0, double g1,
                         EventKind kind) {
  auto at = [&](double dt, Vec4& y) {
    Vec4 err;
    y = dt == 0.0 ? y0 : rk87::attempt(f, y0, dt, err);
    return radial_rate(y);
  };
  double lo = 0.0, hi = h, glo = g0, ghi = g1;
  Vec4 y{};
  for (int i = 0; i < 12; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = at(mid, y);
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
      ghi = gm;
    }
  }
  // Illinois-modified secant on the remaining bracket
  double t = lo, gt = glo;
  int side = 0;
  for (int i = 0; i < 60; ++i) {
    t = (lo * ghi - hi * glo) / (ghi - glo);
    if (!(t > std::min(lo, hi) && t < std::max(lo, hi))) t = 0.5 * (lo + hi);
    gt = at(t, y);
    const double scale = 1.0 + y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3];
    if (std::abs(gt) <= 1e-13 * scale || std::abs(hi - lo) <= 1e-15 * (1.0 + std::abs(tau0)))
      break;
    if ((gt < 0) == (glo < 0)) {
      lo = t;
      glo = gt;
      if (side == -1) ghi *= 0.5;
      side = -1;
    } else {
      hi = t;
      ghi = gt;
      if (side == 1) glo *= 0.5;
      side = 1;
    }
  }
  at(t, y);
  EventRecord ev;
  ev.tau = tau0 + t;
  ev.state = y;
  ev.kind = kind;
  return ev;
}

}  // namespace detail

// Forward integration from an ejection state up to the n-th minimum of
// U^2 + V^2, recording every radial maximum and minimum on the way.
template <class Rhs, class Monitor = NoMonitor>
EventRecord propagate_to_nth_min(Rhs&& f, const Vec4& state0, int n, const IntegratorConfig& cfg,
                                 TrajectorySummary* summary = nullptr, Monitor monitor = {}) {
  if (n < 1) throw DomainError("n must be >= 1");
  Stepper st(cfg);
  Vec4 y = state0;
  double tau = 0.0, h = cfg.h_init;
  double g = radial_rate(y);
  int maxima = 0, minima = 0;
  long steps = 0;
  double worst = std::abs(monitor(y));
  TrajectorySummary local;
  for (;;) {
    if (++steps > cfg.max_steps) throw PropagationError("max_steps exceeded before n-th minimum");
    StepResult r = st.step(f, y, tau, h);
    const double g1 = radial_rate(r.y);
    worst = std::max(worst, std::abs(monitor(r.y)));
    const bool armed = tau > 10.0 * cfg.h_min;
    if (armed && std::abs(g) < 1e-300 && std::abs(g1) < 1e-300)
      throw PropagationError("degenerate event: radial rate vanishes over a step");
    if (armed && g > 0 && g1 <= 0) {
      EventRecord ev = detail::refine_event(f, y, tau, r.tau - tau, g, g1, EventKind::radial_max);
      ev.index = ++maxima;
      local.events.push_back(ev);
    } else if (armed && g < 0 && g1 >= 0) {
      EventRecord ev = detail::refine_event(f, y, tau, r.tau - tau, g, g1, EventKind::radial_min);
      ev.index = ++minima;
      local.events.push_back(ev);
      if (minima == n) {
        if (maxima != n)
          throw PropagationError("radial extrema out of order before the n-th minimum");
        worst = std::max(worst, std::abs(monitor(ev.state)));
        if (summary) {
          summary->events = std::move(local.events);
          summary->max_residual = std::max(summary->max_residual, worst);
          summary->steps += steps;
          summary->rejected += st.rejected();
        }
        return ev;
      }
    }
    y = r.y;
    tau = r.tau;
    h = r.h_next;
    g = g1;
  }
}

}  // namespace ecorb
