#include "ricci/ode.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace ricci {

int SolitonSystem::total_dim() const {
  int n = 1;
  for (int r : dims) n += r;
  return n;
}

void SolitonSystem::validate() const {
  if (dims.empty()) throw InvalidStateError("soliton system: no fibers");
  if (dims.size() != kappa.size())
    throw DimensionError("soliton system: dims/kappa size mismatch");
  for (int r : dims)
    if (r < 1) throw DimensionError("soliton system: fiber dimension must be >= 1");
  const int n = total_dim();
  if (n < 3 || n > 12) throw DimensionError("soliton system: total dimension must be in [3, 12]");
}

SolitonSystem make_system(std::span<const FiberModel> fibers, double lambda) {
  SolitonSystem sys;
  sys.lambda = lambda;
  for (const auto& f : fibers) {
    sys.dims.push_back(f.dim);
    sys.kappa.push_back(fiber_kappa(f));
  }
  sys.validate();
  return sys;
}

void soliton_rhs(const SolitonSystem& sys, const double* y, double* dy) {
  const int k = sys.fiber_count();
  const double* h = y;
  const double* hp = y + k;
  const double fp = y[2 * k + 1];
  double S = 0.0;
  for (int l = 0; l < k; ++l) S += sys.dims[l] * hp[l] / h[l];
  double usum = 0.0;
  for (int i = 0; i < k; ++i) {
    const double xi = hp[i] / h[i];
    const double u =
        sys.kappa[i] / (h[i] * h[i]) + xi * xi - xi * S + fp * xi - sys.lambda;
    dy[i] = hp[i];
    dy[k + i] = h[i] * u;
    usum += sys.dims[i] * u;
  }
  dy[2 * k] = fp;
  dy[2 * k + 1] = sys.lambda + usum;
}

std::vector<double> pack_state(const SolitonState& st) {
  const int k = static_cast<int>(st.h.size());
  if (st.hp.size() != st.h.size()) throw DimensionError("state: h/hp size mismatch");
  std::vector<double> y(2 * k + 2);
  for (int i = 0; i < k; ++i) {
    y[i] = st.h[i];
    y[k + i] = st.hp[i];
  }
  y[2 * k] = st.f;
  y[2 * k + 1] = st.fp;
  return y;
}

SolitonState unpack_state(const SolitonSystem& sys, double s, const double* y) {
  const int k = sys.fiber_count();
  SolitonState st;
  st.s = s;
  st.h.assign(y, y + k);
  st.hp.assign(y + k, y + 2 * k);
  st.f = y[2 * k];
  st.fp = y[2 * k + 1];
  return st;
}

std::vector<double> state_u(const SolitonSystem& sys, const SolitonState& st) {
  const int k = sys.fiber_count();
  if (static_cast<int>(st.h.size()) != k) throw DimensionError("state_u: fiber count mismatch");
  double S = 0.0;
  for (int l = 0; l < k; ++l) S += sys.dims[l] * st.hp[l] / st.h[l];
  std::vector<double> u(k);
  for (int i = 0; i < k; ++i) {
    const double xi = st.hp[i] / st.h[i];
    u[i] = sys.kappa[i] / (st.h[i] * st.h[i]) + xi * xi - xi * S + st.fp * xi - sys.lambda;
  }
  return u;
}

double conserved_quantity(const SolitonSystem& sys, const SolitonState& st) {
  const int k = sys.fiber_count();
  auto u = state_u(sys, st);
  double base = 0.0;
  for (int i = 0; i < k; ++i) base -= sys.dims[i] * u[i];
  double scal = base;
  for (int i = 0; i < k; ++i) {
    const double xi = st.hp[i] / st.h[i];
    double cross = 0.0;
    for (int l = 0; l < k; ++l)
      if (l != i) cross += sys.dims[l] * st.hp[l] / st.h[l];
    const double lam_i = sys.kappa[i] / (st.h[i] * st.h[i]) - u[i] -
                         (sys.dims[i] - 1) * xi * xi - xi * cross;
    scal += sys.dims[i] * lam_i;
  }
  return scal + st.fp * st.fp - 2.0 * sys.lambda * st.f;
}

const char* to_string(OdeEventKind k) {
  switch (k) {
    case OdeEventKind::warp_collapse: return "warp_collapse";
    case OdeEventKind::gradient_critical: return "gradient_critical";
    case OdeEventKind::gradient_sign_change: return "gradient_sign_change";
    case OdeEventKind::non_finite: return "non_finite";
    case OdeEventKind::step_underflow: return "step_underflow";
  }
  return "unknown";
}

double Trajectory::ds() const {
  if (states.size() < 2) throw InvalidStateError("trajectory: fewer than two grid states");
  return states[1].s - states[0].s;
}

namespace {

void rk4_step(const SolitonSystem& sys, const double* y, double dt, double* out, long& evals) {
  const int m = sys.state_size();
  std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m);
  soliton_rhs(sys, y, k1.data());
  for (int i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  soliton_rhs(sys, tmp.data(), k2.data());
  for (int i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  soliton_rhs(sys, tmp.data(), k3.data());
  for (int i = 0; i < m; ++i) tmp[i] = y[i] + dt * k3[i];
  soliton_rhs(sys, tmp.data(), k4.data());
  for (int i = 0; i < m; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  evals += 4;
}

// Bisect t in (0, dt] for the first RK4-substep state satisfying pred.
template <class Pred>
double locate_event(const SolitonSystem& sys, const double* y, double s_prev, double dt,
                    Pred pred, long& evals) {
  const int m = sys.state_size();
  std::vector<double> probe(m);
  double lo = 0.0, hi = dt;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    rk4_step(sys, y, mid, probe.data(), evals);
    if (pred(probe.data()))
      hi = mid;
    else
      lo = mid;
  }
  return s_prev + hi;
}

struct EventTracker {
  bool armed = false;

  // Inspect an accepted step; may append events. Returns true to stop.
  bool check(const SolitonSystem& sys, const OdeControl& ctrl, const double* yprev,
             double s_prev, const double* ynew, double dt, std::vector<OdeEvent>& events,
             long& evals) {
    const int k = sys.fiber_count();
    const int m = sys.state_size();
    for (int i = 0; i < m; ++i)
      if (!std::isfinite(ynew[i])) {
        events.push_back({OdeEventKind::non_finite, s_prev + dt, -1});
        return true;
      }
    for (int i = 0; i < k; ++i)
      if (ynew[i] < ctrl.collapse_eps && yprev[i] >= ctrl.collapse_eps) {
        double eps = ctrl.collapse_eps;
        int fiber = i;
        double s_star = locate_event(
            sys, yprev, s_prev, dt, [fiber, eps](const double* y) { return y[fiber] < eps; },
            evals);
        events.push_back({OdeEventKind::warp_collapse, s_star, i});
        return true;
      }
    const double fp_prev = yprev[2 * k + 1];
    const double fp_new = ynew[2 * k + 1];
    if (armed && fp_prev * fp_new < 0.0) {
      const bool downward = fp_prev > 0.0;
      double s_star = locate_event(
          sys, yprev, s_prev, dt,
          [k, downward](const double* y) {
            double v = y[2 * k + 1];
            return downward ? v <= 0.0 : v >= 0.0;
          },
          evals);
      events.push_back({OdeEventKind::gradient_sign_change, s_star, -1});
      armed = false;
    } else if (armed && std::abs(fp_new) < ctrl.critical_eps &&
               std::abs(fp_prev) >= ctrl.critical_eps) {
      double eps = ctrl.critical_eps;
      double s_star = locate_event(
          sys, yprev, s_prev, dt,
          [k, eps](const double* y) { return std::abs(y[2 * k + 1]) < eps; }, evals);
      events.push_back({OdeEventKind::gradient_critical, s_star, -1});
      armed = false;
    }
    if (std::abs(fp_new) >= ctrl.arm_eps) armed = true;
    return false;
  }
};

}  // namespace

Trajectory integrate(const SolitonSystem& sys, const SolitonState& init, double s_end,
                     int grid_points, const OdeControl& ctrl) {
  sys.validate();
  const int k = sys.fiber_count();
  if (static_cast<int>(init.h.size()) != k || static_cast<int>(init.hp.size()) != k)
    throw DimensionError("integrate: initial state does not match the system");
  for (double h : init.h)
    if (!(h > 0)) throw DomainError("integrate: initial warp factors must be positive");
  if (grid_points < 2) throw DomainError("integrate: need at least two grid points");
  if (s_end == init.s) throw DomainError("integrate: empty span");
  if (!(ctrl.h_init > 0) || !(ctrl.h_min > 0) || !(ctrl.h_max >= ctrl.h_min))
    throw DomainError("integrate: invalid step-size controls");

  const double s0 = init.s;
  const double span = s_end - s0;
  const double dir = span > 0 ? 1.0 : -1.0;
  const int m = sys.state_size();

  Trajectory tr;
  tr.states.reserve(grid_points);
  tr.states.push_back(init);

  std::vector<double> y = pack_state(init);
  std::vector<double> ybig(m), ymid(m), ysmall(m);
  EventTracker tracker;
  tracker.armed = std::abs(init.fp) >= ctrl.arm_eps;

  double s = s0;
  double dt = dir * std::clamp(ctrl.h_init, ctrl.h_min, ctrl.h_max);
  long attempts = 0;

  for (int j = 1; j < grid_points; ++j) {
    const double target = s0 + span * j / (grid_points - 1);

    if (ctrl.fixed_step) {
      if (!(ctrl.fixed_dt > 0)) throw DomainError("integrate: fixed_dt must be positive");
      const double interval = target - s;
      const int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(interval) / ctrl.fixed_dt)));
      const double sub = interval / nsub;
      for (int q = 0; q < nsub; ++q) {
        if (++attempts > ctrl.max_steps) throw Error("integrate: exceeded max_steps");
        rk4_step(sys, y.data(), sub, ysmall.data(), tr.rhs_evals);
        if (tracker.check(sys, ctrl, y.data(), s, ysmall.data(), sub, tr.events,
                          tr.rhs_evals)) {
          tr.truncated = true;
          return tr;
        }
        y = ysmall;
        s += sub;
        ++tr.steps;
      }
      s = target;  // exact landing
    } else {
      while (dir * (target - s) > 0) {
        if (++attempts > ctrl.max_steps) throw Error("integrate: exceeded max_steps");
        double dt_eff = dt;
        if (dir * (s + dt_eff - target) > 0) dt_eff = target - s;

        rk4_step(sys, y.data(), dt_eff, ybig.data(), tr.rhs_evals);
        rk4_step(sys, y.data(), 0.5 * dt_eff, ymid.data(), tr.rhs_evals);
        rk4_step(sys, ymid.data(), 0.5 * dt_eff, ysmall.data(), tr.rhs_evals);

        double err = 0.0;
        bool finite = true;
        for (int i = 0; i < m; ++i) {
          if (!std::isfinite(ysmall[i]) || !std::isfinite(ybig[i])) {
            finite = false;
            break;
          }
          const double sc =
              ctrl.abs_tol + ctrl.rel_tol * std::max(std::abs(y[i]), std::abs(ysmall[i]));
          err = std::max(err, std::abs(ysmall[i] - ybig[i]) / (15.0 * sc));
        }

        if (!finite) {
          // try a smaller step before declaring the state singular
          if (std::abs(dt_eff) <= 4.0 * ctrl.h_min) {
            tr.events.push_back({OdeEventKind::non_finite, s + dt_eff, -1});
            tr.truncated = true;
            return tr;
          }
          dt = 0.25 * dt_eff;
          continue;
        }

        if (err <= 1.0) {
          if (tracker.check(sys, ctrl, y.data(), s, ysmall.data(), dt_eff, tr.events,
                            tr.rhs_evals)) {
            tr.truncated = true;
            return tr;
          }
          y = ysmall;
          s += dt_eff;
          ++tr.steps;
          const double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
          dt = dt * std::clamp(grow, 0.2, 5.0);
        } else {
          dt = dt_eff * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
        }
        if (std::abs(dt) > ctrl.h_max) dt = dir * ctrl.h_max;
        if (std::abs(dt) < ctrl.h_min) {
          if (err > 1.0) {
            tr.events.push_back({OdeEventKind::step_underflow, s, -1});
            tr.truncated = true;
            return tr;
          }
          dt = dir * ctrl.h_min;
        }
      }
      s = target;  // exact landing by construction of the last dt_eff
    }
    tr.states.push_back(unpack_state(sys, s, y.data()));
  }
  return tr;
}

double conserved_drift(const SolitonSystem& sys, const Trajectory& traj) {
  if (traj.states.empty()) throw InvalidStateError("conserved_drift: empty trajectory");
  const double q0 = conserved_quantity(sys, traj.states.front());
  double worst = 0.0;
  for (const auto& st : traj.states)
    worst = std::max(worst, std::abs(conserved_quantity(sys, st) - q0));
  return worst;
}

SolitonState KnownSoliton::state_at(double s) const {
  SolitonState st;
  st.s = s;
  for (const auto& h : spec.warps) {
    st.h.push_back(h(s));
    st.hp.push_back(h.deriv(s, 1));
  }
  st.f = spec.potential(s);
  st.fp = spec.potential.deriv(s, 1);
  return st;
}

KnownSoliton known_solution(const std::string& name, int n, double lambda) {
  if (n < 4 || n > 12) throw DimensionError("known_solution: dimension must be in [4, 12]");
  KnownSoliton ks;
  ks.name = name;
  ks.lambda = lambda;
  const int r = n - 1;
  if (name == "gaussian") {
    ks.spec.fibers = {{FiberKind::sphere, r, 1.0}};
    ks.spec.warps = {SmoothFn::linear(1.0, 0.0)};
    ks.spec.potential = SmoothFn::quadratic(0.5 * lambda, 0.0, 0.0);
    ks.anchor = 1.0;
  } else if (name == "cylinder") {
    if (!(lambda > 0)) throw DomainError("cylinder: lambda must be positive");
    ks.spec.fibers = {{FiberKind::sphere, r, std::sqrt((r - 1) / lambda)}};
    ks.spec.warps = {SmoothFn::constant(1.0)};
    ks.spec.potential = SmoothFn::quadratic(0.5 * lambda, 0.0, 0.0);
    ks.anchor = 1.0;
  } else if (name == "sphere") {
    if (std::abs(lambda - (n - 1)) > 1e-9)
      throw DomainError("sphere: lambda must equal n-1 for the unit round sphere");
    ks.spec.fibers = {{FiberKind::sphere, r, 1.0}};
    ks.spec.warps = {SmoothFn::sin_fn(1.0, 1.0, 0.0)};
    ks.spec.potential = SmoothFn::zero();
    ks.anchor = 1.5707963267948966;  // pi/2
  } else {
    throw DomainError("known_solution: expected gaussian, cylinder, or sphere");
  }
  ks.sys = make_system(ks.spec.fibers, lambda);
  return ks;
}

namespace {

// Portable uniform doubles from raw 64-bit draws (keeps seeded runs
// bit-identical regardless of library distribution internals).
double draw_unit(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }
double draw_in(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * draw_unit(rng);
}

}  // namespace

RandomSolitonData random_soliton_data(int n, int k, unsigned long seed) {
  if (n < 4 || n > 12) throw DimensionError("random_soliton_data: dimension must be in [4, 12]");
  if (k != 1 && k != 2) throw DomainError("random_soliton_data: fiber count must be 1 or 2");
  std::mt19937_64 rng(seed);
  RandomSolitonData out;
  out.lambda = draw_in(rng, 0.5, 2.5);
  out.init.s = 0.0;
  out.init.f = 0.0;

  if (k == 1) {
    const int r = n - 1;
    const int kind_idx = static_cast<int>(rng() % 3);
    FiberKind kind = kind_idx == 0   ? FiberKind::sphere
                     : kind_idx == 1 ? FiberKind::flat
                                     : FiberKind::hyperbolic;
    out.fibers = {{kind, r, draw_in(rng, 0.7, 1.5)}};
    const double h = draw_in(rng, 0.5, 2.0);
    const double xi = draw_in(rng, -1.0, 1.0);
    out.init.h = {h};
    out.init.hp = {xi * h};
    out.init.fp = draw_in(rng, 0.5, 2.0);
    return out;
  }

  // k == 2: draw from one of the two flow-invariant families.
  //  A (matched proportional fibers): xi_1 = xi_2 and kappa_1/h_1^2 =
  //    kappa_2/h_2^2, which the flow preserves; needs two curved spheres,
  //    so r_i >= 2 on both factors.
  //  B (rigid Einstein factor x flat cone factor): h_1 = 1 with kappa_1 =
  //    lambda, h_2 = a sigma linear with kappa_2 = (r_2 - 1) a^2, f' =
  //    lambda sigma; every piece stays exact under the flow.
  const int rtot = n - 1;
  bool family_a = (rng() % 2) == 0;
  if (rtot < 4) family_a = false;  // A needs r_1, r_2 >= 2
  if (family_a) {
    const int r1 = 2 + static_cast<int>(rng() % static_cast<unsigned long>(rtot - 3));
    const int r2 = rtot - r1;
    const double a1 = draw_in(rng, 0.7, 1.5);
    const double a2 = draw_in(rng, 0.7, 1.5);
    out.fibers = {{FiberKind::sphere, r1, a1}, {FiberKind::sphere, r2, a2}};
    const double k1 = (r1 - 1) / (a1 * a1);
    const double k2 = (r2 - 1) / (a2 * a2);
    const double h1 = draw_in(rng, 0.5, 2.0);
    const double h2 = h1 * std::sqrt(k2 / k1);
    const double xi = draw_in(rng, -1.0, 1.0);
    out.init.h = {h1, h2};
    out.init.hp = {xi * h1, xi * h2};
    out.init.fp = draw_in(rng, 0.5, 2.0);
  } else {
    const int r1 = 2 + static_cast<int>(rng() % static_cast<unsigned long>(rtot - 2));
    const int r2 = rtot - r1;
    const double a = draw_in(rng, 0.5, 1.5);
    const double sigma = draw_in(rng, 0.5, 1.5);
    out.fibers = {{FiberKind::sphere, r1, std::sqrt((r1 - 1) / out.lambda)},
                  {FiberKind::sphere, r2, r2 >= 2 ? 1.0 / a : 1.0}};
    out.init.h = {1.0, a * sigma};
    out.init.hp = {0.0, a};
    out.init.fp = out.lambda * sigma;
    out.init.f = 0.5 * out.lambda * sigma * sigma;
  }
  return out;
}

}  // namespace ricci
