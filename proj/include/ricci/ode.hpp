#pragma once

// Radial gradient-soliton system for multiply warped products. Unknowns are
// the warp factors h_i, their derivatives, and the potential (f, f'); the
// soliton equation Ric + Hess f = lambda g reduces on fiber and radial
// directions to
//
//   h_i'' = h_i * u_i,
//   u_i   = kappa_i/h_i^2 + xi_i^2 - xi_i * S + f' xi_i - lambda,
//   f''   = lambda + sum_l r_l u_l,
//
// with xi_i = h_i'/h_i and S = sum_l r_l xi_l. (Equivalent to requiring each
// fiber Ricci eigenvalue to satisfy lambda_i + f' xi_i = lambda and the
// radial one lambda_base + f'' = lambda; cross-checked against the
// closed-form geometries and the coordinate-chart oracle in tests.)
//
// Integration is classical RK4 with step-doubling error control (no local
// extrapolation, so the global order stays exactly four), marching an exact
// uniform output grid. Events are edge-triggered with bisection localization.

#include <span>
#include <string>
#include <vector>

#include "ricci/errors.hpp"
#include "ricci/warped.hpp"

namespace ricci {

struct SolitonSystem {
  std::vector<int> dims;      // fiber dimensions r_i
  std::vector<double> kappa;  // fiber Einstein constants
  double lambda = 0.0;

  int fiber_count() const { return static_cast<int>(dims.size()); }
  int total_dim() const;
  int state_size() const { return 2 * fiber_count() + 2; }
  void validate() const;
};

SolitonSystem make_system(std::span<const FiberModel> fibers, double lambda);

struct SolitonState {
  double s = 0.0;
  std::vector<double> h, hp;
  double f = 0.0, fp = 0.0;
};

// dy for the flat layout [h_0..h_{k-1}, h'_0..h'_{k-1}, f, f'].
void soliton_rhs(const SolitonSystem& sys, const double* y, double* dy);
std::vector<double> pack_state(const SolitonState& st);
SolitonState unpack_state(const SolitonSystem& sys, double s, const double* y);

// u_i = h_i''/h_i as dictated by the soliton equations at this state.
std::vector<double> state_u(const SolitonSystem& sys, const SolitonState& st);

// R + |grad f|^2 - 2 lambda f: constant along exact solutions (the standard
// first integral of gradient solitons); its drift measures integration error.
double conserved_quantity(const SolitonSystem& sys, const SolitonState& st);

struct OdeControl {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_init = 1e-3;
  double h_min = 1e-12;
  double h_max = 0.1;
  bool fixed_step = false;   // march fixed_dt sub-steps instead of adapting
  double fixed_dt = 1e-3;
  long max_steps = 2000000;
  // Warp-collapse threshold. Near a conical zero of h the flow is singular
  // and trajectory error amplifies like (error in h')/h^2, so double
  // precision cannot certify the state much below h ~ 1e-4 at the default
  // tolerances; collapse is declared there, while localization of the
  // crossing is still sharp. Tighten only together with abs/rel tolerances.
  double collapse_eps = 1e-4;
  double critical_eps = 1e-8;   // |f'| band for gradient_critical
  double arm_eps = 1e-6;        // |f'| must reach this before critical can fire
};

enum class OdeEventKind {
  warp_collapse,          // h_i reached collapse_eps (stops integration)
  gradient_critical,      // |f'| entered the critical band from above
  gradient_sign_change,   // f' crossed zero
  non_finite,             // state stopped being finite (stops integration)
  step_underflow          // adaptive step fell below h_min (stops integration)
};
const char* to_string(OdeEventKind k);

struct OdeEvent {
  OdeEventKind kind;
  double s = 0.0;
  int fiber = -1;  // for warp_collapse
};

struct Trajectory {
  std::vector<SolitonState> states;  // on the uniform output grid
  std::vector<OdeEvent> events;
  bool truncated = false;  // stopped before reaching the end of the span
  long steps = 0;          // accepted steps
  long rhs_evals = 0;
  double ds() const;  // grid spacing (signed)
};

// Integrate from init.s to s_end, reporting states on a uniform grid of
// grid_points nodes (inclusive of both ends; exact landing on each node).
// Backward spans (s_end < init.s) are allowed.
Trajectory integrate(const SolitonSystem& sys, const SolitonState& init, double s_end,
                     int grid_points, const OdeControl& ctrl = {});

// max_j |Q(s_j) - Q(s_0)| over the trajectory grid.
double conserved_drift(const SolitonSystem& sys, const Trajectory& traj);

// Closed-form references: "gaussian" (h = s, flat), "cylinder" (h = 1,
// R = (n-1) lambda... fiber eigenvalue lambda), "sphere" (h = sin s, needs
// lambda = n-1, f = 0).
struct KnownSoliton {
  std::string name;
  WarpedSpec spec;
  SolitonSystem sys;
  double lambda = 0.0;
  double anchor = 0.0;  // customary starting point
  SolitonState state_at(double s) const;
};
KnownSoliton known_solution(const std::string& name, int n, double lambda);

// Seeded initial data on which the fiber/radial soliton structure is exactly
// preserved by the flow. k = 1 is unconstrained (any warped single-fiber
// gradient soliton works); k = 2 draws from the two closed families that the
// flow provably keeps invariant: proportional warps over matched fibers, and
// a rigid Einstein factor times a flat cone factor.
struct RandomSolitonData {
  std::vector<FiberModel> fibers;
  double lambda = 0.0;
  SolitonState init;  // anchored at s = 0
};
RandomSolitonData random_soliton_data(int n, int k, unsigned long seed);

}  // namespace ricci
