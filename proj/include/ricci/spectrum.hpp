#pragma once

// Pointwise Ricci spectrum along multiply warped gradient solitons, the
// scalar identities tied to the vanishing-Cotton (harmonic-Weyl) structure,
// and the distinct-eigenvalue count the laboratory exists to measure.
//
// For g = ds^2 + sum_i h_i(s)^2 g_i with Einstein fibers (Ric_i = kappa_i
// g_i, dim r_i, n = 1 + sum r_i) the Ricci endomorphism is diagonal:
//   radial eigenvalue   lambda_1   = - sum_l r_l h_l''/h_l
//   fiber eigenvalue    lambda_f,i = kappa_i/h_i^2 - h_i''/h_i
//                                    - (r_i - 1) xi_i^2
//                                    - xi_i sum_{l != i} r_l xi_l
// with xi_i = h_i'/h_i.  On a gradient soliton (Ric + Hess f = lambda g):
//   fiber equation      lambda_f,i + f' xi_i = lambda
//   radial equation     lambda_1   + f''     = lambda
//   first integral      R + (f')^2 - 2 lambda f = const
//   radial Bianchi      R' = 2 lambda_1 f'
// and wherever f' != 0 every xi_i obeys ONE shared quadratic
//   xi^2 - B xi - C = -kappa_i / h_i^2,
//     B = ((n-1) lambda - R + lambda_1 - (f')^2) / f'      (= sum r xi - f')
//     C = lambda - R' / (2 (n-1) f')                        (= lambda + u)
// valid exactly when all u_i = h_i''/h_i share one value u; then also
//   Riccati             xi' + xi^2 = C - lambda
//   derived compat.     B xi^2 + (B' + 2 lambda) xi + (C - lambda) B + C' = 0.
// The eigenvalue list {lambda_1, lambda - f' xi_i} therefore contains the
// radial value plus at most the two roots the quadratic allows: at most
// three distinct Ricci eigenvalues.  The obstruction scan at the bottom
// probes the contrapositive on three-fiber data.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "ricci/ode.hpp"
#include "ricci/warped.hpp"

namespace ricci {

// Coefficients of the shared quadratic; throws SingularPointError when
// |f'| <= singular_eps (the quadratic is undefined at critical points of f).
struct QuadraticCoeffs {
  double B = 0.0;
  double C = 0.0;
};
QuadraticCoeffs shared_quadratic(int n, double lambda, double scal, double scal_prime,
                                 double lambda1, double fp, double singular_eps = 1e-8);

// One radial sample.  Residual keys (max-abs over fibers where applicable):
//   warp_ode        h_i'' vs h_i u_i from the state algebra       (always)
//   radial_match    lambda_1 vs lambda - f''                      (always)
//   radial_spread   lambda_1 vs -(n-1)(xi_i' + xi_i^2)            (always)
//   xi_consistency  xi_i vs (lambda - lambda_f,i)/f'              (regular)
//   riccati         xi_i' + xi_i^2 vs C - lambda                  (regular)
//   quadratic_bc    xi_i^2 - B xi_i - C vs -kappa_i/h_i^2         (regular)
//   bc_poly         B xi^2 + (B'+2 lambda) xi + (C-lambda)B + C'  (regular)
// "regular" means |f'| > singular_eps; B, C, B', C' are meaningful only then.
struct SpectrumSample {
  double s = 0.0;
  bool regular = false;
  double lambda1 = 0.0;
  std::vector<double> fiber_lambda;
  std::vector<int> multiplicity;  // fiber dimensions (radial slot has mult 1)
  std::vector<double> xi, xi_prime;
  double scal = 0.0;
  double fp = 0.0;
  double B = 0.0, C = 0.0, Bp = 0.0, Cp = 0.0;
  std::map<std::string, double> residuals;

  // lambda_1 followed by the fiber eigenvalues (no multiplicity repeats).
  std::vector<double> eigenvalues() const;
};

// Closed-form path: every derivative comes from the declared warp and
// potential functions themselves (dual-number evaluation), so the residuals
// genuinely test whether the declared data solves the soliton equations.
SpectrumSample spectrum_at(const WarpedSpec& w, double lambda, double s,
                           double singular_eps = 1e-8);

// Trajectory path: eigenvalues use the exact integrator state, while every
// derivative entering the residuals (h'', xi', f'', R', B', C') comes from
// 5-point finite-difference stencils on the uniform output grid -- an
// independent check that the integrated data really solves the geometry.
// bc_poly is reported only where the full stencil window is regular.
std::vector<SpectrumSample> trajectory_spectrum(const SolitonSystem& sys, const Trajectory& tr,
                                                double singular_eps = 1e-8);

// Distinct values up to tol * max(1, |largest value|).
int count_distinct(std::span<const double> values, double tol);
int count_distinct_eigenvalues(const SpectrumSample& sample, double tol = 1e-6);
int max_distinct_over(std::span<const SpectrumSample> samples, double tol = 1e-6);

// Cross-checks of the chart-oracle Laplacian of R at radial position s
// (fiber coordinates default to generic interior values):
//   radial_identity   Delta R vs R'' + (sum_l r_l xi_l) R'
//   energy_identity   Delta R vs f' R' + 2 lambda R - 2 |Ric|^2
struct LaplacianCheck {
  double laplacian = 0.0;  // chart-oracle Delta R
  double radial_identity = 0.0;
  double energy_identity = 0.0;
};
LaplacianCheck laplacian_check(const WarpedSpec& w, double lambda, double s,
                               std::span<const double> fiber_coords = {});

// Natural-cubic-spline realization of an integrated trajectory as a
// chart-evaluable spec (warps through the h_i samples, potential through f).
WarpedSpec realize_spec(std::span<const FiberModel> fibers, const Trajectory& tr);

// Scan of the joint condition behind the eigenvalue bound, on a realized
// trajectory window:
//   clause (a)  the harmonic-Weyl residual stays below hw_tol on the window
//   clause (b)  some sample shows >= 4 distinct Ricci eigenvalues
// For gradient solitons the two can never hold together; the report records
// both maxima and names the clause that failed.  Samples near the window ends
// are excluded (natural-spline end bias pollutes second derivatives there).
struct ObstructionSample {
  double s = 0.0;
  double hw_residual = 0.0;
  int distinct = 0;
};
struct ObstructionReport {
  std::vector<ObstructionSample> samples;
  double hw_tol = 0.0;
  double eig_tol = 0.0;
  double max_hw_residual = 0.0;
  int max_distinct = 0;
  double min_xi_gap = 0.0;  // smallest pairwise |xi_i - xi_j| seen

  bool harmonic_weyl_window() const { return max_hw_residual < hw_tol; }
  bool four_eigenvalues() const { return max_distinct >= 4; }
  bool joint_condition() const { return harmonic_weyl_window() && four_eigenvalues(); }
  std::string failing_clause() const;
};
ObstructionReport obstruction_scan(const SolitonSystem& sys, std::span<const FiberModel> fibers,
                                   const Trajectory& tr, double hw_tol = 1e-3,
                                   double eig_tol = 1e-6);

}  // namespace ricci
