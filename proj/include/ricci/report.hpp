#pragma once

// Deterministic run reports.  Same scenario + trajectory + samples always
// produce byte-identical output: no timestamps, no pointers, no locale
// dependence.  Numbers are printed with %.17g (CSV) or shortest-round-trip
// (JSON), both of which reproduce the underlying doubles exactly.

#include <span>
#include <string>

#include "ricci/ode.hpp"
#include "ricci/scenario.hpp"
#include "ricci/spectrum.hpp"

namespace ricci {

// Summary document: scenario echo, integration outcome (events, step
// counts), conserved-quantity drift, worst residual per identity, and the
// largest distinct-eigenvalue count seen along the run.
std::string report_json(const Scenario& sc, const Trajectory& tr,
                        std::span<const SpectrumSample> samples);

// One row per grid node.  Fixed column order:
//   s, f, fp,
//   h_0..h_{k-1}, hp_0..hp_{k-1},
//   lambda1, lambda_f_0..lambda_f_{k-1}, xi_0..xi_{k-1},
//   B, C,
//   res_warp_ode, res_radial_match, res_radial_spread,
//   res_xi_consistency, res_riccati, res_quadratic_bc, res_bc_poly,
//   distinct_count
// Cells whose quantity is undefined at the node (B, C and the
// regular-only residuals at singular points, res_bc_poly where the stencil
// window straddles a singular node) are left empty.
std::string report_csv(const Scenario& sc, const Trajectory& tr,
                       std::span<const SpectrumSample> samples);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ricci
