#pragma once

// Scenario files: strict JSON descriptions of soliton runs.
//
// Schema (unknown keys anywhere are rejected with SchemaError):
// {
//   "name": string,                       required
//   "description": string,                optional
//   -- exactly one of the three data sources --
//   "fibers": [{"kind": "sphere"|"flat"|"hyperbolic",
//               "dim": int, "scale": number}, ...],
//   "lambda": number,
//   "initial": {"s": number, "h": [...], "hp": [...],
//               "f": number, "fp": number},
//   -- or --
//   "known": {"case": "gaussian"|"cylinder"|"sphere",
//             "n": int, "lambda": number},
//   -- or --
//   "random": {"n": int, "k": int, "seed": int},
//
//   "window": {"s_end": number, "grid_points": int optional (default 161)},
//   "control": { optional overrides of the integrator controls:
//                "abs_tol", "rel_tol", "h_init", "h_min", "h_max",
//                "fixed_step", "fixed_dt", "max_steps", "collapse_eps",
//                "critical_eps", "arm_eps" },
//   "eigenvalue_tol": number optional (default 1e-6)
// }
// For "known" the initial state sits at the customary anchor of the case;
// for "random" the fibers, lambda, and initial state come from the seeded
// generator, so they cannot also be given explicitly.

#include <string>
#include <vector>

#include "ricci/ode.hpp"

namespace ricci {

enum class ScenarioSource { explicit_data, known_case, random_draw };
const char* to_string(ScenarioSource s);

struct Scenario {
  std::string name;
  std::string description;
  ScenarioSource source = ScenarioSource::explicit_data;

  std::vector<FiberModel> fibers;
  double lambda = 0.0;
  SolitonState init;

  // known_case only
  std::string known_case;
  int known_n = 0;

  // random_draw only
  int random_n = 0;
  int random_k = 0;
  unsigned long random_seed = 0;

  double s_end = 0.0;
  int grid_points = 161;
  OdeControl control;
  double eigenvalue_tol = 1e-6;

  SolitonSystem system() const { return make_system(fibers, lambda); }

  // Exact closed-form spec; only known cases have one (InvalidStateError
  // otherwise -- integrated data is realized through realize_spec instead).
  WarpedSpec closed_form() const;
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

}  // namespace ricci
