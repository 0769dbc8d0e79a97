#include "ricci/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"
#include "ricci/errors.hpp"

namespace ricci {
namespace {

using ojson = nlohmann::ordered_json;

// The seven identity-residual keys in their fixed report order.
constexpr const char* kResidualKeys[] = {
    "warp_ode",       "radial_match", "radial_spread", "xi_consistency",
    "riccati",        "quadratic_bc", "bc_poly"};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_shapes(const Scenario& sc, const Trajectory& tr,
                  std::span<const SpectrumSample> samples) {
  if (tr.states.empty()) throw InvalidStateError("trajectory has no states");
  if (!samples.empty() && samples.size() != tr.states.size())
    throw DimensionError("sample count " + std::to_string(samples.size()) +
                         " does not match trajectory node count " +
                         std::to_string(tr.states.size()));
  const std::size_t k = sc.fibers.size();
  for (const SolitonState& st : tr.states)
    if (st.h.size() != k || st.hp.size() != k)
      throw DimensionError("trajectory state has " +
                           std::to_string(st.h.size()) + " warps but " +
                           std::to_string(k) + " fibers are declared");
}

}  // namespace

std::string report_json(const Scenario& sc, const Trajectory& tr,
                        std::span<const SpectrumSample> samples) {
  check_shapes(sc, tr, samples);
  const SolitonSystem sys = sc.system();

  ojson scenario;
  scenario["name"] = sc.name;
  scenario["source"] = to_string(sc.source);
  scenario["n"] = sys.total_dim();
  scenario["k"] = sys.fiber_count();
  scenario["lambda"] = sc.lambda;
  ojson fibers = ojson::array();
  for (const FiberModel& f : sc.fibers) {
    ojson fj;
    fj["kind"] = to_string(f.kind);
    fj["dim"] = f.dim;
    fj["scale"] = f.scale;
    fibers.push_back(fj);
  }
  scenario["fibers"] = fibers;
  ojson window;
  window["s_start"] = sc.init.s;
  window["s_end"] = sc.s_end;
  window["grid_points"] = sc.grid_points;
  scenario["window"] = window;
  scenario["eigenvalue_tol"] = sc.eigenvalue_tol;

  ojson outcome;
  outcome["truncated"] = tr.truncated;
  outcome["steps"] = tr.steps;
  outcome["rhs_evals"] = tr.rhs_evals;
  ojson events = ojson::array();
  for (const OdeEvent& ev : tr.events) {
    ojson ej;
    ej["kind"] = to_string(ev.kind);
    ej["s"] = ev.s;
    if (ev.fiber >= 0) ej["fiber"] = ev.fiber;
    events.push_back(ej);
  }
  outcome["events"] = events;

  const double q0 = conserved_quantity(sys, tr.states.front());
  double drift = 0.0;
  for (const SolitonState& st : tr.states)
    drift = std::max(drift, std::abs(conserved_quantity(sys, st) - q0));

  ojson conserved;
  conserved["initial"] = q0;
  conserved["max_drift"] = drift;

  std::size_t regular = 0;
  int max_distinct = 0;
  std::map<std::string, double> worst;
  for (const SpectrumSample& sm : samples) {
    if (sm.regular) ++regular;
    max_distinct = std::max(
        max_distinct, count_distinct_eigenvalues(sm, sc.eigenvalue_tol));
    for (const auto& [key, val] : sm.residuals) {
      auto it = worst.find(key);
      if (it == worst.end())
        worst.emplace(key, val);
      else
        it->second = std::max(it->second, val);
    }
  }
  ojson spectrum;
  spectrum["samples"] = samples.size();
  spectrum["regular_samples"] = regular;
  spectrum["max_distinct"] = max_distinct;
  ojson residuals;
  for (const char* key : kResidualKeys)
    if (auto it = worst.find(key); it != worst.end()) residuals[key] = it->second;
  spectrum["max_residuals"] = residuals;

  ojson root;
  root["scenario"] = scenario;
  root["outcome"] = outcome;
  root["conserved"] = conserved;
  root["spectrum"] = spectrum;
  return root.dump(2) + "\n";
}

std::string report_csv(const Scenario& sc, const Trajectory& tr,
                       std::span<const SpectrumSample> samples) {
  check_shapes(sc, tr, samples);
  const std::size_t k = sc.fibers.size();

  std::string out;
  out += "s,f,fp";
  for (std::size_t i = 0; i < k; ++i) out += ",h_" + std::to_string(i);
  for (std::size_t i = 0; i < k; ++i) out += ",hp_" + std::to_string(i);
  out += ",lambda1";
  for (std::size_t i = 0; i < k; ++i) out += ",lambda_f_" + std::to_string(i);
  for (std::size_t i = 0; i < k; ++i) out += ",xi_" + std::to_string(i);
  out += ",B,C";
  for (const char* key : kResidualKeys) out += std::string(",res_") + key;
  out += ",distinct_count\n";

  for (std::size_t row = 0; row < tr.states.size(); ++row) {
    const SolitonState& st = tr.states[row];
    out += fmt(st.s) + "," + fmt(st.f) + "," + fmt(st.fp);
    for (double h : st.h) out += "," + fmt(h);
    for (double hp : st.hp) out += "," + fmt(hp);
    if (row < samples.size()) {
      const SpectrumSample& sm = samples[row];
      out += "," + fmt(sm.lambda1);
      for (double lf : sm.fiber_lambda) out += "," + fmt(lf);
      for (double xi : sm.xi) out += "," + fmt(xi);
      out += sm.regular ? "," + fmt(sm.B) + "," + fmt(sm.C) : ",,";
      for (const char* key : kResidualKeys) {
        auto it = sm.residuals.find(key);
        out += it == sm.residuals.end() ? "," : "," + fmt(it->second);
      }
      out += "," +
             std::to_string(count_distinct_eigenvalues(sm, sc.eigenvalue_tol));
    } else {
      // no spectrum computed (for example a truncated run): bare state row
      out.append(1 + k + k + 2 + std::size(kResidualKeys) + 1, ',');
    }
    out += "\n";
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << content;
  if (!out) throw Error("failed writing output file: " + path);
}

}  // namespace ricci
