// riccilab: command-line laboratory for multiply warped gradient solitons.
//
// Subcommands:
//   verify-known    integrate a closed-form reference and check it against
//                   itself: reproduction, conserved drift, structure
//                   identities, distinct-eigenvalue count
//   integrate       run a scenario, print the outcome, optionally write
//                   JSON/CSV reports
//   spectrum        run a scenario and print the worst identity residuals
//   check-theorem   eigenvalue bound (k <= 2) or the joint-condition
//                   obstruction scan (k >= 3)
//   oracle-compare  compare warped-product formulas against the coordinate
//                   chart oracle (exact for known cases, spline-realized
//                   for integrated data)
//
// Exit codes: 0 all checks pass, 1 a check fails, 2 bad input (usage,
// schema, file), 3 the run hit a singularity or was truncated.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ricci/chart.hpp"
#include "ricci/errors.hpp"
#include "ricci/ode.hpp"
#include "ricci/report.hpp"
#include "ricci/scenario.hpp"
#include "ricci/spectrum.hpp"
#include "ricci/warped.hpp"

namespace {

using namespace ricci;

std::string fe(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fg(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

constexpr const char* kIdentityKeys[] = {"xi_consistency", "riccati",
                                         "quadratic_bc", "bc_poly"};
constexpr const char* kGeometryKeys[] = {"warp_ode", "radial_match",
                                         "radial_spread"};

struct Checker {
  bool all_ok = true;
  void line(bool ok, const std::string& what) {
    std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    if (!ok) all_ok = false;
  }
  int exit_code() const { return all_ok ? 0 : 1; }
};

double state_gap(const SolitonState& a, const SolitonState& b) {
  double m = std::abs(a.f - b.f);
  m = std::max(m, std::abs(a.fp - b.fp));
  for (std::size_t i = 0; i < a.h.size(); ++i) {
    m = std::max(m, std::abs(a.h[i] - b.h[i]));
    m = std::max(m, std::abs(a.hp[i] - b.hp[i]));
  }
  return m;
}

template <std::size_t N>
double max_residual(const std::vector<SpectrumSample>& samples,
                    const char* const (&keys)[N]) {
  double worst = 0.0;
  for (const auto& sm : samples)
    for (const char* key : keys)
      if (auto it = sm.residuals.find(key); it != sm.residuals.end())
        worst = std::max(worst, it->second);
  return worst;
}

int max_distinct(const std::vector<SpectrumSample>& samples, double tol) {
  int worst = 0;
  for (const auto& sm : samples)
    worst = std::max(worst, count_distinct_eigenvalues(sm, tol));
  return worst;
}

std::size_t regular_count(const std::vector<SpectrumSample>& samples) {
  std::size_t n = 0;
  for (const auto& sm : samples) n += sm.regular ? 1 : 0;
  return n;
}

void print_outcome(const Trajectory& tr) {
  std::printf("  nodes %zu, steps %zu, rhs evals %zu, truncated %s\n",
              tr.states.size(), tr.steps, tr.rhs_evals,
              tr.truncated ? "yes" : "no");
  for (const OdeEvent& ev : tr.events) {
    std::printf("  event %s at s = %s", to_string(ev.kind), fg(ev.s).c_str());
    if (ev.fiber >= 0) std::printf(" (fiber %d)", ev.fiber);
    std::printf("\n");
  }
}

void write_reports(const Scenario& sc, const Trajectory& tr,
                   const std::vector<SpectrumSample>& samples,
                   const std::string& json_path, const std::string& csv_path) {
  if (!json_path.empty()) {
    write_text_file(json_path, report_json(sc, tr, samples));
    std::printf("  wrote %s\n", json_path.c_str());
  }
  if (!csv_path.empty()) {
    write_text_file(csv_path, report_csv(sc, tr, samples));
    std::printf("  wrote %s\n", csv_path.c_str());
  }
}

// Chart sample point: radial coordinate s, fixed generic fiber coordinates.
std::vector<double> chart_coords(int dim, double s) {
  std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
  x[0] = s;
  for (int j = 1; j < dim; ++j) x[j] = 0.7 + 0.15 * ((j - 1) % 4);
  return x;
}

int run_verify_known(const std::string& name, int n, double lambda,
                     double span, int grid, const std::string& json_path,
                     const std::string& csv_path) {
  KnownSoliton ks = known_solution(name, n, lambda);
  std::printf("verify-known: %s, n = %d, lambda = %s\n", name.c_str(), n,
              fg(lambda).c_str());

  const SolitonState init = ks.state_at(ks.anchor);
  Trajectory tr = integrate(ks.sys, init, ks.anchor + span, grid);
  print_outcome(tr);
  if (tr.truncated) {
    std::printf("  run truncated before the window end; shrink --span\n");
    return 3;
  }
  std::vector<SpectrumSample> samples = trajectory_spectrum(ks.sys, tr);

  double reproduction = 0.0;
  for (const SolitonState& st : tr.states)
    reproduction = std::max(reproduction, state_gap(st, ks.state_at(st.s)));
  const double drift = conserved_drift(ks.sys, tr);
  const double geom = max_residual(samples, kGeometryKeys);
  const double ident = max_residual(samples, kIdentityKeys);
  const std::size_t regular = regular_count(samples);
  const int distinct = max_distinct(samples, 1e-6);
  const int expected = name == "cylinder" ? 2 : 1;

  Checker ck;
  ck.line(reproduction < 1e-6,
          "closed-form reproduction " + fe(reproduction) + " < 1e-06");
  ck.line(drift < 1e-6, "conserved drift " + fe(drift) + " < 1e-06");
  ck.line(geom < 1e-4, "geometry residuals " + fe(geom) + " < 1e-04");
  if (regular > 0)
    ck.line(ident < 1e-4, "soliton identities " + fe(ident) + " < 1e-04 (" +
                              std::to_string(regular) + " regular samples)");
  else
    std::printf("  [--] soliton identities skipped: gradient vanishes "
                "identically on this case\n");
  ck.line(distinct == expected, "distinct eigenvalues " +
                                    std::to_string(distinct) + " == " +
                                    std::to_string(expected));

  Scenario sc;
  sc.name = "verify-known-" + name;
  sc.source = ScenarioSource::known_case;
  sc.known_case = name;
  sc.known_n = n;
  sc.fibers = ks.spec.fibers;
  sc.lambda = lambda;
  sc.init = init;
  sc.s_end = ks.anchor + span;
  sc.grid_points = grid;
  write_reports(sc, tr, samples, json_path, csv_path);

  std::printf("verify-known: %s\n", ck.all_ok ? "PASS" : "FAIL");
  return ck.exit_code();
}

int run_integrate(const std::string& path, const std::string& json_path,
                  const std::string& csv_path) {
  Scenario sc = load_scenario(path);
  SolitonSystem sys = sc.system();
  std::printf("integrate: %s (%s source, n = %d, k = %d, lambda = %s)\n",
              sc.name.c_str(), to_string(sc.source), sys.total_dim(),
              sys.fiber_count(), fg(sc.lambda).c_str());
  Trajectory tr =
      integrate(sys, sc.init, sc.s_end, sc.grid_points, sc.control);
  print_outcome(tr);
  std::printf("  conserved drift %s\n", fe(conserved_drift(sys, tr)).c_str());

  std::vector<SpectrumSample> samples;
  if (tr.states.size() >= 5) samples = trajectory_spectrum(sys, tr);
  write_reports(sc, tr, samples, json_path, csv_path);
  return tr.truncated ? 3 : 0;
}

int run_spectrum(const std::string& path, const std::string& csv_path) {
  Scenario sc = load_scenario(path);
  SolitonSystem sys = sc.system();
  Trajectory tr =
      integrate(sys, sc.init, sc.s_end, sc.grid_points, sc.control);
  std::printf("spectrum: %s\n", sc.name.c_str());
  print_outcome(tr);
  if (tr.states.size() < 5) {
    std::printf("  too few nodes for stencil analysis\n");
    return 3;
  }
  std::vector<SpectrumSample> samples = trajectory_spectrum(sys, tr);

  std::printf("  %-16s %s\n", "residual", "max over grid");
  for (const char* key : {"warp_ode", "radial_match", "radial_spread",
                          "xi_consistency", "riccati", "quadratic_bc",
                          "bc_poly"}) {
    double worst = -1.0;
    for (const auto& sm : samples)
      if (auto it = sm.residuals.find(key); it != sm.residuals.end())
        worst = std::max(worst, it->second);
    if (worst >= 0)
      std::printf("  %-16s %s\n", key, fe(worst).c_str());
    else
      std::printf("  %-16s (never defined on this run)\n", key);
  }
  std::printf("  regular samples %zu of %zu\n", regular_count(samples),
              samples.size());
  std::printf("  max distinct eigenvalues %d (tol %s)\n",
              max_distinct(samples, sc.eigenvalue_tol),
              fe(sc.eigenvalue_tol).c_str());
  if (!csv_path.empty()) {
    write_text_file(csv_path, report_csv(sc, tr, samples));
    std::printf("  wrote %s\n", csv_path.c_str());
  }
  return tr.truncated ? 3 : 0;
}

int run_check_theorem(const std::string& path, double eig_tol_override) {
  Scenario sc = load_scenario(path);
  SolitonSystem sys = sc.system();
  const double eig_tol =
      eig_tol_override > 0 ? eig_tol_override : sc.eigenvalue_tol;
  std::printf("check-theorem: %s (k = %d, eigenvalue tol %s)\n",
              sc.name.c_str(), sys.fiber_count(), fe(eig_tol).c_str());
  Trajectory tr =
      integrate(sys, sc.init, sc.s_end, sc.grid_points, sc.control);
  print_outcome(tr);
  if (tr.truncated) {
    std::printf("  run truncated; theorem checks need the full window\n");
    return 3;
  }

  if (sys.fiber_count() >= 3) {
    ObstructionReport rep = obstruction_scan(sys, sc.fibers, tr, 1e-3, eig_tol);
    std::printf("  max harmonic-Weyl residual %s (tol %s)\n",
                fe(rep.max_hw_residual).c_str(), fe(rep.hw_tol).c_str());
    std::printf("  max distinct eigenvalues %d\n", rep.max_distinct);
    std::printf("  min pairwise xi gap %s\n", fe(rep.min_xi_gap).c_str());
    if (rep.joint_condition()) {
      std::printf("  [FAIL] joint condition satisfied: harmonic Weyl and a "
                  "fourth eigenvalue coexist -- counterexample to the "
                  "eigenvalue bound\n");
      return 1;
    }
    std::printf("  [ok] joint condition impossible: %s\n",
                rep.failing_clause().c_str());
    return 0;
  }

  std::vector<SpectrumSample> samples = trajectory_spectrum(sys, tr);
  const double geom = max_residual(samples, kGeometryKeys);
  const double ident = max_residual(samples, kIdentityKeys);
  const int distinct = max_distinct(samples, eig_tol);

  Checker ck;
  ck.line(geom < 1e-4, "geometry residuals " + fe(geom) + " < 1e-04");
  if (regular_count(samples) > 0)
    ck.line(ident < 1e-4, "soliton identities " + fe(ident) + " < 1e-04");
  ck.line(distinct <= 3, "distinct eigenvalues " + std::to_string(distinct) +
                             " <= 3 everywhere");
  std::printf("check-theorem: %s\n", ck.all_ok ? "PASS" : "FAIL");
  return ck.exit_code();
}

int run_oracle_compare(const std::string& path, int points, double tol_arg) {
  Scenario sc = load_scenario(path);
  SolitonSystem sys = sc.system();
  if (points < 1) throw SchemaError("--samples must be positive");

  WarpedSpec spec;
  std::vector<double> sample_s;
  std::vector<std::vector<double>> expected_eigs;  // with multiplicity, sorted
  double tol = tol_arg;

  if (sc.source == ScenarioSource::known_case) {
    // Exact path: closed-form warps, dual-number derivatives.
    if (tol <= 0) tol = 1e-8;
    spec = sc.closed_form();
    for (int i = 0; i < points; ++i) {
      const double t = points == 1 ? 0.5 : double(i) / (points - 1);
      sample_s.push_back(sc.init.s + (sc.s_end - sc.init.s) *
                                         (0.05 + 0.9 * t));
    }
    for (double s : sample_s) {
      std::vector<double> eig = ricci_closed_form(spec, s).with_multiplicity();
      std::sort(eig.begin(), eig.end());
      expected_eigs.push_back(eig);
    }
    std::printf("oracle-compare: %s (exact closed form, tol %s)\n",
                sc.name.c_str(), fe(tol).c_str());
  } else {
    // Integrated path: spline realization; interpolation error rules, so
    // the default tolerance is the spline floor, not machine precision.
    if (tol <= 0) tol = 1e-3;
    Trajectory tr =
        integrate(sys, sc.init, sc.s_end, sc.grid_points, sc.control);
    if (tr.truncated) {
      print_outcome(tr);
      std::printf("  run truncated; cannot realize the window\n");
      return 3;
    }
    spec = realize_spec(sc.fibers, tr);
    std::vector<SpectrumSample> samples = trajectory_spectrum(sys, tr);
    // keep clear of the natural-spline end bias
    const std::size_t margin = 8;
    if (samples.size() < 2 * margin + 2)
      throw DimensionError("scenario grid too small for oracle comparison");
    for (int i = 0; i < points; ++i) {
      const std::size_t lo = margin;
      const std::size_t hi = samples.size() - 1 - margin;
      const std::size_t idx =
          points == 1 ? (lo + hi) / 2
                      : lo + (hi - lo) * std::size_t(i) / (points - 1);
      sample_s.push_back(samples[idx].s);
      std::vector<double> eig;
      eig.push_back(samples[idx].lambda1);
      for (std::size_t f = 0; f < samples[idx].fiber_lambda.size(); ++f)
        eig.insert(eig.end(), sc.fibers[f].dim, samples[idx].fiber_lambda[f]);
      std::sort(eig.begin(), eig.end());
      expected_eigs.push_back(eig);
    }
    std::printf("oracle-compare: %s (spline-realized, tol %s)\n",
                sc.name.c_str(), fe(tol).c_str());
  }

  MetricChart chart = to_chart(spec);
  Checker ck;
  double worst_gap = 0.0, worst_hw = 0.0;
  for (std::size_t i = 0; i < sample_s.size(); ++i) {
    const std::vector<double> x = chart_coords(chart.dim(), sample_s[i]);
    CurvaturePack pack = curvature_pack(chart, x);
    std::vector<double> chart_eigs = generalized_eigenvalues(pack.ric, pack.g);
    double gap = 0.0;
    for (std::size_t j = 0; j < chart_eigs.size(); ++j)
      gap = std::max(gap, std::abs(chart_eigs[j] - expected_eigs[i][j]));
    worst_gap = std::max(worst_gap, gap);
    if (spec.potential.valid())
      worst_hw = std::max(worst_hw,
                          harmonic_weyl_residual_raw(chart, x));
    std::printf("  s = %-22s eigenvalue gap %s\n", fg(sample_s[i]).c_str(),
                fe(gap).c_str());
  }
  ck.line(worst_gap < tol,
          "chart vs warped-product eigenvalues " + fe(worst_gap) + " < " +
              fe(tol));
  std::printf("  max harmonic-Weyl residual %s (reported, not gated)\n",
              fe(worst_hw).c_str());
  std::printf("oracle-compare: %s\n", ck.all_ok ? "PASS" : "FAIL");
  return ck.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for multiply warped gradient Ricci "
               "solitons"};
  app.require_subcommand(1);

  std::string kn_case;
  int kn_n = 4;
  double kn_lambda = 1.0, kn_span = 1.2;
  int kn_grid = 121;
  std::string kn_json, kn_csv;
  CLI::App* verify = app.add_subcommand(
      "verify-known", "integrate a closed-form reference and check it");
  verify->add_option("--case", kn_case, "gaussian | cylinder | sphere")
      ->required();
  verify->add_option("--n", kn_n, "total dimension (default 4)");
  verify->add_option("--lambda", kn_lambda, "soliton constant")->required();
  verify->add_option("--span", kn_span, "window length from the anchor");
  verify->add_option("--grid", kn_grid, "output grid nodes");
  verify->add_option("--json", kn_json, "write a JSON report here");
  verify->add_option("--csv", kn_csv, "write a CSV report here");

  std::string in_path, in_json, in_csv;
  CLI::App* integ = app.add_subcommand("integrate", "run a scenario");
  integ->add_option("--scenario", in_path, "scenario JSON file")->required();
  integ->add_option("--json", in_json, "write a JSON report here");
  integ->add_option("--csv", in_csv, "write a CSV report here");

  std::string sp_path, sp_csv;
  CLI::App* spect =
      app.add_subcommand("spectrum", "identity residual table for a scenario");
  spect->add_option("--scenario", sp_path, "scenario JSON file")->required();
  spect->add_option("--csv", sp_csv, "write a CSV report here");

  std::string th_path;
  double th_eig_tol = 0.0;
  CLI::App* theorem = app.add_subcommand(
      "check-theorem",
      "eigenvalue bound (k <= 2) or joint-condition obstruction (k >= 3)");
  theorem->add_option("--scenario", th_path, "scenario JSON file")->required();
  theorem->add_option("--eig-tol", th_eig_tol,
                      "override the scenario eigenvalue tolerance");

  std::string oc_path;
  int oc_points = 5;
  double oc_tol = 0.0;
  CLI::App* oracle = app.add_subcommand(
      "oracle-compare", "warped-product formulas vs the chart oracle");
  oracle->add_option("--scenario", oc_path, "scenario JSON file")->required();
  oracle->add_option("--samples", oc_points, "number of comparison points");
  oracle->add_option("--tol", oc_tol,
                     "eigenvalue gap tolerance (default 1e-8 exact, "
                     "1e-3 spline)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed())
      return run_verify_known(kn_case, kn_n, kn_lambda, kn_span, kn_grid,
                              kn_json, kn_csv);
    if (integ->parsed()) return run_integrate(in_path, in_json, in_csv);
    if (spect->parsed()) return run_spectrum(sp_path, sp_csv);
    if (theorem->parsed()) return run_check_theorem(th_path, th_eig_tol);
    if (oracle->parsed())
      return run_oracle_compare(oc_path, oc_points, oc_tol);
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DimensionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const SingularPointError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;  // unreachable: require_subcommand(1)
}
