// Tests for the pointwise Ricci spectrum, the soliton structure identities,
// distinct-eigenvalue counting, Laplacian cross-checks, and the three-fiber
// obstruction scan.
//
// Hand-frozen oracles used below (n = 4 single-fiber references):
//   gaussian (lambda = 1): eigenvalues all 0, B = 3/s - s, C = 1
//   cylinder (lambda = 2): eigenvalues {0, 2}, B = -f' = -2s, C = 2
//   sphere   (lambda = 3): eigenvalues all 3, f' = 0 -> irregular samples
// B = sum_l r_l xi_l - f' and C = lambda + h''/h on exact solutions.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ricci/chart.hpp"
#include "ricci/spectrum.hpp"

using namespace ricci;

namespace {

constexpr double kPi = 3.14159265358979323846;

double residual(const SpectrumSample& sp, const char* key) {
  auto it = sp.residuals.find(key);
  REQUIRE(it != sp.residuals.end());
  return it->second;
}

double max_residual_over(std::span<const SpectrumSample> samples, const char* key,
                         bool regular_only) {
  double worst = 0.0;
  int seen = 0;
  for (const auto& sp : samples) {
    if (regular_only && !sp.regular) continue;
    auto it = sp.residuals.find(key);
    if (it == sp.residuals.end()) continue;
    worst = std::max(worst, it->second);
    ++seen;
  }
  REQUIRE(seen > 0);
  return worst;
}

// Expand eigenvalues with multiplicity: lambda_1 once, fiber values r_i times.
std::vector<double> with_multiplicity(const SpectrumSample& sp) {
  std::vector<double> v{sp.lambda1};
  for (std::size_t i = 0; i < sp.fiber_lambda.size(); ++i)
    v.insert(v.end(), sp.multiplicity[i], sp.fiber_lambda[i]);
  std::sort(v.begin(), v.end());
  return v;
}

// Generic two-fiber geometry with a potential: not a soliton, which makes it
// a strong cross-check target for the chart oracle and a negative control
// for the soliton-only identities.
WarpedSpec generic_two_fiber_with_potential() {
  WarpedSpec w;
  w.fibers = {{FiberKind::sphere, 2, 1.0}, {FiberKind::hyperbolic, 3, 1.3}};
  w.warps = {SmoothFn::from_callable([](auto s) { return 1.0 + 0.3 * s * s; }),
             SmoothFn::cosh_fn(1.0, 0.8, 0.2)};
  w.potential = SmoothFn::quadratic(0.3, 0.1, 0.0);
  return w;
}

struct ThreeFiberData {
  std::vector<FiberModel> fibers;
  double lambda = 0.0;
  SolitonState init;
};

// Distinct xi and generic kappa: four distinct Ricci eigenvalues, far from
// the harmonic-Weyl structure.
ThreeFiberData three_fiber_generic() {
  ThreeFiberData d;
  d.fibers = {{FiberKind::sphere, 2, 1.0},
              {FiberKind::sphere, 2, 1.15},
              {FiberKind::sphere, 2, 1.3}};
  d.lambda = 1.0;
  d.init.s = 0.0;
  d.init.h = {1.0, 1.1, 0.9};
  d.init.hp = {0.2 * 1.0, -0.3 * 1.1, 0.5 * 0.9};
  d.init.f = 0.0;
  d.init.fp = 1.2;
  return d;
}

// h_i chosen so that all u_i = h_i''/h_i coincide at s = 0 (value 0.3): the
// pointwise harmonic-Weyl condition holds at the anchor but the flow does
// not preserve it.
ThreeFiberData three_fiber_constrained() {
  ThreeFiberData d;
  d.fibers.assign(3, FiberModel{FiberKind::sphere, 2, 1.0});  // kappa = 1 each
  d.lambda = 1.0;
  const double xi[3] = {0.3, -0.2, 0.7};
  const double fp = 1.0, ustar = 0.3;
  double S = 0.0;
  for (double x : xi) S += 2.0 * x;
  d.init.s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double q = ustar - xi[i] * xi[i] + xi[i] * S - fp * xi[i] + d.lambda;
    REQUIRE(q > 0);
    const double h = 1.0 / std::sqrt(q);  // kappa/h^2 = q
    d.init.h.push_back(h);
    d.init.hp.push_back(xi[i] * h);
  }
  d.init.f = 0.0;
  d.init.fp = fp;
  return d;
}

// Proportional warps over matched fibers: kappa_i/h_i^2 and xi_i shared, so
// the three fibers act as one Einstein factor and the flow preserves the
// harmonic-Weyl structure (at most two distinct eigenvalues).
ThreeFiberData three_fiber_proportional() {
  ThreeFiberData d;
  d.fibers = {{FiberKind::sphere, 2, 1.0},
              {FiberKind::sphere, 2, 1.25},
              {FiberKind::sphere, 2, 0.8}};
  d.lambda = 1.2;
  d.init.s = 0.0;
  for (const auto& f : d.fibers) {
    const double h = std::sqrt(fiber_kappa(f));  // kappa/h^2 = 1 for all
    d.init.h.push_back(h);
    d.init.hp.push_back(0.25 * h);
  }
  d.init.f = 0.0;
  d.init.fp = 1.1;
  return d;
}

}  // namespace

TEST_CASE("closed-form samples on the references have vanishing residuals") {
  auto gauss = known_solution("gaussian", 4, 1.0);
  for (double s : {0.8, 1.2, 2.0}) {
    auto sp = spectrum_at(gauss.spec, gauss.lambda, s);
    CHECK(sp.regular);
    for (const auto& [key, val] : sp.residuals) {
      CAPTURE(key);
      CHECK(val < 1e-10);
    }
    // flat metric: every Ricci eigenvalue vanishes
    CHECK(std::abs(sp.lambda1) < 1e-12);
    CHECK(std::abs(sp.fiber_lambda[0]) < 1e-12);
    CHECK(count_distinct_eigenvalues(sp) == 1);
    CHECK(sp.B == doctest::Approx(3.0 / s - s).epsilon(1e-12));  // sum r xi - f'
    CHECK(sp.C == doctest::Approx(1.0).epsilon(1e-12));          // lambda + u
  }

  auto cyl = known_solution("cylinder", 4, 2.0);
  for (double s : {0.4, 0.7}) {
    auto sp = spectrum_at(cyl.spec, cyl.lambda, s);
    CHECK(sp.regular);
    for (const auto& [key, val] : sp.residuals) {
      CAPTURE(key);
      CHECK(val < 1e-10);
    }
    CHECK(std::abs(sp.lambda1) < 1e-12);
    CHECK(sp.fiber_lambda[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(count_distinct_eigenvalues(sp) == 2);
    CHECK(sp.B == doctest::Approx(-2.0 * s).epsilon(1e-12));
    CHECK(sp.C == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(sp.scal == doctest::Approx(6.0).epsilon(1e-12));
  }

  // sphere: f' = 0 everywhere, so every sample is singular for B and C, but
  // the potential-free identities still hold and all eigenvalues equal n-1.
  auto sph = known_solution("sphere", 4, 3.0);
  auto sp = spectrum_at(sph.spec, sph.lambda, 1.1);
  CHECK_FALSE(sp.regular);
  CHECK(sp.residuals.count("quadratic_bc") == 0);
  CHECK(residual(sp, "warp_ode") < 1e-12);
  CHECK(residual(sp, "radial_match") < 1e-12);
  CHECK(residual(sp, "radial_spread") < 1e-12);
  CHECK(sp.lambda1 == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sp.fiber_lambda[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(count_distinct_eigenvalues(sp) == 1);
}

TEST_CASE("sample eigenvalues match the chart oracle on a generic geometry") {
  auto w = generic_two_fiber_with_potential();
  const double lambda = 0.7;
  auto chart = to_chart(w);
  for (double s : {0.45, 1.1}) {
    auto sp = spectrum_at(w, lambda, s);
    // chart point (s, generic fiber coordinates)
    std::vector<double> x(chart.dim());
    x[0] = s;
    for (int j = 1; j < chart.dim(); ++j) x[j] = 0.7 + 0.15 * ((j - 1) % 4);
    auto p = curvature_pack(chart, x);
    auto oracle = generalized_eigenvalues(p.ric, p.g);  // ascending, with mult
    auto mine = with_multiplicity(sp);
    REQUIRE(oracle.size() == mine.size());
    for (std::size_t i = 0; i < mine.size(); ++i)
      CHECK(mine[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
    CHECK(sp.scal == doctest::Approx(p.scal).epsilon(1e-10));
  }
}

TEST_CASE("negative controls: non-solitons violate the named identities") {
  // right geometry, wrong potential: f = s^3 on the flat cone
  WarpedSpec wrong;
  wrong.fibers = {{FiberKind::sphere, 3, 1.0}};
  wrong.warps = {SmoothFn::linear(1.0, 0.0)};
  wrong.potential = SmoothFn::from_callable([](auto s) { return s * s * s; });
  auto sp = spectrum_at(wrong, 1.0, 0.9);
  CHECK(residual(sp, "radial_match") > 0.1);
  CHECK(residual(sp, "quadratic_bc") > 0.1);
  CHECK(residual(sp, "bc_poly") > 0.1);
  // the geometry alone still satisfies the potential-free warp identity
  CHECK(residual(sp, "radial_spread") < 1e-12);

  // cylinder geometry with mismatched fiber curvature (kappa != lambda).
  // R is constant here, so the derivative-level bc_poly identity stays
  // silent; the pointwise identities flag the mismatch instead.
  WarpedSpec mism;
  const double lambda = 2.0;
  mism.fibers = {{FiberKind::sphere, 3, std::sqrt(2.0 / (lambda + 0.3))}};
  mism.warps = {SmoothFn::constant(1.0)};
  mism.potential = SmoothFn::quadratic(0.5 * lambda, 0.0, 0.0);
  sp = spectrum_at(mism, lambda, 0.8);
  CHECK(residual(sp, "warp_ode") > 0.01);
  CHECK(residual(sp, "quadratic_bc") > 0.01);
  CHECK(residual(sp, "xi_consistency") > 0.01);
}

TEST_CASE("trajectory spectrum: stencil residuals on integrated references") {
  // cylinder crossing the critical point of f at s = 0
  auto cyl = known_solution("cylinder", 4, 2.0);
  auto tr = integrate(cyl.sys, cyl.state_at(-1.0), 1.0, 41);
  REQUIRE_FALSE(tr.truncated);
  auto samples = trajectory_spectrum(cyl.sys, tr);
  REQUIRE(samples.size() == 41);

  // node 20 sits exactly at s = 0 where f' vanishes
  CHECK_FALSE(samples[20].regular);
  CHECK(samples[20].residuals.count("quadratic_bc") == 0);
  // bc_poly needs a fully regular 5-point window: present at node 17,
  // absent at node 19 (window touches node 20)
  CHECK(samples[17].residuals.count("bc_poly") == 1);
  CHECK(samples[19].residuals.count("bc_poly") == 0);
  // the singular point still reports the geometry-only residuals
  CHECK(residual(samples[20], "warp_ode") < 1e-8);

  CHECK(max_residual_over(samples, "warp_ode", false) < 1e-8);
  CHECK(max_residual_over(samples, "radial_match", false) < 1e-8);
  CHECK(max_residual_over(samples, "radial_spread", false) < 1e-8);
  CHECK(max_residual_over(samples, "xi_consistency", true) < 1e-8);
  CHECK(max_residual_over(samples, "riccati", true) < 1e-8);
  CHECK(max_residual_over(samples, "quadratic_bc", true) < 1e-8);
  CHECK(max_residual_over(samples, "bc_poly", true) < 1e-7);
  CHECK(max_distinct_over(samples) == 2);

  // gaussian: regular everywhere on [1, 2.5], single eigenvalue 0.
  // The xi' and B'/C' stencil floors scale like ds^4 |d^5 xi|, so the grid
  // is denser than the residual thresholds by a comfortable margin.
  auto gauss = known_solution("gaussian", 4, 1.0);
  tr = integrate(gauss.sys, gauss.state_at(1.0), 2.5, 81);
  samples = trajectory_spectrum(gauss.sys, tr);
  for (const auto& s : samples) CHECK(s.regular);
  CHECK(max_residual_over(samples, "quadratic_bc", true) < 1e-7);
  CHECK(max_residual_over(samples, "riccati", true) < 1e-5);
  CHECK(max_residual_over(samples, "bc_poly", true) < 5e-5);
  CHECK(max_distinct_over(samples) == 1);

  // sphere: f' == 0, so no sample is regular; stencil identities still hold
  // (xi = cot s steepens toward the pole, hence the short span)
  auto sph = known_solution("sphere", 4, 3.0);
  tr = integrate(sph.sys, sph.state_at(sph.anchor), 2.4, 81);
  samples = trajectory_spectrum(sph.sys, tr);
  for (const auto& s : samples) {
    CHECK_FALSE(s.regular);
    CHECK(std::abs(s.lambda1 - 3.0) < 1e-7);
  }
  CHECK(max_residual_over(samples, "warp_ode", false) < 1e-4);
  CHECK(max_residual_over(samples, "radial_match", false) < 1e-4);
  CHECK(max_residual_over(samples, "radial_spread", false) < 1e-4);
  CHECK(max_distinct_over(samples) == 1);
}

TEST_CASE("distinct eigenvalue counting is scale-aware") {
  CHECK(count_distinct(std::vector<double>{}, 1e-6) == 0);
  CHECK(count_distinct(std::vector<double>{1.0}, 1e-6) == 1);
  // scale = max(1, |3.0|): gap 5e-7 < 3e-6 merges
  CHECK(count_distinct(std::vector<double>{1.0, 1.0 + 5e-7, 3.0}, 1e-6) == 2);
  CHECK(count_distinct(std::vector<double>{0.0, 2e-6, 1.0}, 1e-6) == 3);
  CHECK(count_distinct(std::vector<double>{0.0, 2e-6, 1.0}, 3e-6) == 2);
  // large values: tolerance scales with the spectrum
  CHECK(count_distinct(std::vector<double>{1e8, 1e8 + 50.0, 2e8}, 1e-6) == 2);
}

TEST_CASE("laplacian cross-checks: chart oracle vs radial closed forms") {
  // references: R is constant, so Delta R = 0 and both identities collapse
  auto gauss = known_solution("gaussian", 4, 1.0);
  auto chk = laplacian_check(gauss.spec, gauss.lambda, 1.2);
  CHECK(std::abs(chk.laplacian) < 1e-9);
  CHECK(chk.radial_identity < 1e-9);
  CHECK(chk.energy_identity < 1e-9);

  auto sph = known_solution("sphere", 4, 3.0);
  chk = laplacian_check(sph.spec, sph.lambda, 1.0);
  // energy identity on the sphere: 0 = 0 + 2*3*12 - 2*(4*9)
  CHECK(std::abs(chk.laplacian) < 1e-8);
  CHECK(chk.energy_identity < 1e-8);

  // generic non-soliton: the radial identity is pure geometry and must hold;
  // the energy identity is soliton-only and must fail visibly
  auto w = generic_two_fiber_with_potential();
  chk = laplacian_check(w, 0.7, 0.9);
  CHECK(std::abs(chk.laplacian) > 0.01);  // R genuinely varies here
  CHECK(chk.radial_identity < 1e-7 * std::max(1.0, std::abs(chk.laplacian)));
  CHECK(chk.energy_identity > 0.01);
}

TEST_CASE("obstruction scan: three-fiber windows never meet the joint condition") {
  OdeControl ctrl;  // defaults

  SUBCASE("generic data: four eigenvalues, harmonic-Weyl fails") {
    auto d = three_fiber_generic();
    auto sys = make_system(d.fibers, d.lambda);
    auto tr = integrate(sys, d.init, 0.5, 201, ctrl);
    REQUIRE_FALSE(tr.truncated);
    auto rep = obstruction_scan(sys, d.fibers, tr);
    CHECK_FALSE(rep.joint_condition());
    CHECK(rep.four_eigenvalues());
    CHECK(rep.max_distinct == 4);
    CHECK_FALSE(rep.harmonic_weyl_window());
    CHECK(rep.max_hw_residual > 1e-2);
    CHECK(rep.min_xi_gap > 0.05);
    CHECK(rep.failing_clause().find("harmonic-Weyl clause fails") != std::string::npos);
  }

  SUBCASE("pointwise-constrained data: anchor looks fine, window still fails") {
    auto d = three_fiber_constrained();
    auto sys = make_system(d.fibers, d.lambda);
    // the anchor satisfies the pointwise equal-u condition exactly ...
    auto u0 = state_u(sys, d.init);
    CHECK(std::abs(u0[0] - 0.3) < 1e-12);
    CHECK(std::abs(u0[1] - 0.3) < 1e-12);
    CHECK(std::abs(u0[2] - 0.3) < 1e-12);
    // ... but the flow does not preserve it
    auto tr = integrate(sys, d.init, 0.5, 201, ctrl);
    REQUIRE_FALSE(tr.truncated);
    auto rep = obstruction_scan(sys, d.fibers, tr);
    CHECK_FALSE(rep.joint_condition());
    CHECK(rep.four_eigenvalues());
    CHECK_FALSE(rep.harmonic_weyl_window());
    CHECK(rep.failing_clause().find("harmonic-Weyl clause fails") != std::string::npos);
  }

  SUBCASE("proportional data: harmonic Weyl holds, eigenvalue count stays low") {
    auto d = three_fiber_proportional();
    auto sys = make_system(d.fibers, d.lambda);
    auto tr = integrate(sys, d.init, 0.5, 201, ctrl);
    REQUIRE_FALSE(tr.truncated);
    auto rep = obstruction_scan(sys, d.fibers, tr);
    CHECK_FALSE(rep.joint_condition());
    CHECK(rep.harmonic_weyl_window());
    CHECK(rep.max_hw_residual < 1e-3);
    CHECK_FALSE(rep.four_eigenvalues());
    CHECK(rep.max_distinct <= 2);
    CHECK(rep.min_xi_gap < 1e-9);
    CHECK(rep.failing_clause().find("eigenvalue clause fails") != std::string::npos);
  }
}

TEST_CASE("spectrum guards reject malformed inputs") {
  auto gauss = known_solution("gaussian", 4, 1.0);

  WarpedSpec bare = gauss.spec;
  bare.potential = SmoothFn{};
  CHECK_THROWS_AS(spectrum_at(bare, 1.0, 1.0), InvalidStateError);

  CHECK_THROWS_AS(shared_quadratic(4, 1.0, 0.0, 0.0, 0.0, 0.0), SingularPointError);
  CHECK_THROWS_AS(shared_quadratic(2, 1.0, 0.0, 0.0, 0.0, 1.0), DimensionError);

  auto tr = integrate(gauss.sys, gauss.state_at(1.0), 1.4, 4);
  CHECK_THROWS_AS(trajectory_spectrum(gauss.sys, tr), DimensionError);

  auto tr5 = integrate(gauss.sys, gauss.state_at(1.0), 1.4, 41);
  std::vector<FiberModel> wrong = {{FiberKind::sphere, 3, 1.0},
                                   {FiberKind::sphere, 2, 1.0}};
  CHECK_THROWS_AS(realize_spec(wrong, tr5), DimensionError);
  CHECK_THROWS_AS(obstruction_scan(gauss.sys, gauss.spec.fibers, tr), DimensionError);

  CHECK_THROWS_AS(laplacian_check(gauss.spec, 1.0, 1.0, std::vector<double>{0.5}),
                  DimensionError);
}
