#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ricci/chart.hpp"
#include "ricci/tensor.hpp"

using namespace ricci;

namespace {

template <class F>
double d1(F f, double x) { return f(lift(x)).du; }
template <class F>
double d2(F f, double x) { return f(lift(lift(x))).du.du; }

// flat R^4, cartesian
MetricChart euclidean4() {
  return MetricChart::make(4, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    (void)x;
    for (int i = 0; i < 16; ++i) g[i] = S(0.0);
    for (int i = 0; i < 4; ++i) g[i * 4 + i] = S(1.0);
  });
}

// flat R^2 in polar coordinates (s, theta)
MetricChart polar2() {
  return MetricChart::make(2, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    g[0] = S(1.0);
    g[1] = S(0.0);
    g[2] = S(0.0);
    g[3] = sqr(x[0]);
  });
}

// unit round S^2, polar (theta, phi)
MetricChart sphere2() {
  return MetricChart::make(2, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    g[0] = S(1.0);
    g[1] = S(0.0);
    g[2] = S(0.0);
    g[3] = sqr(sin(x[0]));
  });
}

// hyperbolic plane, polar (s, theta): ds^2 + sinh^2 s dtheta^2
MetricChart hyperbolic2() {
  return MetricChart::make(2, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    g[0] = S(1.0);
    g[1] = S(0.0);
    g[2] = S(0.0);
    g[3] = sqr(sinh(x[0]));
  });
}

// unit round S^4 in nested polar coordinates
MetricChart sphere4() {
  return MetricChart::make(4, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    for (int i = 0; i < 16; ++i) g[i] = S(0.0);
    g[0 * 4 + 0] = S(1.0);
    g[1 * 4 + 1] = sqr(sin(x[0]));
    g[2 * 4 + 2] = sqr(sin(x[0])) * sqr(sin(x[1]));
    g[3 * 4 + 3] = sqr(sin(x[0])) * sqr(sin(x[1])) * sqr(sin(x[2]));
  });
}

// unit hyperbolic H^4: ds^2 + sinh^2 s (round S^3)
MetricChart hyperbolic4() {
  return MetricChart::make(4, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    for (int i = 0; i < 16; ++i) g[i] = S(0.0);
    g[0 * 4 + 0] = S(1.0);
    g[1 * 4 + 1] = sqr(sinh(x[0]));
    g[2 * 4 + 2] = sqr(sinh(x[0])) * sqr(sin(x[1]));
    g[3 * 4 + 3] = sqr(sinh(x[0])) * sqr(sin(x[1])) * sqr(sin(x[2]));
  });
}

// the flat metric pulled back by a curvilinear diffeomorphism y(x); exercises
// dense off-diagonal jets while keeping curvature exactly zero
MetricChart flat_pullback4() {
  return MetricChart::make(4, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    // y0 = x0 + 0.3 sin x1, y1 = x1 + 0.2 x0 x2,
    // y2 = x2 + 0.1 x0^2,   y3 = x3 + 0.15 x1 x3
    S J[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) J[i][j] = S(0.0);
    J[0][0] = S(1.0);
    J[0][1] = 0.3 * cos(x[1]);
    J[1][0] = 0.2 * x[2];
    J[1][1] = S(1.0);
    J[1][2] = 0.2 * x[0];
    J[2][0] = 0.2 * x[0];
    J[2][2] = S(1.0);
    J[3][1] = 0.15 * x[3];
    J[3][3] = 1.0 + 0.15 * x[1];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        S acc(0.0);
        for (int k = 0; k < 4; ++k) acc += J[k][a] * J[k][b];
        g[a * 4 + b] = acc;
      }
  });
}

// generic bumpy 4-metric with nonzero Cotton tensor
MetricChart bumpy4() {
  return MetricChart::make(4, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    for (int i = 0; i < 16; ++i) g[i] = S(0.0);
    g[0 * 4 + 0] = 1.0 + 0.2 * sqr(sin(x[1]));
    g[1 * 4 + 1] = 1.0 + 0.3 * exp(0.1 * x[0]);
    g[2 * 4 + 2] = 1.0 + 0.1 * cos(x[3]);
    g[3 * 4 + 3] = 1.0 + 0.15 * sqr(x[2]);
    g[0 * 4 + 1] = g[1 * 4 + 0] = 0.1 * sin(x[2] + x[3]);
    g[2 * 4 + 3] = g[3 * 4 + 2] = 0.05 * cos(x[0]) * x[1];
  });
}

const std::vector<double> kBumpyPt{0.3, 0.7, 0.4, 0.6};

}  // namespace

TEST_CASE("flat cartesian chart: vanishing connection and curvature") {
  auto chart = euclidean4();
  std::vector<double> x{0.2, -0.5, 1.3, 0.8};
  auto gamma = christoffel(chart, x);
  double gmax = 0;
  for (double v : gamma) gmax = std::max(gmax, std::abs(v));
  CHECK(gmax < 1e-14);
  CHECK(riemann(chart, x).max_abs() < 1e-13);
  CHECK(std::abs(scalar_curvature(chart, x)) < 1e-13);
  CHECK(metric_compatibility(chart, x) < 1e-14);
}

TEST_CASE("polar plane: hand-checked christoffel symbols, zero curvature") {
  auto chart = polar2();
  const double s = 1.7;
  std::vector<double> x{s, 0.4};
  auto cr = curvature_core<double>(chart, x.data());
  auto G = [&](int a, int b, int c) { return cr.gamma[(a * 2 + b) * 2 + c]; };
  // G^s_tt = -s, G^t_st = G^t_ts = 1/s, all others zero
  CHECK(G(0, 1, 1) == doctest::Approx(-s).epsilon(1e-13));
  CHECK(G(1, 0, 1) == doctest::Approx(1.0 / s).epsilon(1e-13));
  CHECK(G(1, 1, 0) == doctest::Approx(1.0 / s).epsilon(1e-13));
  CHECK(std::abs(G(0, 0, 0)) < 1e-14);
  CHECK(std::abs(G(0, 0, 1)) < 1e-14);
  CHECK(std::abs(G(0, 1, 0)) < 1e-14);
  CHECK(std::abs(G(1, 0, 0)) < 1e-14);
  CHECK(std::abs(G(1, 1, 1)) < 1e-14);
  double rmax = 0;
  for (double v : cr.rm) rmax = std::max(rmax, std::abs(v));
  CHECK(rmax < 1e-13);
  CHECK(metric_compatibility(chart, x) < 1e-13);
}

TEST_CASE("unit sphere and hyperbolic plane: sectional curvature calibration") {
  // S^2 at theta = 1.1:
  //   G^theta_phiphi = -sin(th)cos(th), G^phi_thetaphi = cot(th),
  //   Rm_{0110} = Rm(e_th, e_ph, e_ph, e_th) = +sin^2 th  (K = +1),
  //   R = 2.
  auto sph = sphere2();
  const double th = 1.1;
  std::vector<double> x{th, 0.7};
  auto cr = curvature_core<double>(sph, x.data());
  auto G = [&](int a, int b, int c) { return cr.gamma[(a * 2 + b) * 2 + c]; };
  CHECK(G(0, 1, 1) == doctest::Approx(-std::sin(th) * std::cos(th)).epsilon(1e-13));
  CHECK(G(1, 0, 1) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-13));
  const double s2 = std::sin(th) * std::sin(th);
  CHECK(cr.rm[((0 * 2 + 1) * 2 + 1) * 2 + 0] == doctest::Approx(s2).epsilon(1e-12));
  CHECK(cr.rm[((0 * 2 + 1) * 2 + 0) * 2 + 1] == doctest::Approx(-s2).epsilon(1e-12));
  CHECK(cr.scal == doctest::Approx(2.0).epsilon(1e-12));

  // hyperbolic plane at s = 0.9: K = -1, R = -2
  auto hyp = hyperbolic2();
  std::vector<double> y{0.9, 0.3};
  auto ch = curvature_core<double>(hyp, y.data());
  const double sh2 = std::sinh(0.9) * std::sinh(0.9);
  CHECK(ch.rm[((0 * 2 + 1) * 2 + 1) * 2 + 0] == doctest::Approx(-sh2).epsilon(1e-12));
  CHECK(ch.scal == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("space forms in dimension four: einstein constants and zero weyl") {
  std::vector<double> x{1.0, 1.1, 0.9, 0.5};

  auto p = curvature_pack(sphere4(), x);
  CHECK(p.scal == doctest::Approx(12.0).epsilon(1e-11));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(p.ric(i, j) - 3.0 * p.g(i, j)) < 1e-10);
  CHECK(p.weyl.max_abs() < 1e-10);
  CHECK(p.rm.max_symmetry_violation() < 1e-10);
  CHECK(p.rm.max_bianchi_violation() < 1e-10);
  CHECK(cotton(sphere4(), x).max_abs() < 1e-9);
  CHECK(weyl_divergence(sphere4(), x).max_abs() < 1e-9);
  CHECK(metric_compatibility(sphere4(), x) < 1e-12);

  auto q = curvature_pack(hyperbolic4(), x);
  CHECK(q.scal == doctest::Approx(-12.0).epsilon(1e-11));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(q.ric(i, j) + 3.0 * q.g(i, j)) < 1e-10);
  CHECK(q.weyl.max_abs() < 1e-10);
}

TEST_CASE("flat metric in curvilinear coordinates stays flat through the pipeline") {
  auto chart = flat_pullback4();
  std::vector<double> x{0.3, 0.4, 0.5, 0.6};
  CHECK(riemann(chart, x).max_abs() < 1e-11);
  CHECK(std::abs(scalar_curvature(chart, x)) < 1e-11);
  CHECK(cotton(chart, x).max_abs() < 1e-9);
  CHECK(metric_compatibility(chart, x) < 1e-12);
}

TEST_CASE("coordinate invariance: polar vs stereographic round spheres") {
  // S^2: g = 4/(1+|u|^2)^2 delta in stereographic coordinates
  auto stereo2 = MetricChart::make(2, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    S w = 1.0 + sqr(x[0]) + sqr(x[1]);
    S c = 4.0 / sqr(w);
    g[0] = c;
    g[1] = S(0.0);
    g[2] = S(0.0);
    g[3] = c;
  });
  std::vector<double> u{0.4, -0.2};
  auto cr = curvature_core<double>(stereo2, u.data());
  CHECK(cr.scal == doctest::Approx(2.0).epsilon(1e-12));

  // S^4 stereographic vs polar: same Einstein data in both charts
  auto stereo4 = MetricChart::make(4, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    S w = 1.0 + sqr(x[0]) + sqr(x[1]) + sqr(x[2]) + sqr(x[3]);
    S c = 4.0 / sqr(w);
    for (int i = 0; i < 16; ++i) g[i] = S(0.0);
    for (int i = 0; i < 4; ++i) g[i * 4 + i] = c;
  });
  std::vector<double> v{0.3, -0.1, 0.2, 0.4};
  auto p = curvature_pack(stereo4, v);
  CHECK(p.scal == doctest::Approx(12.0).epsilon(1e-11));
  auto eig = generalized_eigenvalues(p.ric, p.g);
  for (double e : eig) CHECK(e == doctest::Approx(3.0).epsilon(1e-11));
  CHECK(p.weyl.max_abs() < 1e-10);
}

TEST_CASE("gaussian soliton on flat space: residual, hessian, gradient") {
  const double lam = 0.7;
  auto chart = MetricChart::make(
      4,
      [](const auto* x, auto* g) {
        using S = std::decay_t<decltype(x[0])>;
        (void)x;
        for (int i = 0; i < 16; ++i) g[i] = S(0.0);
        for (int i = 0; i < 4; ++i) g[i * 4 + i] = S(1.0);
      },
      [lam](const auto* x) {
        return 0.5 * lam * (sqr(x[0]) + sqr(x[1]) + sqr(x[2]) + sqr(x[3]));
      });
  std::vector<double> x{0.6, -0.3, 0.8, 0.2};

  auto h = hessian(chart, x);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(h(i, j) - (i == j ? lam : 0.0)) < 1e-12);

  auto grad = gradient(chart, x);
  for (int i = 0; i < 4; ++i) CHECK(grad[i] == doctest::Approx(lam * x[i]).epsilon(1e-13));
  double xn = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
  CHECK(gradient_norm(chart, x) == doctest::Approx(lam * xn).epsilon(1e-13));

  SymTensor2 res = soliton_residual(chart, x, lam);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(res(i, j)) < 1e-12);

  CHECK(harmonic_weyl_residual(chart, x) < 1e-11);
}

TEST_CASE("hessian picks up connection terms (cylindrical coordinates)") {
  // R^3 cylindrical (s, theta, z), f = s^2/2: Hess f = diag(1, s^2, 0).
  // The theta-theta entry is purely the -G^s_tt f' connection term.
  auto chart = MetricChart::make(
      3,
      [](const auto* x, auto* g) {
        using S = std::decay_t<decltype(x[0])>;
        for (int i = 0; i < 9; ++i) g[i] = S(0.0);
        g[0] = S(1.0);
        g[4] = sqr(x[0]);
        g[8] = S(1.0);
      },
      [](const auto* x) { return 0.5 * sqr(x[0]); });
  const double s = 1.3;
  std::vector<double> x{s, 0.9, -0.4};
  auto h = hessian(chart, x);
  CHECK(h(0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(h(1, 1) == doctest::Approx(s * s).epsilon(1e-13));
  CHECK(std::abs(h(2, 2)) < 1e-13);
  CHECK(std::abs(h(0, 1)) < 1e-13);
}

TEST_CASE("round sphere with constant potential: einstein soliton, guarded gradient") {
  auto chart = MetricChart::make(
      4,
      [](const auto* x, auto* g) {
        using S = std::decay_t<decltype(x[0])>;
        for (int i = 0; i < 16; ++i) g[i] = S(0.0);
        g[0 * 4 + 0] = S(1.0);
        g[1 * 4 + 1] = sqr(sin(x[0]));
        g[2 * 4 + 2] = sqr(sin(x[0])) * sqr(sin(x[1]));
        g[3 * 4 + 3] = sqr(sin(x[0])) * sqr(sin(x[1])) * sqr(sin(x[2]));
      },
      [](const auto* x) {
        using S = std::decay_t<decltype(x[0])>;
        (void)x;
        return S(0.0);
      });
  std::vector<double> x{1.0, 1.1, 0.9, 0.5};
  auto res = soliton_residual(chart, x, 3.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(std::abs(res(i, j)) < 1e-10);
  CHECK(gradient_norm(chart, x) < 1e-14);
  CHECK_THROWS_AS(harmonic_weyl_residual(chart, x), DegenerateGradientError);
  CHECK(harmonic_weyl_residual_raw(chart, x) < 1e-12);
}

TEST_CASE("laplacian of scalar curvature against a one-dimensional reduction") {
  // Surface ds^2 + h(s)^2 dt^2 with h = 2 + sin s:
  //   R(s) = -2 h''/h = 2 sin s / (2 + sin s)
  //   Lap R = R'' + (h'/h) R'   (metric depends on s only)
  auto chart = MetricChart::make(2, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    g[0] = S(1.0);
    g[1] = S(0.0);
    g[2] = S(0.0);
    g[3] = sqr(2.0 + sin(x[0]));
  });
  const double s = 0.8;
  std::vector<double> x{s, 0.3};
  auto Rf = [](auto t) { return 2.0 * sin(t) / (2.0 + sin(t)); };
  CHECK(scalar_curvature(chart, x) == doctest::Approx(Rf(s)).epsilon(1e-12));
  double expected = d2(Rf, s) + std::cos(s) / (2.0 + std::sin(s)) * d1(Rf, s);
  CHECK(scalar_curv_laplacian(chart, x) == doctest::Approx(expected).epsilon(1e-10));

  DerivEngine fd;
  fd.mode = DerivEngine::Mode::finite_diff;
  CHECK_THROWS_AS(scalar_curv_laplacian(chart, x, fd), UnsupportedDepthError);
}

TEST_CASE("finite-difference engine: second-order convergence and richardson") {
  auto chart = bumpy4();
  auto ref = core_at(chart, kBumpyPt);  // dual-exact

  auto ric_err = [&](const DerivEngine& eng) {
    auto cr = core_at(chart, kBumpyPt, eng);
    double e = 0;
    for (size_t i = 0; i < cr.ric.size(); ++i) e = std::max(e, std::abs(cr.ric[i] - ref.ric[i]));
    return e;
  };

  DerivEngine fd;
  fd.mode = DerivEngine::Mode::finite_diff;
  fd.fd_step = 4e-3;
  double e1 = ric_err(fd);
  fd.fd_step = 2e-3;
  double e2 = ric_err(fd);
  CHECK(e1 / e2 > 3.4);  // central stencils: error ~ h^2
  CHECK(e1 / e2 < 4.6);

  fd.fd_step = 4e-3;
  fd.richardson = true;
  CHECK(ric_err(fd) < 0.05 * e1);

  // third-derivative level: Cotton from differenced Ricci matches dual Cotton
  DerivEngine fdc;
  fdc.mode = DerivEngine::Mode::finite_diff;
  fdc.fd_step = 1e-3;
  auto c_dual = cotton(chart, kBumpyPt);
  auto c_fd = cotton(chart, kBumpyPt, fdc);
  double dmax = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) dmax = std::max(dmax, std::abs(c_fd(i, j, k) - c_dual(i, j, k)));
  CHECK(dmax < 1e-4);
  CHECK(c_dual.max_abs() > 1e-2);  // the control metric really is non-conformally-flat
}

TEST_CASE("weyl divergence is exactly proportional to the cotton tensor") {
  // For any 4-metric, (div W)_{jkl} = -1/2 C_{klj} in this sign convention
  // (coefficient (n-3)/(n-2)). Verified entrywise, not just in norm.
  auto chart = bumpy4();
  auto C = cotton(chart, kBumpyPt);
  auto dW = weyl_divergence(chart, kBumpyPt);
  double worst = 0;
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k)
      for (int l = 0; l < 4; ++l)
        worst = std::max(worst, std::abs(dW(j, k, l) + 0.5 * C(k, l, j)));
  CHECK(worst < 1e-12 * std::max(1.0, dW.max_abs()) * 1e2);
  CHECK(dW.max_abs() > 5e-3);
}

TEST_CASE("contracted bianchi identity: div ric equals half the gradient of R") {
  auto chart = bumpy4();
  const int n = 4;
  auto base = curvature_core<double>(chart, kBumpyPt.data());
  std::vector<Dual1> xd(n);
  for (int k = 0; k < n; ++k) {
    // (div Ric)_k = g^{mi} (d_m Ric_ik - G^p_mi Ric_pk - G^p_mk Ric_ip)
    double div = 0;
    for (int m = 0; m < n; ++m) {
      for (int a = 0; a < n; ++a) xd[a] = Dual1(kBumpyPt[a], a == m ? 1.0 : 0.0);
      auto cr = curvature_core<Dual1>(chart, xd.data());
      for (int i = 0; i < n; ++i) {
        double cov = cr.ric[i * n + k].du;
        for (int p = 0; p < n; ++p)
          cov -= base.gamma[(p * n + m) * n + i] * base.ric[p * n + k] +
                 base.gamma[(p * n + m) * n + k] * base.ric[i * n + p];
        div += base.ginv[m * n + i] * cov;
      }
    }
    // d_k R from one more dual sweep
    for (int a = 0; a < n; ++a) xd[a] = Dual1(kBumpyPt[a], a == k ? 1.0 : 0.0);
    double dR = curvature_core<Dual1>(chart, xd.data()).scal.du;
    CHECK(div == doctest::Approx(0.5 * dR).epsilon(1e-11));
  }
}

TEST_CASE("perturbed einstein metric: nonzero cotton as a negative control") {
  auto warped = MetricChart::make(4, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    for (int i = 0; i < 16; ++i) g[i] = S(0.0);
    S bump = 1.0 + 0.1 * sin(2.0 * x[0]);
    g[0 * 4 + 0] = S(1.0);
    g[1 * 4 + 1] = sqr(sin(x[0])) * bump;
    g[2 * 4 + 2] = sqr(sin(x[0])) * sqr(sin(x[1]));
    g[3 * 4 + 3] = sqr(sin(x[0])) * sqr(sin(x[1])) * sqr(sin(x[2]));
  });
  std::vector<double> x{1.0, 1.1, 0.9, 0.5};
  CHECK(cotton(warped, x).max_abs() > 1e-3);
}

TEST_CASE("chart guards") {
  CHECK_THROWS_AS(MetricChart::make(1, [](const auto*, auto*) {}), DimensionError);
  CHECK_THROWS_AS(MetricChart::make(13, [](const auto*, auto*) {}), DimensionError);

  auto chart = polar2();
  std::vector<double> bad{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(core_at(chart, bad), DimensionError);
  CHECK_THROWS_AS(hessian(euclidean4(), {0.1, 0.2, 0.3, 0.4}), InvalidStateError);

  auto degenerate = MetricChart::make(3, [](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    (void)x;
    for (int i = 0; i < 9; ++i) g[i] = S(0.0);
    g[0] = S(1.0);
    g[8] = S(1.0);  // middle diagonal entry left zero
  });
  std::vector<double> y{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(scalar_curvature(degenerate, y), SingularMetricError);
}
