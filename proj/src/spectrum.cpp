#include "ricci/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ricci/chart.hpp"
#include "ricci/stencil.hpp"

namespace ricci {

namespace {

// d/ds of the closed-form scalar curvature, one dual level above T.
template <class T>
T scal_prime_closed(const WarpedSpec& w, const T& s) {
  return scalar_closed_form(w, Dual<T>(s, T(1.0))).du;
}

// Generic interior fiber coordinates for chart evaluations.
std::vector<double> chart_point(int dim, double s, std::span<const double> fiber_coords) {
  std::vector<double> x(dim);
  x[0] = s;
  if (!fiber_coords.empty()) {
    if (static_cast<int>(fiber_coords.size()) != dim - 1)
      throw DimensionError("chart point: fiber coordinate count does not match the chart");
    std::copy(fiber_coords.begin(), fiber_coords.end(), x.begin() + 1);
  } else {
    for (int j = 1; j < dim; ++j) x[j] = 0.7 + 0.15 * ((j - 1) % 4);
  }
  return x;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace

QuadraticCoeffs shared_quadratic(int n, double lambda, double scal, double scal_prime,
                                 double lambda1, double fp, double singular_eps) {
  if (n < 3) throw DimensionError("shared quadratic: dimension must be at least 3");
  if (std::abs(fp) <= singular_eps)
    throw SingularPointError("shared quadratic undefined where f' vanishes");
  QuadraticCoeffs qc;
  qc.B = ((n - 1) * lambda - scal + lambda1 - fp * fp) / fp;
  qc.C = lambda - scal_prime / (2.0 * (n - 1) * fp);
  return qc;
}

std::vector<double> SpectrumSample::eigenvalues() const {
  std::vector<double> v;
  v.reserve(fiber_lambda.size() + 1);
  v.push_back(lambda1);
  v.insert(v.end(), fiber_lambda.begin(), fiber_lambda.end());
  return v;
}

SpectrumSample spectrum_at(const WarpedSpec& w, double lambda, double s, double singular_eps) {
  w.validate();
  if (!w.potential.valid())
    throw InvalidStateError("spectrum_at: the warped-product data has no potential attached");
  const int n = w.total_dim();
  const int k = w.fiber_count();

  SpectrumSample sp;
  sp.s = s;
  auto ric = ricci_closed_form(w, s);
  sp.lambda1 = ric.base;
  sp.fiber_lambda = ric.fiber;
  sp.multiplicity = ric.mult;
  sp.scal = ric.scal;
  sp.fp = w.potential.deriv(s, 1);
  const double fpp = w.potential.deriv(s, 2);

  std::vector<double> h(k), hpp(k), kap(k), u_state(k);
  double S = 0.0;
  for (int i = 0; i < k; ++i) {
    h[i] = w.warps[i](s);
    if (!(h[i] > 0)) throw DomainError("spectrum_at: warp factor must be positive");
    hpp[i] = w.warps[i].deriv(s, 2);
    kap[i] = fiber_kappa(w.fibers[i]);
    const double xi = w.warps[i].deriv(s, 1) / h[i];
    sp.xi.push_back(xi);
    sp.xi_prime.push_back(hpp[i] / h[i] - xi * xi);
    S += w.fibers[i].dim * xi;
  }
  for (int i = 0; i < k; ++i)
    u_state[i] = kap[i] / (h[i] * h[i]) + sp.xi[i] * sp.xi[i] - sp.xi[i] * S +
                 sp.fp * sp.xi[i] - lambda;

  double warp_ode = 0.0, radial_spread = 0.0;
  for (int i = 0; i < k; ++i) {
    warp_ode = std::max(warp_ode, std::abs(hpp[i] - h[i] * u_state[i]));
    radial_spread = std::max(
        radial_spread, std::abs(sp.lambda1 + (n - 1) * (sp.xi_prime[i] + sp.xi[i] * sp.xi[i])));
  }
  sp.residuals["warp_ode"] = warp_ode;
  sp.residuals["radial_match"] = std::abs(sp.lambda1 - (lambda - fpp));
  sp.residuals["radial_spread"] = radial_spread;

  sp.regular = std::abs(sp.fp) > singular_eps;
  if (!sp.regular) return sp;

  // B, C and their s-derivatives by evaluating the same formulas on duals.
  auto bc_at = [&](auto sig) {
    using T = decltype(sig);
    T R = scalar_closed_form(w, sig);
    T Rp = scal_prime_closed(w, sig);
    T l1 = base_eigenvalue(w, sig);
    T fp = deriv_as(w.potential, sig, 1);
    T B = (double(n - 1) * lambda - R + l1 - fp * fp) / fp;
    T C = lambda - Rp / (2.0 * (n - 1) * fp);
    return std::pair<T, T>(B, C);
  };
  auto [B0, C0] = bc_at(s);
  auto [Bd, Cd] = bc_at(lift(s));
  sp.B = B0;
  sp.C = C0;
  sp.Bp = Bd.du;
  sp.Cp = Cd.du;

  double xi_consistency = 0.0, riccati = 0.0, quadratic_bc = 0.0, bc_poly = 0.0;
  for (int i = 0; i < k; ++i) {
    const double xi = sp.xi[i];
    xi_consistency =
        std::max(xi_consistency, std::abs(xi - (lambda - sp.fiber_lambda[i]) / sp.fp));
    riccati = std::max(riccati,
                       std::abs(sp.xi_prime[i] + xi * xi - (sp.C - lambda)));
    quadratic_bc = std::max(
        quadratic_bc, std::abs(xi * xi - sp.B * xi - sp.C + kap[i] / (h[i] * h[i])));
    bc_poly = std::max(bc_poly, std::abs(sp.B * xi * xi + (sp.Bp + 2.0 * lambda) * xi +
                                         (sp.C - lambda) * sp.B + sp.Cp));
  }
  sp.residuals["xi_consistency"] = xi_consistency;
  sp.residuals["riccati"] = riccati;
  sp.residuals["quadratic_bc"] = quadratic_bc;
  sp.residuals["bc_poly"] = bc_poly;
  return sp;
}

std::vector<SpectrumSample> trajectory_spectrum(const SolitonSystem& sys, const Trajectory& tr,
                                                double singular_eps) {
  sys.validate();
  const int N = static_cast<int>(tr.states.size());
  if (N < 5) throw DimensionError("trajectory_spectrum: need at least 5 grid states");
  const double ds = tr.ds();
  for (int j = 0; j < N; ++j)
    if (std::abs(tr.states[j].s - (tr.states[0].s + j * ds)) > 1e-9 * std::max(1.0, std::abs(ds) * N))
      throw InvalidStateError("trajectory_spectrum: grid is not uniform");

  const int k = sys.fiber_count();
  const int n = sys.total_dim();
  const double lambda = sys.lambda;

  // Per-node raw arrays for the stencils.
  std::vector<std::vector<double>> hp_arr(k, std::vector<double>(N)),
      xi_arr(k, std::vector<double>(N));
  std::vector<double> fp_arr(N), scal_arr(N);
  std::vector<SpectrumSample> out(N);

  for (int j = 0; j < N; ++j) {
    const auto& st = tr.states[j];
    auto u = state_u(sys, st);
    SpectrumSample& sp = out[j];
    sp.s = st.s;
    sp.fp = st.fp;
    sp.multiplicity = sys.dims;
    double l1 = 0.0;
    for (int i = 0; i < k; ++i) l1 -= sys.dims[i] * u[i];
    sp.lambda1 = l1;
    sp.scal = l1;
    for (int i = 0; i < k; ++i) {
      const double xi = st.hp[i] / st.h[i];
      sp.xi.push_back(xi);
      // the state algebra gives lambda_f = lambda - f' xi exactly
      const double lf = lambda - st.fp * xi;
      sp.fiber_lambda.push_back(lf);
      sp.scal += sys.dims[i] * lf;
      hp_arr[i][j] = st.hp[i];
      xi_arr[i][j] = xi;
    }
    fp_arr[j] = st.fp;
    scal_arr[j] = sp.scal;
    sp.regular = std::abs(st.fp) > singular_eps;
  }

  // First stencil pass: residuals that need only node-local B, C.
  std::vector<double> B_arr(N, 0.0), C_arr(N, 0.0);
  for (int j = 0; j < N; ++j) {
    SpectrumSample& sp = out[j];
    const auto& st = tr.states[j];
    auto u = state_u(sys, st);

    const double fpp_st = grid_deriv(fp_arr, ds, j, 1);
    double warp_ode = 0.0, radial_spread = 0.0, l1_st = 0.0;
    std::vector<double> hpp_st(k), lf_st(k);
    double S = 0.0;
    for (int i = 0; i < k; ++i) S += sys.dims[i] * sp.xi[i];
    for (int i = 0; i < k; ++i) {
      hpp_st[i] = grid_deriv(hp_arr[i], ds, j, 1);
      l1_st -= sys.dims[i] * hpp_st[i] / st.h[i];
      const double xi = sp.xi[i];
      lf_st[i] = sys.kappa[i] / (st.h[i] * st.h[i]) - hpp_st[i] / st.h[i] -
                 (sys.dims[i] - 1) * xi * xi - xi * (S - sys.dims[i] * xi);
      sp.xi_prime.push_back(grid_deriv(xi_arr[i], ds, j, 1));
      warp_ode = std::max(warp_ode, std::abs(hpp_st[i] - st.h[i] * u[i]));
      radial_spread = std::max(
          radial_spread, std::abs(sp.lambda1 + (n - 1) * (sp.xi_prime[i] + xi * xi)));
    }
    sp.residuals["warp_ode"] = warp_ode;
    sp.residuals["radial_match"] = std::abs(l1_st - (lambda - fpp_st));
    sp.residuals["radial_spread"] = radial_spread;

    if (!sp.regular) continue;
    const double Rp_st = grid_deriv(scal_arr, ds, j, 1);
    auto qc = shared_quadratic(n, lambda, sp.scal, Rp_st, sp.lambda1, sp.fp, singular_eps);
    sp.B = qc.B;
    sp.C = qc.C;
    B_arr[j] = qc.B;
    C_arr[j] = qc.C;

    double xi_consistency = 0.0, riccati = 0.0, quadratic_bc = 0.0;
    for (int i = 0; i < k; ++i) {
      const double xi = sp.xi[i];
      xi_consistency =
          std::max(xi_consistency, std::abs(xi - (lambda - lf_st[i]) / sp.fp));
      riccati = std::max(riccati, std::abs(sp.xi_prime[i] + xi * xi - (sp.C - lambda)));
      quadratic_bc =
          std::max(quadratic_bc, std::abs(xi * xi - sp.B * xi - sp.C +
                                          sys.kappa[i] / (st.h[i] * st.h[i])));
    }
    sp.residuals["xi_consistency"] = xi_consistency;
    sp.residuals["riccati"] = riccati;
    sp.residuals["quadratic_bc"] = quadratic_bc;
  }

  // Second pass: bc_poly needs B', C', so the whole stencil window must be
  // regular (grid_deriv shifts its 5-point window near the edges).
  for (int j = 0; j < N; ++j) {
    SpectrumSample& sp = out[j];
    if (!sp.regular) continue;
    int lo = j - 2;
    if (lo < 0) lo = 0;
    if (lo > N - 5) lo = N - 5;
    bool window_regular = true;
    for (int q = lo; q < lo + 5; ++q) window_regular = window_regular && out[q].regular;
    if (!window_regular) continue;
    sp.Bp = grid_deriv(B_arr, ds, j, 1);
    sp.Cp = grid_deriv(C_arr, ds, j, 1);
    double bc_poly = 0.0;
    for (int i = 0; i < k; ++i) {
      const double xi = sp.xi[i];
      bc_poly = std::max(bc_poly, std::abs(sp.B * xi * xi + (sp.Bp + 2.0 * lambda) * xi +
                                           (sp.C - lambda) * sp.B + sp.Cp));
    }
    sp.residuals["bc_poly"] = bc_poly;
  }
  return out;
}

int count_distinct(std::span<const double> values, double tol) {
  if (values.empty()) return 0;
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double scale = std::max({1.0, std::abs(v.front()), std::abs(v.back())});
  int count = 1;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] > tol * scale) ++count;
  return count;
}

int count_distinct_eigenvalues(const SpectrumSample& sample, double tol) {
  auto v = sample.eigenvalues();
  return count_distinct(v, tol);
}

int max_distinct_over(std::span<const SpectrumSample> samples, double tol) {
  int worst = 0;
  for (const auto& sp : samples) worst = std::max(worst, count_distinct_eigenvalues(sp, tol));
  return worst;
}

LaplacianCheck laplacian_check(const WarpedSpec& w, double lambda, double s,
                               std::span<const double> fiber_coords) {
  w.validate();
  if (!w.potential.valid())
    throw InvalidStateError("laplacian_check: the warped-product data has no potential attached");
  auto chart = to_chart(w);
  auto x = chart_point(chart.dim(), s, fiber_coords);

  LaplacianCheck out;
  out.laplacian = scalar_curv_laplacian(chart, x);

  // R, R', R'' from one second-order dual evaluation of the closed form.
  Dual2 s2(Dual1(s, 1.0), Dual1(1.0, 0.0));
  Dual2 R2 = scalar_closed_form(w, s2);
  const double R = R2.re.re, Rp = R2.re.du, Rpp = R2.du.du;

  double S = 0.0;
  for (int i = 0; i < w.fiber_count(); ++i)
    S += w.fibers[i].dim * warp_log_deriv(w, i, s);
  out.radial_identity = std::abs(out.laplacian - (Rpp + S * Rp));

  auto ric = ricci_closed_form(w, s);
  double ric_sq = ric.base * ric.base;
  for (int i = 0; i < w.fiber_count(); ++i)
    ric_sq += ric.mult[i] * ric.fiber[i] * ric.fiber[i];
  const double fp = w.potential.deriv(s, 1);
  out.energy_identity = std::abs(out.laplacian - (fp * Rp + 2.0 * lambda * R - 2.0 * ric_sq));
  return out;
}

WarpedSpec realize_spec(std::span<const FiberModel> fibers, const Trajectory& tr) {
  const int N = static_cast<int>(tr.states.size());
  if (N < 3) throw DimensionError("realize_spec: need at least 3 grid states");
  const int k = static_cast<int>(fibers.size());
  if (static_cast<int>(tr.states[0].h.size()) != k)
    throw DimensionError("realize_spec: fiber count does not match the trajectory");

  const bool backward = tr.states.back().s < tr.states.front().s;
  std::vector<double> sv(N);
  for (int j = 0; j < N; ++j) sv[j] = tr.states[backward ? N - 1 - j : j].s;

  WarpedSpec w;
  w.fibers.assign(fibers.begin(), fibers.end());
  for (int i = 0; i < k; ++i) {
    std::vector<double> hv(N);
    for (int j = 0; j < N; ++j) hv[j] = tr.states[backward ? N - 1 - j : j].h[i];
    w.warps.push_back(SmoothFn::spline(sv, hv));
  }
  std::vector<double> fv(N);
  for (int j = 0; j < N; ++j) fv[j] = tr.states[backward ? N - 1 - j : j].f;
  w.potential = SmoothFn::spline(sv, fv);
  return w;
}

std::string ObstructionReport::failing_clause() const {
  if (joint_condition())
    return "joint condition satisfied: harmonic-Weyl window with >= 4 distinct "
           "eigenvalues (max residual " +
           format_double(max_hw_residual) + ", max distinct " + std::to_string(max_distinct) +
           ")";
  std::string msg;
  if (!harmonic_weyl_window()) {
    msg += "harmonic-Weyl clause fails: max residual " + format_double(max_hw_residual) +
           " >= " + format_double(hw_tol);
  }
  if (!four_eigenvalues()) {
    if (!msg.empty()) msg += "; ";
    msg += "eigenvalue clause fails: at most " + std::to_string(max_distinct) +
           " distinct eigenvalues on the window";
  }
  return msg;
}

ObstructionReport obstruction_scan(const SolitonSystem& sys, std::span<const FiberModel> fibers,
                                   const Trajectory& tr, double hw_tol, double eig_tol) {
  const int N = static_cast<int>(tr.states.size());
  if (N < 33) throw DimensionError("obstruction_scan: need at least 33 grid states");

  ObstructionReport rep;
  rep.hw_tol = hw_tol;
  rep.eig_tol = eig_tol;
  rep.min_xi_gap = std::numeric_limits<double>::infinity();

  auto realized = realize_spec(fibers, tr);
  auto chart = to_chart(realized);
  auto spectra = trajectory_spectrum(sys, tr);

  // Natural-spline end bias decays like 0.27^m with the distance m from the
  // boundary node; eight nodes push it below the residual floor.
  const int margin = 8;
  const int k = sys.fiber_count();
  for (int j = margin; j < N - margin; ++j) {
    ObstructionSample smp;
    smp.s = tr.states[j].s;
    auto x = chart_point(chart.dim(), smp.s, {});
    smp.hw_residual = harmonic_weyl_residual(chart, x);
    smp.distinct = count_distinct_eigenvalues(spectra[j], eig_tol);
    rep.max_hw_residual = std::max(rep.max_hw_residual, smp.hw_residual);
    rep.max_distinct = std::max(rep.max_distinct, smp.distinct);
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        rep.min_xi_gap =
            std::min(rep.min_xi_gap, std::abs(spectra[j].xi[a] - spectra[j].xi[b]));
    rep.samples.push_back(smp);
  }
  return rep;
}

}  // namespace ricci
