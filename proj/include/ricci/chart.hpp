#pragma once

// Coordinate-chart curvature oracle. A MetricChart supplies the metric (and
// optionally a gradient-soliton potential) as callables evaluable at plain
// doubles and at nested dual numbers; every quantity below is then computed
// from coordinate jets of g alone -- no product/warp shortcuts -- so it can
// sit on the independent side of a cross-check against closed-form
// constructions.
//
// Conventions, fixed project-wide and pinned by the unit-sphere test:
//   Rm_{ijkl} = g_{lm} (d_i G^m_{jk} - d_j G^m_{ik}
//                       + G^m_{ip} G^p_{jk} - G^m_{jp} G^p_{ik})
//   Ric_{jk}  = g^{il} Rm_{ijkl},      R = g^{jk} Ric_{jk}
//   K(X,Y)    = Rm(X,Y,Y,X) / (|X|^2 |Y|^2 - <X,Y>^2)
// On the unit round sphere this gives Rm = -1/2 (g kn g), Ric = (n-1) g,
// R = n(n-1), K = +1.
//
// Derivative plumbing: a curvature evaluation over scalar type S obtains
// metric jets by evaluating the chart at Dual<S> and Dual<Dual<S>> points,
// i.e. two dual levels above S. Running the whole curvature computation at
// S = Dual1 therefore differentiates Ricci (third metric derivatives), and
// at S = Dual2 it differentiates twice (fourth derivatives, used for the
// Laplacian of scalar curvature). The finite-difference engine replaces the
// two jet levels with central stencils and supports at most one further
// difference on top (third derivatives); anything deeper throws
// UnsupportedDepthError.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "ricci/dual.hpp"
#include "ricci/errors.hpp"
#include "ricci/tensor.hpp"

namespace ricci {

struct DerivEngine {
  enum class Mode { dual, finite_diff };
  Mode mode = Mode::dual;
  double fd_step = 1e-3;    // central-stencil step, coordinate units
  bool richardson = false;  // one extrapolation level on top of each stencil
};

// A chart: dimension, metric g_ab(x) (row-major n*n, must be filled
// symmetric), optional scalar potential f(x). Both callables must be generic
// over the scalar type (double and Dual1..Dual4).
class MetricChart {
 public:
  MetricChart() = default;

  int dim() const { return n_; }
  bool has_potential() const { return static_cast<bool>(p0_); }

  template <class MetricF>
  static MetricChart make(int n, MetricF m) {
    MetricChart c;
    c.init_dim(n);
    c.m0_ = [m](const double* x, double* g) { m(x, g); };
    c.m1_ = [m](const Dual1* x, Dual1* g) { m(x, g); };
    c.m2_ = [m](const Dual2* x, Dual2* g) { m(x, g); };
    c.m3_ = [m](const Dual3* x, Dual3* g) { m(x, g); };
    c.m4_ = [m](const Dual4* x, Dual4* g) { m(x, g); };
    return c;
  }

  template <class MetricF, class PotF>
  static MetricChart make(int n, MetricF m, PotF p) {
    MetricChart c = make(n, m);
    c.p0_ = [p](const double* x) -> double { return p(x); };
    c.p1_ = [p](const Dual1* x) -> Dual1 { return p(x); };
    c.p2_ = [p](const Dual2* x) -> Dual2 { return p(x); };
    c.p3_ = [p](const Dual3* x) -> Dual3 { return p(x); };
    c.p4_ = [p](const Dual4* x) -> Dual4 { return p(x); };
    return c;
  }

  void metric(const double* x, double* g) const { m0_(x, g); }
  void metric(const Dual1* x, Dual1* g) const { m1_(x, g); }
  void metric(const Dual2* x, Dual2* g) const { m2_(x, g); }
  void metric(const Dual3* x, Dual3* g) const { m3_(x, g); }
  void metric(const Dual4* x, Dual4* g) const { m4_(x, g); }

  double potential(const double* x) const { require_potential(); return p0_(x); }
  Dual1 potential(const Dual1* x) const { require_potential(); return p1_(x); }
  Dual2 potential(const Dual2* x) const { require_potential(); return p2_(x); }
  Dual3 potential(const Dual3* x) const { require_potential(); return p3_(x); }
  Dual4 potential(const Dual4* x) const { require_potential(); return p4_(x); }

 private:
  void init_dim(int n) {
    if (n < 2 || n > 12) throw DimensionError("MetricChart: dimension must be in [2, 12]");
    n_ = n;
  }
  void require_potential() const {
    if (!p0_) throw InvalidStateError("MetricChart: no potential attached");
  }

  int n_ = 0;
  std::function<void(const double*, double*)> m0_;
  std::function<void(const Dual1*, Dual1*)> m1_;
  std::function<void(const Dual2*, Dual2*)> m2_;
  std::function<void(const Dual3*, Dual3*)> m3_;
  std::function<void(const Dual4*, Dual4*)> m4_;
  std::function<double(const double*)> p0_;
  std::function<Dual1(const Dual1*)> p1_;
  std::function<Dual2(const Dual2*)> p2_;
  std::function<Dual3(const Dual3*)> p3_;
  std::function<Dual4(const Dual4*)> p4_;
};

// Everything the pointwise curvature computation produces, in the scalar
// type it ran over. Index layouts: g,ginv,ric [a*n+b]; dg [(c*n+a)*n+b] is
// d_c g_ab; d2g [((c*n+d)*n+a)*n+b]; gamma [(a*n+b)*n+c] is G^a_bc; rm is
// fully covariant [((i*n+j)*n+k)*n+l].
template <class S>
struct CoreResult {
  int n = 0;
  std::vector<S> g, ginv, dg, d2g, gamma, rm, ric;
  S scal{};
};

template <class S>
struct PotentialJets {
  S f{};
  std::vector<S> df;   // n
  std::vector<S> d2f;  // n*n, symmetric
};

namespace detail {

// Gauss-Jordan inverse with partial pivoting on value(); works for any
// supported scalar (dual entries divide exactly).
template <class S>
std::vector<S> invert_matrix(int n, std::vector<S> a) {
  std::vector<S> inv(static_cast<size_t>(n) * n, S(0.0));
  for (int i = 0; i < n; ++i) inv[i * n + i] = S(1.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(value(a[col * n + col]));
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(value(a[r * n + col]));
      if (v > best) { best = v; piv = r; }
    }
    if (!(best > 1e-14)) throw SingularMetricError("invert_matrix: pivot below 1e-14");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[col * n + j]);
        std::swap(inv[piv * n + j], inv[col * n + j]);
      }
    S d = a[col * n + col];
    for (int j = 0; j < n; ++j) {
      a[col * n + j] = a[col * n + j] / d;
      inv[col * n + j] = inv[col * n + j] / d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      S f = a[r * n + col];
      for (int j = 0; j < n; ++j) {
        a[r * n + j] = a[r * n + j] - f * a[col * n + j];
        inv[r * n + j] = inv[r * n + j] - f * inv[col * n + j];
      }
    }
  }
  return inv;
}

// From filled g, dg, d2g derive ginv, gamma, rm, ric, scal.
template <class S>
void core_finish(CoreResult<S>& cr) {
  const int n = cr.n;
  const size_t nn = static_cast<size_t>(n) * n;
  auto gi = [n](int a, int b) { return static_cast<size_t>(a) * n + b; };
  auto t3 = [n](int a, int b, int c) { return (static_cast<size_t>(a) * n + b) * n + c; };
  auto t4 = [n](int a, int b, int c, int d) {
    return ((static_cast<size_t>(a) * n + b) * n + c) * n + d;
  };

  cr.ginv = invert_matrix<S>(n, cr.g);

  // G^a_bc = 1/2 g^{ad} (d_b g_dc + d_c g_bd - d_d g_bc)
  cr.gamma.assign(nn * n, S(0.0));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = b; c < n; ++c) {
        S acc(0.0);
        for (int d = 0; d < n; ++d)
          acc += cr.ginv[gi(a, d)] *
                 (cr.dg[t3(b, d, c)] + cr.dg[t3(c, b, d)] - cr.dg[t3(d, b, c)]);
        acc = 0.5 * acc;
        cr.gamma[t3(a, b, c)] = acc;
        cr.gamma[t3(a, c, b)] = acc;
      }

  // d_e G^a_bc, with d_e g^{ad} = -g^{ap} (d_e g_pq) g^{qd}
  std::vector<S> dginv(static_cast<size_t>(n) * nn, S(0.0));
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int d = 0; d < n; ++d) {
        S acc(0.0);
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            acc += cr.ginv[gi(a, p)] * cr.dg[t3(e, p, q)] * cr.ginv[gi(q, d)];
        dginv[t3(e, a, d)] = -acc;
      }
  std::vector<S> dgamma(nn * nn, S(0.0));
  for (int e = 0; e < n; ++e)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = b; c < n; ++c) {
          S acc(0.0);
          for (int d = 0; d < n; ++d) {
            acc += dginv[t3(e, a, d)] *
                   (cr.dg[t3(b, d, c)] + cr.dg[t3(c, b, d)] - cr.dg[t3(d, b, c)]);
            acc += cr.ginv[gi(a, d)] *
                   (cr.d2g[t4(e, b, d, c)] + cr.d2g[t4(e, c, b, d)] - cr.d2g[t4(e, d, b, c)]);
          }
          acc = 0.5 * acc;
          dgamma[t4(e, a, b, c)] = acc;
          dgamma[t4(e, a, c, b)] = acc;
        }

  // Rm_{ijkl} = g_{lm} (d_i G^m_jk - d_j G^m_ik + G^m_ip G^p_jk - G^m_jp G^p_ik)
  cr.rm.assign(nn * nn, S(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          S acc(0.0);
          for (int m = 0; m < n; ++m) {
            S up = dgamma[t4(i, m, j, k)] - dgamma[t4(j, m, i, k)];
            for (int p = 0; p < n; ++p)
              up += cr.gamma[t3(m, i, p)] * cr.gamma[t3(p, j, k)] -
                    cr.gamma[t3(m, j, p)] * cr.gamma[t3(p, i, k)];
            acc += cr.g[gi(l, m)] * up;
          }
          cr.rm[t4(i, j, k, l)] = acc;
        }
    }

  // Ric_{jk} = g^{il} Rm_{ijkl}
  cr.ric.assign(nn, S(0.0));
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      S acc(0.0);
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) acc += cr.ginv[gi(i, l)] * cr.rm[t4(i, j, k, l)];
      cr.ric[gi(j, k)] = acc;
      cr.ric[gi(k, j)] = acc;
    }

  cr.scal = S(0.0);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) cr.scal += cr.ginv[gi(j, k)] * cr.ric[gi(j, k)];
}

}  // namespace detail

// Pointwise curvature over scalar S with exact (dual) metric jets. The chart
// is evaluated at Dual<Dual<S>> points: depth(S) + 2 must stay within the
// supported nesting (S = double, Dual1, Dual2).
template <class S>
CoreResult<S> curvature_core(const MetricChart& chart, const S* x) {
  using DS = Dual<S>;
  using DDS = Dual<DS>;
  const int n = chart.dim();
  const size_t nn = static_cast<size_t>(n) * n;
  CoreResult<S> cr;
  cr.n = n;
  cr.g.assign(nn, S(0.0));
  cr.dg.assign(nn * n, S(0.0));
  cr.d2g.assign(nn * nn, S(0.0));

  chart.metric(x, cr.g.data());

  std::vector<DDS> xd(n);
  std::vector<DDS> gd(nn);
  for (int c = 0; c < n; ++c)
    for (int d = c; d < n; ++d) {
      for (int a = 0; a < n; ++a) {
        xd[a] = DDS(DS(x[a], S(a == c ? 1.0 : 0.0)), DS(S(a == d ? 1.0 : 0.0), S(0.0)));
      }
      chart.metric(xd.data(), gd.data());
      for (size_t ab = 0; ab < nn; ++ab) {
        if (c == d) cr.dg[c * nn + ab] = gd[ab].re.du;
        cr.d2g[(static_cast<size_t>(c) * n + d) * nn + ab] = gd[ab].du.du;
        cr.d2g[(static_cast<size_t>(d) * n + c) * nn + ab] = gd[ab].du.du;
      }
    }

  detail::core_finish(cr);
  return cr;
}

template <class S>
PotentialJets<S> potential_jets(const MetricChart& chart, const S* x) {
  using DS = Dual<S>;
  using DDS = Dual<DS>;
  const int n = chart.dim();
  PotentialJets<S> pj;
  pj.df.assign(n, S(0.0));
  pj.d2f.assign(static_cast<size_t>(n) * n, S(0.0));
  pj.f = chart.potential(x);

  std::vector<DDS> xd(n);
  for (int c = 0; c < n; ++c)
    for (int d = c; d < n; ++d) {
      for (int a = 0; a < n; ++a)
        xd[a] = DDS(DS(x[a], S(a == c ? 1.0 : 0.0)), DS(S(a == d ? 1.0 : 0.0), S(0.0)));
      DDS fd = chart.potential(xd.data());
      if (c == d) pj.df[c] = fd.re.du;
      pj.d2f[c * n + d] = fd.du.du;
      pj.d2f[d * n + c] = fd.du.du;
    }
  return pj;
}

// Finite-difference counterparts (plain doubles only; jets from central
// stencils, optionally Richardson-extrapolated once).
CoreResult<double> curvature_core_fd(const MetricChart& chart, const double* x,
                                     const DerivEngine& eng);
PotentialJets<double> potential_jets_fd(const MetricChart& chart, const double* x,
                                        const DerivEngine& eng);

// Mode dispatch at double level.
CoreResult<double> core_at(const MetricChart& chart, const std::vector<double>& x,
                           const DerivEngine& eng = {});
PotentialJets<double> potential_jets_at(const MetricChart& chart, const std::vector<double>& x,
                                        const DerivEngine& eng = {});

struct CurvaturePack {
  SymTensor2 g, ginv, ric;
  CurvTensor4 rm, weyl;
  double scal = 0.0;
};

SymTensor2 metric_at(const MetricChart& chart, const std::vector<double>& x);
// Flat [(a*n+b)*n+c] = G^a_bc.
std::vector<double> christoffel(const MetricChart& chart, const std::vector<double>& x,
                                const DerivEngine& eng = {});
CurvTensor4 riemann(const MetricChart& chart, const std::vector<double>& x,
                    const DerivEngine& eng = {});
double scalar_curvature(const MetricChart& chart, const std::vector<double>& x,
                        const DerivEngine& eng = {});
CurvaturePack curvature_pack(const MetricChart& chart, const std::vector<double>& x,
                             const DerivEngine& eng = {});

// max_{c,a,b} |d_c g_ab - G^d_ca g_db - G^d_cb g_ad|; zero iff the computed
// connection is metric-compatible (sanity check on the jet plumbing).
double metric_compatibility(const MetricChart& chart, const std::vector<double>& x,
                            const DerivEngine& eng = {});

// Potential-dependent quantities.
SymTensor2 hessian(const MetricChart& chart, const std::vector<double>& x,
                   const DerivEngine& eng = {});
// Contravariant gradient components grad^a = g^{ab} d_b f.
std::vector<double> gradient(const MetricChart& chart, const std::vector<double>& x,
                             const DerivEngine& eng = {});
double gradient_norm(const MetricChart& chart, const std::vector<double>& x,
                     const DerivEngine& eng = {});
// Ric + Hess f - lambda g.
SymTensor2 soliton_residual(const MetricChart& chart, const std::vector<double>& x,
                            double lambda, const DerivEngine& eng = {});

// Cotton tensor
//   C_{ijk} = D_i Ric_jk - D_j Ric_ik - (d_i R g_jk - d_j R g_ik) / (2(n-1)),
// computed by differentiating the whole Ricci pipeline once (dual mode) or by
// one central difference of it (finite_diff mode).
Tensor3 cotton(const MetricChart& chart, const std::vector<double>& x,
               const DerivEngine& eng = {});
// (div W)_{jkl} = g^{im} D_m W_{ijkl}; proportional to Cotton for n >= 4.
Tensor3 weyl_divergence(const MetricChart& chart, const std::vector<double>& x,
                        const DerivEngine& eng = {});

// max over an orthonormal-free basis of
//   | Rm(grad f, X, Y, Z) + (Ric(grad f, Y) g(X,Z) - Ric(grad f, Z) g(X,Y)) / (n-1) |,
// the pointwise identity satisfied by gradient solitons with vanishing
// Cotton tensor. _raw is the plain max-abs; the unsuffixed version divides by
// |grad f| and refuses near-critical points of f.
double harmonic_weyl_residual_raw(const MetricChart& chart, const std::vector<double>& x,
                                  const DerivEngine& eng = {});
double harmonic_weyl_residual(const MetricChart& chart, const std::vector<double>& x,
                              const DerivEngine& eng = {});

// Laplace-Beltrami of scalar curvature, g^{ab} (d_a d_b R - G^c_ab d_c R).
// Needs fourth metric jets: dual mode only.
double scalar_curv_laplacian(const MetricChart& chart, const std::vector<double>& x,
                             const DerivEngine& eng = {});

}  // namespace ricci
