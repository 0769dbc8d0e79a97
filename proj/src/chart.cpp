#include "ricci/chart.hpp"

#include <algorithm>
#include <cmath>

namespace ricci {

namespace {

struct MetricJets {
  std::vector<double> g, dg, d2g;
};

MetricJets metric_jets_fd_step(const MetricChart& c, const double* x, double h) {
  const int n = c.dim();
  const size_t nn = static_cast<size_t>(n) * n;
  MetricJets mj;
  mj.g.assign(nn, 0.0);
  mj.dg.assign(nn * n, 0.0);
  mj.d2g.assign(nn * nn, 0.0);
  c.metric(x, mj.g.data());

  std::vector<double> xs(x, x + n);
  std::vector<double> gp(nn), gm(nn), gpp(nn), gpm(nn), gmp(nn), gmm(nn);
  for (int c0 = 0; c0 < n; ++c0) {
    xs[c0] = x[c0] + h;
    c.metric(xs.data(), gp.data());
    xs[c0] = x[c0] - h;
    c.metric(xs.data(), gm.data());
    xs[c0] = x[c0];
    for (size_t ab = 0; ab < nn; ++ab) {
      mj.dg[c0 * nn + ab] = (gp[ab] - gm[ab]) / (2 * h);
      mj.d2g[(static_cast<size_t>(c0) * n + c0) * nn + ab] =
          (gp[ab] - 2 * mj.g[ab] + gm[ab]) / (h * h);
    }
    for (int d0 = c0 + 1; d0 < n; ++d0) {
      xs[c0] = x[c0] + h;
      xs[d0] = x[d0] + h;
      c.metric(xs.data(), gpp.data());
      xs[d0] = x[d0] - h;
      c.metric(xs.data(), gpm.data());
      xs[c0] = x[c0] - h;
      xs[d0] = x[d0] + h;
      c.metric(xs.data(), gmp.data());
      xs[d0] = x[d0] - h;
      c.metric(xs.data(), gmm.data());
      xs[c0] = x[c0];
      xs[d0] = x[d0];
      for (size_t ab = 0; ab < nn; ++ab) {
        double v = (gpp[ab] + gmm[ab] - gpm[ab] - gmp[ab]) / (4 * h * h);
        mj.d2g[(static_cast<size_t>(c0) * n + d0) * nn + ab] = v;
        mj.d2g[(static_cast<size_t>(d0) * n + c0) * nn + ab] = v;
      }
    }
  }
  return mj;
}

// (4 A_half - A_full) / 3 elementwise: cancels the O(h^2) term of every
// central stencil above.
void richardson_combine(std::vector<double>& full, const std::vector<double>& half) {
  for (size_t i = 0; i < full.size(); ++i) full[i] = (4.0 * half[i] - full[i]) / 3.0;
}

struct ScalarJets {
  double f = 0.0;
  std::vector<double> df, d2f;
};

ScalarJets scalar_jets_fd_step(const MetricChart& c, const double* x, double h) {
  const int n = c.dim();
  ScalarJets sj;
  sj.df.assign(n, 0.0);
  sj.d2f.assign(static_cast<size_t>(n) * n, 0.0);
  sj.f = c.potential(x);
  std::vector<double> xs(x, x + n);
  for (int c0 = 0; c0 < n; ++c0) {
    xs[c0] = x[c0] + h;
    double fp = c.potential(xs.data());
    xs[c0] = x[c0] - h;
    double fm = c.potential(xs.data());
    xs[c0] = x[c0];
    sj.df[c0] = (fp - fm) / (2 * h);
    sj.d2f[static_cast<size_t>(c0) * n + c0] = (fp - 2 * sj.f + fm) / (h * h);
    for (int d0 = c0 + 1; d0 < n; ++d0) {
      xs[c0] = x[c0] + h;
      xs[d0] = x[d0] + h;
      double fpp = c.potential(xs.data());
      xs[d0] = x[d0] - h;
      double fpm = c.potential(xs.data());
      xs[c0] = x[c0] - h;
      xs[d0] = x[d0] + h;
      double fmp = c.potential(xs.data());
      xs[d0] = x[d0] - h;
      double fmm = c.potential(xs.data());
      xs[c0] = x[c0];
      xs[d0] = x[d0];
      double v = (fpp + fmm - fpm - fmp) / (4 * h * h);
      sj.d2f[static_cast<size_t>(c0) * n + d0] = v;
      sj.d2f[static_cast<size_t>(d0) * n + c0] = v;
    }
  }
  return sj;
}

SymTensor2 to_sym(int n, const std::vector<double>& flat) {
  SymTensor2 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) t.set(i, j, 0.5 * (flat[i * n + j] + flat[j * n + i]));
  return t;
}

CurvTensor4 to_curv(int n, const std::vector<double>& flat) {
  CurvTensor4 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          t.set(i, j, k, l, flat[((static_cast<size_t>(i) * n + j) * n + k) * n + l]);
  return t;
}

// d_i Ric_jk, d_i R, d_i W for all i: one full-pipeline derivative. Weyl
// derivatives are only filled when dweyl != nullptr (requires n >= 3).
void curvature_derivatives(const MetricChart& chart, const std::vector<double>& x,
                           const DerivEngine& eng, std::vector<double>& dric,
                           std::vector<double>& dscal, std::vector<double>* dweyl) {
  const int n = chart.dim();
  const size_t nn = static_cast<size_t>(n) * n;
  const size_t n4 = nn * nn;
  dric.assign(nn * n, 0.0);
  dscal.assign(n, 0.0);
  if (dweyl) dweyl->assign(n4 * n, 0.0);

  if (eng.mode == DerivEngine::Mode::dual) {
    std::vector<Dual1> xd(n);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < n; ++a) xd[a] = Dual1(x[a], a == i ? 1.0 : 0.0);
      auto cr = curvature_core<Dual1>(chart, xd.data());
      for (size_t jk = 0; jk < nn; ++jk) dric[i * nn + jk] = cr.ric[jk].du;
      dscal[i] = cr.scal.du;
      if (dweyl) {
        std::vector<Dual1> w(n4);
        detail::weyl_terms<Dual1>(n, cr.rm.data(), cr.ric.data(), cr.scal, cr.g.data(),
                                  w.data());
        for (size_t q = 0; q < n4; ++q) (*dweyl)[i * n4 + q] = w[q].du;
      }
    }
    return;
  }

  // finite differences of the finite-difference pipeline: one more derivative
  // on top of second-order jets -- third metric derivatives overall.
  auto sweep = [&](double h, std::vector<double>& dr, std::vector<double>& ds,
                   std::vector<double>* dw) {
    dr.assign(nn * n, 0.0);
    ds.assign(n, 0.0);
    if (dw) dw->assign(n4 * n, 0.0);
    std::vector<double> xs = x;
    std::vector<double> wp(n4), wm(n4);
    for (int i = 0; i < n; ++i) {
      xs[i] = x[i] + h;
      auto cp = curvature_core_fd(chart, xs.data(), eng);
      xs[i] = x[i] - h;
      auto cm = curvature_core_fd(chart, xs.data(), eng);
      xs[i] = x[i];
      for (size_t jk = 0; jk < nn; ++jk) dr[i * nn + jk] = (cp.ric[jk] - cm.ric[jk]) / (2 * h);
      ds[i] = (cp.scal - cm.scal) / (2 * h);
      if (dw) {
        detail::weyl_terms<double>(n, cp.rm.data(), cp.ric.data(), cp.scal, cp.g.data(),
                                   wp.data());
        detail::weyl_terms<double>(n, cm.rm.data(), cm.ric.data(), cm.scal, cm.g.data(),
                                   wm.data());
        for (size_t q = 0; q < n4; ++q) (*dw)[i * n4 + q] = (wp[q] - wm[q]) / (2 * h);
      }
    }
  };

  sweep(eng.fd_step, dric, dscal, dweyl);
  if (eng.richardson) {
    std::vector<double> dr2, ds2, dw2;
    sweep(eng.fd_step / 2, dr2, ds2, dweyl ? &dw2 : nullptr);
    richardson_combine(dric, dr2);
    richardson_combine(dscal, ds2);
    if (dweyl) richardson_combine(*dweyl, dw2);
  }
}

}  // namespace

CoreResult<double> curvature_core_fd(const MetricChart& chart, const double* x,
                                     const DerivEngine& eng) {
  MetricJets mj = metric_jets_fd_step(chart, x, eng.fd_step);
  if (eng.richardson) {
    MetricJets half = metric_jets_fd_step(chart, x, eng.fd_step / 2);
    richardson_combine(mj.dg, half.dg);
    richardson_combine(mj.d2g, half.d2g);
  }
  CoreResult<double> cr;
  cr.n = chart.dim();
  cr.g = std::move(mj.g);
  cr.dg = std::move(mj.dg);
  cr.d2g = std::move(mj.d2g);
  detail::core_finish(cr);
  return cr;
}

PotentialJets<double> potential_jets_fd(const MetricChart& chart, const double* x,
                                        const DerivEngine& eng) {
  ScalarJets sj = scalar_jets_fd_step(chart, x, eng.fd_step);
  if (eng.richardson) {
    ScalarJets half = scalar_jets_fd_step(chart, x, eng.fd_step / 2);
    richardson_combine(sj.df, half.df);
    richardson_combine(sj.d2f, half.d2f);
  }
  PotentialJets<double> pj;
  pj.f = sj.f;
  pj.df = std::move(sj.df);
  pj.d2f = std::move(sj.d2f);
  return pj;
}

CoreResult<double> core_at(const MetricChart& chart, const std::vector<double>& x,
                           const DerivEngine& eng) {
  if (static_cast<int>(x.size()) != chart.dim())
    throw DimensionError("core_at: point has wrong dimension");
  if (eng.mode == DerivEngine::Mode::dual) return curvature_core<double>(chart, x.data());
  return curvature_core_fd(chart, x.data(), eng);
}

PotentialJets<double> potential_jets_at(const MetricChart& chart, const std::vector<double>& x,
                                        const DerivEngine& eng) {
  if (static_cast<int>(x.size()) != chart.dim())
    throw DimensionError("potential_jets_at: point has wrong dimension");
  if (eng.mode == DerivEngine::Mode::dual) return potential_jets<double>(chart, x.data());
  return potential_jets_fd(chart, x.data(), eng);
}

SymTensor2 metric_at(const MetricChart& chart, const std::vector<double>& x) {
  const int n = chart.dim();
  if (static_cast<int>(x.size()) != n) throw DimensionError("metric_at: point has wrong dimension");
  std::vector<double> g(static_cast<size_t>(n) * n);
  chart.metric(x.data(), g.data());
  return to_sym(n, g);
}

std::vector<double> christoffel(const MetricChart& chart, const std::vector<double>& x,
                                const DerivEngine& eng) {
  return core_at(chart, x, eng).gamma;
}

CurvTensor4 riemann(const MetricChart& chart, const std::vector<double>& x,
                    const DerivEngine& eng) {
  auto cr = core_at(chart, x, eng);
  return to_curv(cr.n, cr.rm);
}

double scalar_curvature(const MetricChart& chart, const std::vector<double>& x,
                        const DerivEngine& eng) {
  return core_at(chart, x, eng).scal;
}

CurvaturePack curvature_pack(const MetricChart& chart, const std::vector<double>& x,
                             const DerivEngine& eng) {
  auto cr = core_at(chart, x, eng);
  const int n = cr.n;
  CurvaturePack pack{to_sym(n, cr.g), to_sym(n, cr.ginv), to_sym(n, cr.ric),
                     to_curv(n, cr.rm), CurvTensor4(n), cr.scal};
  // Weyl vanishes identically in dimension 3; keep the zero tensor there.
  if (n >= 4) pack.weyl = weyl_from(pack.rm, pack.ric, pack.scal, pack.g);
  return pack;
}

double metric_compatibility(const MetricChart& chart, const std::vector<double>& x,
                            const DerivEngine& eng) {
  auto cr = core_at(chart, x, eng);
  const int n = cr.n;
  auto gi = [n](int a, int b) { return static_cast<size_t>(a) * n + b; };
  auto t3 = [n](int a, int b, int c) { return (static_cast<size_t>(a) * n + b) * n + c; };
  double worst = 0.0;
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double v = cr.dg[t3(c, a, b)];
        for (int d = 0; d < n; ++d)
          v -= cr.gamma[t3(d, c, a)] * cr.g[gi(d, b)] + cr.gamma[t3(d, c, b)] * cr.g[gi(a, d)];
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

SymTensor2 hessian(const MetricChart& chart, const std::vector<double>& x,
                   const DerivEngine& eng) {
  auto cr = core_at(chart, x, eng);
  auto pj = potential_jets_at(chart, x, eng);
  const int n = cr.n;
  auto t3 = [n](int a, int b, int c) { return (static_cast<size_t>(a) * n + b) * n + c; };
  SymTensor2 h(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      double v = pj.d2f[static_cast<size_t>(a) * n + b];
      for (int c = 0; c < n; ++c) v -= cr.gamma[t3(c, a, b)] * pj.df[c];
      h.set(a, b, v);
    }
  return h;
}

std::vector<double> gradient(const MetricChart& chart, const std::vector<double>& x,
                             const DerivEngine& eng) {
  auto cr = core_at(chart, x, eng);
  auto pj = potential_jets_at(chart, x, eng);
  const int n = cr.n;
  std::vector<double> grad(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) grad[a] += cr.ginv[static_cast<size_t>(a) * n + b] * pj.df[b];
  return grad;
}

double gradient_norm(const MetricChart& chart, const std::vector<double>& x,
                     const DerivEngine& eng) {
  auto cr = core_at(chart, x, eng);
  auto pj = potential_jets_at(chart, x, eng);
  const int n = cr.n;
  double q = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      q += pj.df[a] * cr.ginv[static_cast<size_t>(a) * n + b] * pj.df[b];
  return std::sqrt(std::max(0.0, q));
}

SymTensor2 soliton_residual(const MetricChart& chart, const std::vector<double>& x,
                            double lambda, const DerivEngine& eng) {
  auto cr = core_at(chart, x, eng);
  auto pj = potential_jets_at(chart, x, eng);
  const int n = cr.n;
  auto t3 = [n](int a, int b, int c) { return (static_cast<size_t>(a) * n + b) * n + c; };
  SymTensor2 r(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      double hess = pj.d2f[static_cast<size_t>(a) * n + b];
      for (int c = 0; c < n; ++c) hess -= cr.gamma[t3(c, a, b)] * pj.df[c];
      r.set(a, b, cr.ric[static_cast<size_t>(a) * n + b] + hess -
                      lambda * cr.g[static_cast<size_t>(a) * n + b]);
    }
  return r;
}

Tensor3 cotton(const MetricChart& chart, const std::vector<double>& x, const DerivEngine& eng) {
  const int n = chart.dim();
  Tensor3 c(n);
  auto base = core_at(chart, x, eng);
  std::vector<double> dric, dscal;
  curvature_derivatives(chart, x, eng, dric, dscal, nullptr);

  const size_t nn = static_cast<size_t>(n) * n;
  auto gi = [n](int a, int b) { return static_cast<size_t>(a) * n + b; };
  auto t3 = [n](int a, int b, int c) { return (static_cast<size_t>(a) * n + b) * n + c; };
  // D_i Ric_jk = d_i Ric_jk - G^m_ij Ric_mk - G^m_ik Ric_jm
  std::vector<double> cov(nn * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = dric[i * nn + gi(j, k)];
        for (int m = 0; m < n; ++m)
          v -= base.gamma[t3(m, i, j)] * base.ric[gi(m, k)] +
               base.gamma[t3(m, i, k)] * base.ric[gi(j, m)];
        cov[t3(i, j, k)] = v;
      }
  const double den = 2.0 * (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        c.set(i, j, k,
              cov[t3(i, j, k)] - cov[t3(j, i, k)] -
                  (dscal[i] * base.g[gi(j, k)] - dscal[j] * base.g[gi(i, k)]) / den);
  return c;
}

Tensor3 weyl_divergence(const MetricChart& chart, const std::vector<double>& x,
                        const DerivEngine& eng) {
  const int n = chart.dim();
  Tensor3 divw(n);
  auto base = core_at(chart, x, eng);
  const size_t nn = static_cast<size_t>(n) * n;
  const size_t n4 = nn * nn;
  std::vector<double> w(n4);
  detail::weyl_terms<double>(n, base.rm.data(), base.ric.data(), base.scal, base.g.data(),
                             w.data());
  std::vector<double> dric, dscal, dw;
  curvature_derivatives(chart, x, eng, dric, dscal, &dw);

  auto gi = [n](int a, int b) { return static_cast<size_t>(a) * n + b; };
  auto t3 = [n](int a, int b, int c) { return (static_cast<size_t>(a) * n + b) * n + c; };
  auto t4 = [n](int a, int b, int c, int d) {
    return ((static_cast<size_t>(a) * n + b) * n + c) * n + d;
  };
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m)
          for (int i = 0; i < n; ++i) {
            double cov = dw[m * n4 + t4(i, j, k, l)];
            for (int p = 0; p < n; ++p)
              cov -= base.gamma[t3(p, m, i)] * w[t4(p, j, k, l)] +
                     base.gamma[t3(p, m, j)] * w[t4(i, p, k, l)] +
                     base.gamma[t3(p, m, k)] * w[t4(i, j, p, l)] +
                     base.gamma[t3(p, m, l)] * w[t4(i, j, k, p)];
            acc += base.ginv[gi(i, m)] * cov;
          }
        divw.set(j, k, l, acc);
      }
  return divw;
}

double harmonic_weyl_residual_raw(const MetricChart& chart, const std::vector<double>& x,
                                  const DerivEngine& eng) {
  auto cr = core_at(chart, x, eng);
  auto pj = potential_jets_at(chart, x, eng);
  const int n = cr.n;
  auto gi = [n](int a, int b) { return static_cast<size_t>(a) * n + b; };
  auto t4 = [n](int a, int b, int c, int d) {
    return ((static_cast<size_t>(a) * n + b) * n + c) * n + d;
  };
  std::vector<double> grad(n, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) grad[a] += cr.ginv[gi(a, b)] * pj.df[b];
  // contractions with grad f in the first slot
  std::vector<double> rmg(static_cast<size_t>(n) * n * n, 0.0), ricg(n, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int y = 0; y < n; ++y) ricg[y] += grad[a] * cr.ric[gi(a, y)];
    for (int xx = 0; xx < n; ++xx)
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z)
          rmg[(static_cast<size_t>(xx) * n + y) * n + z] += grad[a] * cr.rm[t4(a, xx, y, z)];
  }
  double worst = 0.0;
  for (int xx = 0; xx < n; ++xx)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        double v = rmg[(static_cast<size_t>(xx) * n + y) * n + z] +
                   (ricg[y] * cr.g[gi(xx, z)] - ricg[z] * cr.g[gi(xx, y)]) / (n - 1.0);
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

double harmonic_weyl_residual(const MetricChart& chart, const std::vector<double>& x,
                              const DerivEngine& eng) {
  double gn = gradient_norm(chart, x, eng);
  if (gn < 1e-10)
    throw DegenerateGradientError(
        "harmonic_weyl_residual: |grad f| below 1e-10; use the _raw variant");
  return harmonic_weyl_residual_raw(chart, x, eng) / gn;
}

double scalar_curv_laplacian(const MetricChart& chart, const std::vector<double>& x,
                             const DerivEngine& eng) {
  if (eng.mode != DerivEngine::Mode::dual)
    throw UnsupportedDepthError(
        "scalar_curv_laplacian: needs fourth metric jets; finite_diff mode tops out at third");
  const int n = chart.dim();
  auto base = curvature_core<double>(chart, x.data());
  std::vector<double> dR(n, 0.0), d2R(static_cast<size_t>(n) * n, 0.0);
  std::vector<Dual2> xd(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      for (int c = 0; c < n; ++c)
        xd[c] = Dual2(Dual1(x[c], c == b ? 1.0 : 0.0), Dual1(c == a ? 1.0 : 0.0, 0.0));
      auto cr = curvature_core<Dual2>(chart, xd.data());
      d2R[static_cast<size_t>(a) * n + b] = cr.scal.du.du;
      d2R[static_cast<size_t>(b) * n + a] = cr.scal.du.du;
      if (a == b) dR[a] = cr.scal.re.du;
    }
  auto t3 = [n](int a, int b, int c) { return (static_cast<size_t>(a) * n + b) * n + c; };
  double acc = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double v = d2R[static_cast<size_t>(a) * n + b];
      for (int c = 0; c < n; ++c) v -= base.gamma[t3(c, a, b)] * dR[c];
      acc += base.ginv[static_cast<size_t>(a) * n + b] * v;
    }
  return acc;
}

}  // namespace ricci
