#include "ricci/warped.hpp"

#include <cmath>
#include <numeric>

namespace ricci {

const char* to_string(FiberKind k) {
  switch (k) {
    case FiberKind::sphere:
      return "sphere";
    case FiberKind::flat:
      return "flat";
    case FiberKind::hyperbolic:
      return "hyperbolic";
  }
  throw InvalidStateError("unknown fiber kind");
}

double fiber_kappa(const FiberModel& f) {
  if (f.dim < 1) throw DimensionError("fiber dimension must be >= 1");
  if (!(f.scale > 0)) throw DomainError("fiber scale must be positive");
  if (f.dim == 1) return 0.0;  // every 1-dimensional fiber is flat
  switch (f.kind) {
    case FiberKind::sphere:
      return (f.dim - 1) / (f.scale * f.scale);
    case FiberKind::flat:
      return 0.0;
    case FiberKind::hyperbolic:
      return -(f.dim - 1) / (f.scale * f.scale);
  }
  throw InvalidStateError("unknown fiber kind");
}

int WarpedSpec::total_dim() const {
  int n = 1;
  for (const auto& f : fibers) n += f.dim;
  return n;
}

void WarpedSpec::validate() const {
  if (fibers.empty()) throw InvalidStateError("warped: need at least one fiber");
  if (warps.size() != fibers.size())
    throw DimensionError("warped: one warp function per fiber required");
  for (const auto& f : fibers) {
    if (f.dim < 1) throw DimensionError("warped: fiber dimension must be >= 1");
    if (!(f.scale > 0)) throw DomainError("warped: fiber scale must be positive");
  }
  for (const auto& h : warps)
    if (!h.valid()) throw InvalidStateError("warped: warp function not set");
  const int n = total_dim();
  if (n < 3 || n > 12) throw DimensionError("warped: total dimension must be in [3, 12]");
}

WarpedRicci ricci_closed_form(const WarpedSpec& w, double s) {
  w.validate();
  WarpedRicci out;
  out.base = base_eigenvalue(w, s);
  out.fiber.reserve(w.fibers.size());
  out.mult.reserve(w.fibers.size());
  for (int i = 0; i < w.fiber_count(); ++i) {
    out.fiber.push_back(fiber_eigenvalue(w, i, s));
    out.mult.push_back(w.fibers[i].dim);
  }
  out.scal = out.base;
  for (size_t i = 0; i < out.fiber.size(); ++i) out.scal += out.mult[i] * out.fiber[i];
  return out;
}

std::vector<double> WarpedRicci::with_multiplicity() const {
  std::vector<double> all{base};
  for (size_t i = 0; i < fiber.size(); ++i)
    all.insert(all.end(), mult[i], fiber[i]);
  return all;
}

namespace {

// Model space-form metric entries in polar coordinates, unit curvature scale:
// sphere     diag(1, sin^2 t0, sin^2 t0 sin^2 t1, ...)
// hyperbolic diag(1, sinh^2 t0, sinh^2 t0 sin^2 t1, ...)
// flat       identity
// Written as a running product to stay generic over the scalar type.
template <class S>
void fill_fiber_block(FiberKind kind, int r, double scale2, const S* t, S prefix, int n,
                      int offset, S* g) {
  S running = prefix * scale2;
  g[(offset) * n + (offset)] = running;
  for (int j = 1; j < r; ++j) {
    if (j == 1 && kind == FiberKind::hyperbolic)
      running = running * sqr(sinh(t[0]));
    else if (kind == FiberKind::flat)
      ;  // identity block: keep running
    else
      running = running * sqr(sin(t[j - 1]));
    g[(offset + j) * n + (offset + j)] = running;
  }
}

}  // namespace

MetricChart to_chart(const WarpedSpec& w) {
  w.validate();
  const int n = w.total_dim();
  WarpedSpec spec = w;  // captured by value below

  auto metric = [spec, n](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    for (int i = 0; i < n * n; ++i) g[i] = S(0.0);
    g[0] = S(1.0);
    int offset = 1;
    for (int i = 0; i < spec.fiber_count(); ++i) {
      const auto& f = spec.fibers[i];
      S h = spec.warps[i].eval(x[0]);
      fill_fiber_block<S>(f.kind, f.dim, f.scale * f.scale, x + offset, h * h, n, offset, g);
      offset += f.dim;
    }
  };

  if (spec.potential.valid()) {
    SmoothFn pot = spec.potential;
    return MetricChart::make(n, metric, [pot](const auto* x) { return pot.eval(x[0]); });
  }
  return MetricChart::make(n, metric);
}

MetricChart fiber_product_chart(const FiberModel& f) {
  if (f.dim < 1) throw DimensionError("fiber dimension must be >= 1");
  const int n = 1 + f.dim;
  if (n > 12) throw DimensionError("fiber product chart: dimension too large");
  FiberModel model = f;
  return MetricChart::make(n, [model, n](const auto* x, auto* g) {
    using S = std::decay_t<decltype(x[0])>;
    for (int i = 0; i < n * n; ++i) g[i] = S(0.0);
    g[0] = S(1.0);
    fill_fiber_block<S>(model.kind, model.dim, model.scale * model.scale, x + 1, S(1.0), n, 1,
                        g);
  });
}

int effective_fiber_count(const WarpedSpec& w, std::span<const double> samples, double tol) {
  w.validate();
  if (samples.empty()) throw DomainError("effective_fiber_count: need at least one sample");
  const int k = w.fiber_count();
  std::vector<int> rep;  // class representatives
  for (int i = 0; i < k; ++i) {
    bool placed = false;
    for (int r : rep) {
      bool same = true;
      for (double s : samples) {
        double xi_i = warp_log_deriv(w, i, s);
        double xi_r = warp_log_deriv(w, r, s);
        if (std::abs(xi_i - xi_r) > tol) {
          same = false;
          break;
        }
      }
      if (same) {
        placed = true;
        break;
      }
    }
    if (!placed) rep.push_back(i);
  }
  return static_cast<int>(rep.size());
}

}  // namespace ricci
