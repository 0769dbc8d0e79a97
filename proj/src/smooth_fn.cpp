#include "ricci/smooth_fn.hpp"

#include <algorithm>
#include <cmath>

namespace ricci {

SmoothFn SmoothFn::constant(double c) {
  return from_callable([c](auto x) {
    using S = decltype(x);
    (void)x;
    return S(c);
  });
}

SmoothFn SmoothFn::linear(double a, double b) {
  return from_callable([a, b](auto x) { return a * x + b; });
}

SmoothFn SmoothFn::quadratic(double a, double b, double c) {
  return from_callable([a, b, c](auto x) { return (a * x + b) * x + c; });
}

SmoothFn SmoothFn::sin_fn(double amp, double omega, double phase) {
  using std::sin;
  return from_callable([amp, omega, phase](auto x) { return amp * sin(omega * x + phase); });
}

SmoothFn SmoothFn::sinh_fn(double amp, double omega, double phase) {
  using std::sinh;
  return from_callable([amp, omega, phase](auto x) { return amp * sinh(omega * x + phase); });
}

SmoothFn SmoothFn::cosh_fn(double amp, double omega, double phase) {
  using std::cosh;
  return from_callable([amp, omega, phase](auto x) { return amp * cosh(omega * x + phase); });
}

SmoothFn SmoothFn::exp_fn(double amp, double rate) {
  using std::exp;
  return from_callable([amp, rate](auto x) { return amp * exp(rate * x); });
}

SmoothFn SmoothFn::power(double coeff, double exponent) {
  using std::pow;
  return from_callable([coeff, exponent](auto x) { return coeff * pow(x, exponent); });
}

SmoothFn SmoothFn::zero() { return constant(0.0); }

namespace {

// Natural cubic spline coefficients: on [s_i, s_{i+1}],
//   p(x) = v_i + b_i t + c_i t^2 + d_i t^3,  t = x - s_i,
// with p'' = 0 at both ends. Second derivatives m_i solve the standard
// tridiagonal system; coefficients follow from continuity of p, p', p''.
struct SplineData {
  std::vector<double> s, v, b, c, d;

  template <class S>
  S eval(S x) const {
    const double xv = value(x);
    int n = static_cast<int>(s.size());
    int i = static_cast<int>(std::upper_bound(s.begin(), s.end(), xv) - s.begin()) - 1;
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    S t = x - s[i];
    return v[i] + t * (b[i] + t * (c[i] + t * d[i]));
  }
};

SplineData build_spline(std::vector<double> s, std::vector<double> v) {
  const int n = static_cast<int>(s.size());
  if (n < 3) throw DomainError("spline: need at least 3 sample points");
  if (v.size() != s.size()) throw DimensionError("spline: abscissae/values size mismatch");
  for (int i = 0; i + 1 < n; ++i)
    if (!(s[i + 1] > s[i])) throw DomainError("spline: abscissae must be strictly increasing");

  std::vector<double> h(n - 1);
  for (int i = 0; i < n - 1; ++i) h[i] = s[i + 1] - s[i];

  // Tridiagonal solve for interior second derivatives (Thomas algorithm),
  // natural boundary conditions m_0 = m_{n-1} = 0.
  std::vector<double> m(n, 0.0), diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  diag[0] = 1.0;
  for (int i = 1; i < n - 1; ++i) {
    diag[i] = 2.0 * (h[i - 1] + h[i]);
    upper[i] = h[i];
    rhs[i] = 6.0 * ((v[i + 1] - v[i]) / h[i] - (v[i] - v[i - 1]) / h[i - 1]);
  }
  diag[n - 1] = 1.0;
  for (int i = 2; i < n - 1; ++i) {
    const double w = h[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (int i = n - 2; i >= 1; --i) m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];

  SplineData sp;
  sp.s = std::move(s);
  sp.v = v;
  sp.b.resize(n - 1);
  sp.c.resize(n - 1);
  sp.d.resize(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    sp.b[i] = (v[i + 1] - v[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
    sp.c[i] = m[i] / 2.0;
    sp.d[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
  }
  return sp;
}

}  // namespace

SmoothFn SmoothFn::spline(std::vector<double> s, std::vector<double> v) {
  auto sp = std::make_shared<SplineData>(build_spline(std::move(s), std::move(v)));
  return from_callable([sp](auto x) { return sp->eval(x); }, /*exact_derivs=*/false);
}

double SmoothFn::deriv(double x, int k) const {
  if (!valid()) throw InvalidStateError("SmoothFn: empty function");
  switch (k) {
    case 0:
      return f0_(x);
    case 1:
      return f1_(lift(x)).du;
    case 2:
      return f2_(lift(lift(x))).du.du;
    case 3:
      return f3_(lift(lift(lift(x)))).du.du.du;
    case 4:
      return f4_(lift(lift(lift(lift(x))))).du.du.du.du;
    default:
      throw UnsupportedDepthError("SmoothFn::deriv: order must be 0..4");
  }
}

}  // namespace ricci
