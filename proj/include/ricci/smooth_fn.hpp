#pragma once

// Scalar functions of one variable evaluable at plain doubles and at nested
// dual numbers up to depth 4, so every consumer (warp factors, potentials,
// chart metrics) gets exact derivatives from a single definition. Closed
// forms are exact to all supported depths; sampled data is wrapped in a
// natural cubic spline whose second derivative carries the usual O(ds^2)
// boundary-influenced error (documented; excluded from tight-tolerance
// acceptance checks).

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ricci/dual.hpp"
#include "ricci/errors.hpp"

namespace ricci {

class SmoothFn {
 public:
  SmoothFn() = default;

  template <class F>
  static SmoothFn from_callable(F f, bool exact_derivs = true) {
    SmoothFn s;
    s.f0_ = [f](double x) { return f(x); };
    s.f1_ = [f](Dual1 x) { return f(x); };
    s.f2_ = [f](Dual2 x) { return f(x); };
    s.f3_ = [f](Dual3 x) { return f(x); };
    s.f4_ = [f](Dual4 x) { return f(x); };
    s.exact_ = exact_derivs;
    return s;
  }

  static SmoothFn constant(double c);
  static SmoothFn linear(double a, double b);              // a s + b
  static SmoothFn quadratic(double a, double b, double c); // a s^2 + b s + c
  static SmoothFn sin_fn(double amp, double omega, double phase);
  static SmoothFn sinh_fn(double amp, double omega, double phase);
  static SmoothFn cosh_fn(double amp, double omega, double phase);
  static SmoothFn exp_fn(double amp, double rate);
  static SmoothFn power(double coeff, double exponent);    // coeff s^p, s > 0
  static SmoothFn zero();
  // Natural cubic spline through (s[i], v[i]); s strictly increasing.
  static SmoothFn spline(std::vector<double> s, std::vector<double> v);

  bool valid() const { return static_cast<bool>(f0_); }
  // True when derivatives are exact (closed form), false for spline data.
  bool exact_derivs() const { return exact_; }

  double operator()(double x) const { return f0_(x); }
  Dual1 eval(Dual1 x) const { return f1_(x); }
  Dual2 eval(Dual2 x) const { return f2_(x); }
  Dual3 eval(Dual3 x) const { return f3_(x); }
  Dual4 eval(Dual4 x) const { return f4_(x); }
  double eval(double x) const { return f0_(x); }

  // k-th derivative at x, k <= 4, via nested lifts.
  double deriv(double x, int k) const;

 private:
  std::function<double(double)> f0_;
  std::function<Dual1(Dual1)> f1_;
  std::function<Dual2(Dual2)> f2_;
  std::function<Dual3(Dual3)> f3_;
  std::function<Dual4(Dual4)> f4_;
  bool exact_ = true;
};

// The k-th derivative of fn as an S-valued function evaluated at an S-valued
// point (derivative levels are appended outside S; depth(S) + k <= 4).
template <class S>
S deriv_as(const SmoothFn& fn, const S& x, int k) {
  if (k == 0) return fn.eval(x);
  if (k == 1) return fn.eval(lift(x)).du;
  if (k == 2) return fn.eval(lift(lift(x))).du.du;
  throw UnsupportedDepthError("deriv_as: order > 2 not needed/supported here");
}

}  // namespace ricci
