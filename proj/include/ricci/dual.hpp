#pragma once

// First-order truncated Taylor arithmetic (forward-mode differentiation).
// Nesting Dual<Dual<...>> tracks one seeded direction per level, so a depth-k
// nest evaluated once yields an exact mixed partial of order k (up to
// floating-point rounding; no truncation error).

#include <cmath>
#include <type_traits>
#include <utility>

namespace ricci {

template <class T>
struct Dual {
  T re{};  // value
  T du{};  // derivative along the direction seeded at this level

  Dual() = default;
  Dual(const T& r, const T& d) : re(r), du(d) {}

  template <class U, std::enable_if_t<std::is_arithmetic_v<U>, int> = 0>
  Dual(U r) : re(static_cast<double>(r)), du() {}

  Dual& operator+=(const Dual& o) { re = re + o.re; du = du + o.du; return *this; }
  Dual& operator-=(const Dual& o) { re = re - o.re; du = du - o.du; return *this; }
};

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual1>;
using Dual3 = Dual<Dual2>;
using Dual4 = Dual<Dual3>;

inline double value(double x) { return x; }
template <class T> double value(const Dual<T>& x) { return value(x.re); }

inline bool finite(double x) { return std::isfinite(x); }
template <class T> bool finite(const Dual<T>& x) { return finite(x.re) && finite(x.du); }

// Seed a new outer derivative level with unit rate: f(lift(x)).du == f'(x),
// evaluated in the arithmetic of T (inner levels propagate unchanged).
template <class T> Dual<T> lift(const T& x) { return Dual<T>(x, T(1.0)); }

template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.re, -a.du}; }
template <class T> const Dual<T>& operator+(const Dual<T>& a) { return a; }

template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.re + b.re, a.du + b.du}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.re - b.re, a.du - b.du}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.re * b.re, a.du * b.re + a.re * b.du};
}
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.re / b.re;
  return {q, (a.du - q * b.du) / b.re};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.re + b, a.du}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.re, b.du}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.re - b, a.du}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.re, -b.du}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.re * b, a.du * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {b.re * a, b.du * a}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.re / b, a.du / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) {
  T q = a / b.re;
  return {q, (-q * b.du) / b.re};
}

using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tanh;

template <class T> Dual<T> sin(const Dual<T>& x) { return {sin(x.re), cos(x.re) * x.du}; }
template <class T> Dual<T> cos(const Dual<T>& x) { return {cos(x.re), -(sin(x.re) * x.du)}; }
template <class T> Dual<T> exp(const Dual<T>& x) { T e = exp(x.re); return {e, e * x.du}; }
template <class T> Dual<T> log(const Dual<T>& x) { return {log(x.re), x.du / x.re}; }
template <class T> Dual<T> sqrt(const Dual<T>& x) {
  T s = sqrt(x.re);
  return {s, x.du / (2.0 * s)};
}
template <class T> Dual<T> sinh(const Dual<T>& x) { return {sinh(x.re), cosh(x.re) * x.du}; }
template <class T> Dual<T> cosh(const Dual<T>& x) { return {cosh(x.re), sinh(x.re) * x.du}; }
template <class T> Dual<T> tanh(const Dual<T>& x) {
  T t = tanh(x.re);
  return {t, (1.0 - t * t) * x.du};
}
// x > 0 assumed (used for warp powers h = c * s^p on positive domains).
template <class T> Dual<T> pow(const Dual<T>& x, double p) {
  return {pow(x.re, p), (p * pow(x.re, p - 1.0)) * x.du};
}

template <class T> Dual<T> sqr(const Dual<T>& x) { return x * x; }
inline double sqr(double x) { return x * x; }

}  // namespace ricci
