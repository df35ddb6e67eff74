#pragma once

#include <cmath>
#include <type_traits>
#include <utility>

namespace qsflat {

/// Forward-mode dual scalar: value plus derivative along one seeded
/// direction. Nesting Dual<Dual<...>> yields higher-order mixed
/// directional derivatives.
template <class T>
struct Dual {
  T re{};  // value part
  T du{};  // derivative part

  Dual() = default;
  Dual(double c) : re(c), du() {}  // constants lift with zero derivative
  Dual(T r, T d) : re(std::move(r)), du(std::move(d)) {}
};

using D0 = double;
using D1 = Dual<D0>;
using D2 = Dual<D1>;
using D3 = Dual<D2>;
using D4 = Dual<D3>;

template <class T>
struct dual_level : std::integral_constant<int, 0> {};
template <class T>
struct dual_level<Dual<T>> : std::integral_constant<int, dual_level<T>::value + 1> {};
template <class T>
inline constexpr int dual_level_v = dual_level<std::decay_t<T>>::value;

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) { return value_of(x.re); }

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.re + b.re, a.du + b.du}; }
template <class T>
Dual<T> operator+(const Dual<T>& a, double b) { return {a.re + b, a.du}; }
template <class T>
Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.re, b.du}; }

template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.re - b.re, a.du - b.du}; }
template <class T>
Dual<T> operator-(const Dual<T>& a, double b) { return {a.re - b, a.du}; }
template <class T>
Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.re, -b.du}; }
template <class T>
Dual<T> operator-(const Dual<T>& a) { return {-a.re, -a.du}; }

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.re * b.re, a.du * b.re + a.re * b.du};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double b) { return {a.re * b, a.du * b}; }
template <class T>
Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.re, a * b.du}; }

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  return {a.re / b.re, (a.du * b.re - a.re * b.du) / (b.re * b.re)};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double b) { return {a.re / b, a.du / b}; }
template <class T>
Dual<T> operator/(double a, const Dual<T>& b) {
  return {a / b.re, -((a / (b.re * b.re)) * b.du)};
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) { a.re = a.re + b.re; a.du = a.du + b.du; return a; }
template <class T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) { a.re = a.re - b.re; a.du = a.du - b.du; return a; }

using std::atan;
using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tan;

template <class T>
Dual<T> sin(const Dual<T>& x) { return {sin(x.re), x.du * cos(x.re)}; }
template <class T>
Dual<T> cos(const Dual<T>& x) { return {cos(x.re), -(x.du * sin(x.re))}; }
template <class T>
Dual<T> tan(const Dual<T>& x) {
  T c = cos(x.re);
  return {tan(x.re), x.du / (c * c)};
}
template <class T>
Dual<T> exp(const Dual<T>& x) {
  T e = exp(x.re);
  return {e, x.du * e};
}
template <class T>
Dual<T> log(const Dual<T>& x) { return {log(x.re), x.du / x.re}; }
template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  T s = sqrt(x.re);
  return {s, x.du / (2.0 * s)};
}
template <class T>
Dual<T> atan(const Dual<T>& x) { return {atan(x.re), x.du / (1.0 + x.re * x.re)}; }

template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  T denom = x.re * x.re + y.re * y.re;
  return {atan2(y.re, x.re), (x.re * y.du - y.re * x.du) / denom};
}
template <class T>
Dual<T> atan2(const Dual<T>& y, double x) { return atan2(y, Dual<T>(x)); }
template <class T>
Dual<T> atan2(double y, const Dual<T>& x) { return atan2(Dual<T>(y), x); }

}  // namespace qsflat
