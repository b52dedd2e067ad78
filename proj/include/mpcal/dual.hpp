#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace mpcal {

/// Extracts the real part of a scalar, recursing through nested number types.
/// Branch decisions and convergence tests are always made on this value.
inline double real_part(double x) { return x; }
inline double real_part(const std::complex<double>& z) { return z.real(); }

template <class T>
struct Dual;

template <class T>
double real_part(const Dual<T>& x) { return real_part(x.v); }

template <class T>
inline constexpr bool is_dual_v = false;
template <class T>
inline constexpr bool is_dual_v<Dual<T>> = true;

/// Forward-mode derivative-carrying number: value plus one directional
/// derivative. Nest as Dual<Dual<double>> to obtain second directional
/// derivatives; instantiate over std::complex<double> to differentiate
/// along a complex-perturbed path.
template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  constexpr Dual() = default;
  constexpr Dual(const T& value) : v(value) {}
  constexpr Dual(const T& value, const T& deriv) : v(value), d(deriv) {}

  template <class U>
    requires(!is_dual_v<U> && std::is_convertible_v<U, T> && !std::is_same_v<U, T>)
  constexpr Dual(const U& value) : v(value) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) { v /= o.v; d = (d - v * o.d) / o.v; return *this; }

  Dual operator-() const { return {-v, -d}; }
  Dual operator+() const { return *this; }
};

template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }

template <class T, class U>
  requires(!is_dual_v<U> && std::is_convertible_v<U, T>)
Dual<T> operator+(Dual<T> a, const U& b) { a.v += b; return a; }
template <class T, class U>
  requires(!is_dual_v<U> && std::is_convertible_v<U, T>)
Dual<T> operator+(const U& a, Dual<T> b) { b.v += a; return b; }
template <class T, class U>
  requires(!is_dual_v<U> && std::is_convertible_v<U, T>)
Dual<T> operator-(Dual<T> a, const U& b) { a.v -= b; return a; }
template <class T, class U>
  requires(!is_dual_v<U> && std::is_convertible_v<U, T>)
Dual<T> operator-(const U& a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T, class U>
  requires(!is_dual_v<U> && std::is_convertible_v<U, T>)
Dual<T> operator*(const Dual<T>& a, const U& b) { return {a.v * b, a.d * b}; }
template <class T, class U>
  requires(!is_dual_v<U> && std::is_convertible_v<U, T>)
Dual<T> operator*(const U& a, const Dual<T>& b) { return {b.v * a, b.d * a}; }
template <class T, class U>
  requires(!is_dual_v<U> && std::is_convertible_v<U, T>)
Dual<T> operator/(const Dual<T>& a, const U& b) { return {a.v / b, a.d / b}; }
template <class T, class U>
  requires(!is_dual_v<U> && std::is_convertible_v<U, T>)
Dual<T> operator/(const U& a, const Dual<T>& b) {
  T q = T(a) / b.v;
  return {q, -q * b.d / b.v};
}

template <class T>
Dual<T> exp(const Dual<T>& x) {
  using std::exp;
  T e = exp(x.v);
  return {e, x.d * e};
}

template <class T>
Dual<T> log(const Dual<T>& x) {
  using std::log;
  return {log(x.v), x.d / x.v};
}

template <class T>
Dual<T> sqrt(const Dual<T>& x) {
  using std::sqrt;
  T s = sqrt(x.v);
  return {s, x.d / (s + s)};
}

// Ordering on the real part; used only where the model branches.
template <class T, class U>
bool operator<(const Dual<T>& a, const U& b) { return real_part(a) < real_part(b); }
template <class T, class U>
bool operator>(const Dual<T>& a, const U& b) { return real_part(a) > real_part(b); }

}  // namespace mpcal
