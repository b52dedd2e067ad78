#pragma once

#include <array>
#include <cmath>

#include "mpcal/dual.hpp"

namespace mpcal {

/// Symmetric second-order tensor stored as its six independent components in
/// Voigt order [11, 22, 33, 12, 13, 23]. The double contraction counts
/// off-diagonal entries twice, so norm() agrees with the full-tensor
/// Frobenius norm.
template <class T>
struct SymTensor {
  std::array<T, 6> c{};

  static constexpr int k11 = 0, k22 = 1, k33 = 2, k12 = 3, k13 = 4, k23 = 5;

  static SymTensor zero() { return {}; }

  static SymTensor identity() {
    SymTensor t;
    t.c[k11] = T(1);
    t.c[k22] = T(1);
    t.c[k33] = T(1);
    return t;
  }

  static SymTensor diag(const T& a, const T& b, const T& c3) {
    SymTensor t;
    t.c[k11] = a;
    t.c[k22] = b;
    t.c[k33] = c3;
    return t;
  }

  T& operator[](int i) { return c[i]; }
  const T& operator[](int i) const { return c[i]; }

  T trace() const { return c[k11] + c[k22] + c[k33]; }

  SymTensor deviator() const {
    SymTensor s = *this;
    T m = trace() / 3.0;
    s.c[k11] -= m;
    s.c[k22] -= m;
    s.c[k33] -= m;
    return s;
  }

  SymTensor& operator+=(const SymTensor& o) {
    for (int i = 0; i < 6; ++i) c[i] += o.c[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    for (int i = 0; i < 6; ++i) c[i] -= o.c[i];
    return *this;
  }
  SymTensor operator+(SymTensor o) const { return o += *this; }
  SymTensor operator-(const SymTensor& o) const {
    SymTensor r = *this;
    return r -= o;
  }
  SymTensor operator*(const T& s) const {
    SymTensor r = *this;
    for (auto& x : r.c) x = x * s;
    return r;
  }
};

/// Off-diagonal components enter twice: a:b = sum_ij a_ij b_ij.
template <class T>
T ddot(const SymTensor<T>& a, const SymTensor<T>& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2] +
         2.0 * (a.c[3] * b.c[3] + a.c[4] * b.c[4] + a.c[5] * b.c[5]);
}

template <class T>
T norm(const SymTensor<T>& a) {
  using std::sqrt;
  return sqrt(ddot(a, a));
}

template <class T>
SymTensor<T> promote(const SymTensor<double>& a) {
  SymTensor<T> r;
  for (int i = 0; i < 6; ++i) r.c[i] = T(a.c[i]);
  return r;
}

inline SymTensor<double> real_part(const SymTensor<std::complex<double>>& a) {
  SymTensor<double> r;
  for (int i = 0; i < 6; ++i) r.c[i] = a.c[i].real();
  return r;
}

}  // namespace mpcal
