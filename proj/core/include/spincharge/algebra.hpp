#pragma once

// Small fixed-size algebra templated on the scalar type so the same sitewise
// code runs on plain doubles (lattice backend) and on jets (analytic backend).

#include <array>
#include <cmath>
#include <complex>

#include "spincharge/dual.hpp"

namespace spincharge {

template <class T>
struct Vec3 {
  std::array<T, 3> c{};

  Vec3() = default;
  Vec3(T x, T y, T z) : c{x, y, z} {}

  T& operator[](int i) { return c[i]; }
  const T& operator[](int i) const { return c[i]; }
};

using Vec3d = Vec3<double>;

template <class T>
Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
template <class T>
Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
template <class T>
Vec3<T> operator-(const Vec3<T>& a) {
  return {-a[0], -a[1], -a[2]};
}
template <class T, class S>
Vec3<T> operator*(const S& s, const Vec3<T>& a) {
  return {a[0] * s, a[1] * s, a[2] * s};
}
template <class T, class S>
Vec3<T> operator*(const Vec3<T>& a, const S& s) {
  return {a[0] * s, a[1] * s, a[2] * s};
}
template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
template <class T>
Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
template <class T>
T triple(const Vec3<T>& a, const Vec3<T>& b, const Vec3<T>& c) {
  return dot(a, cross(b, c));
}
inline double norm(const Vec3d& a) { return std::sqrt(dot(a, a)); }
inline Vec3d normalized(const Vec3d& a) { return a * (1.0 / norm(a)); }

template <class T>
struct Mat3 {
  std::array<std::array<T, 3>, 3> m{};

  T& operator()(int r, int c) { return m[r][c]; }
  const T& operator()(int r, int c) const { return m[r][c]; }
};

using Mat3d = Mat3<double>;

template <class T>
Vec3<T> operator*(const Mat3<T>& a, const Vec3<T>& v) {
  Vec3<T> r;
  for (int i = 0; i < 3; ++i) r[i] = a(i, 0) * v[0] + a(i, 1) * v[1] + a(i, 2) * v[2];
  return r;
}
template <class T>
Mat3<T> operator*(const Mat3<T>& a, const Mat3<T>& b) {
  Mat3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
  return r;
}
template <class T>
Mat3<T> transpose(const Mat3<T>& a) {
  Mat3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}
inline double det(const Mat3d& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

// Complex number over an arbitrary real scalar (std::complex is only
// specified for floating-point types).
template <class T>
struct Cplx {
  T re{};
  T im{};

  Cplx() = default;
  Cplx(T r, T i) : re(r), im(i) {}
};

template <class T>
Cplx<T> operator+(const Cplx<T>& a, const Cplx<T>& b) {
  return {a.re + b.re, a.im + b.im};
}
template <class T>
Cplx<T> operator-(const Cplx<T>& a, const Cplx<T>& b) {
  return {a.re - b.re, a.im - b.im};
}
template <class T>
Cplx<T> operator-(const Cplx<T>& a) {
  return {-a.re, -a.im};
}
template <class T>
Cplx<T> operator*(const Cplx<T>& a, const Cplx<T>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class T, class S>
Cplx<T> scale(const Cplx<T>& a, const S& s) {
  return {a.re * s, a.im * s};
}
template <class T>
Cplx<T> conj(const Cplx<T>& a) {
  return {a.re, -a.im};
}
template <class T>
T abs2(const Cplx<T>& a) {
  return a.re * a.re + a.im * a.im;
}
// Multiplication by i.
template <class T>
Cplx<T> times_i(const Cplx<T>& a) {
  return {-a.im, a.re};
}
template <class T>
Cplx<T> expi(const T& phase) {
  return {cos(phase), sin(phase)};
}

inline std::complex<double> to_std(const Cplx<double>& a) { return {a.re, a.im}; }
inline Cplx<double> from_std(const std::complex<double>& a) { return {a.real(), a.imag()}; }

template <class T>
using Spinor = std::array<Cplx<T>, 2>;

// 2x2 complex matrix, row-major.
template <class T>
struct Mat2 {
  std::array<Cplx<T>, 4> e{};

  Cplx<T>& operator()(int r, int c) { return e[2 * r + c]; }
  const Cplx<T>& operator()(int r, int c) const { return e[2 * r + c]; }

  static Mat2 identity() {
    Mat2 r;
    r(0, 0) = {T(1.0), T(0.0)};
    r(1, 1) = {T(1.0), T(0.0)};
    return r;
  }
};

template <class T>
Mat2<T> operator*(const Mat2<T>& a, const Mat2<T>& b) {
  Mat2<T> r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}
template <class T>
Mat2<T> operator+(const Mat2<T>& a, const Mat2<T>& b) {
  Mat2<T> r;
  for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
  return r;
}
template <class T>
Mat2<T> operator-(const Mat2<T>& a, const Mat2<T>& b) {
  Mat2<T> r;
  for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] - b.e[i];
  return r;
}
template <class T, class S>
Mat2<T> scale(const Mat2<T>& a, const S& s) {
  Mat2<T> r;
  for (int i = 0; i < 4; ++i) r.e[i] = scale(a.e[i], s);
  return r;
}
template <class T>
Mat2<T> adjoint(const Mat2<T>& a) {
  Mat2<T> r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = conj(a(j, i));
  return r;
}
template <class T>
Spinor<T> operator*(const Mat2<T>& a, const Spinor<T>& v) {
  return {a(0, 0) * v[0] + a(0, 1) * v[1], a(1, 0) * v[0] + a(1, 1) * v[1]};
}
template <class T>
Cplx<T> det(const Mat2<T>& a) {
  return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
}
template <class T>
Cplx<T> trace(const Mat2<T>& a) {
  return a(0, 0) + a(1, 1);
}

template <class T>
Spinor<T> operator+(const Spinor<T>& a, const Spinor<T>& b) {
  return {a[0] + b[0], a[1] + b[1]};
}
template <class T>
Spinor<T> operator-(const Spinor<T>& a, const Spinor<T>& b) {
  return {a[0] - b[0], a[1] - b[1]};
}
template <class T, class S>
Spinor<T> scale(const Spinor<T>& a, const S& s) {
  return {scale(a[0], s), scale(a[1], s)};
}
// a† b
template <class T>
Cplx<T> inner(const Spinor<T>& a, const Spinor<T>& b) {
  return conj(a[0]) * b[0] + conj(a[1]) * b[1];
}
template <class T>
T norm2(const Spinor<T>& a) {
  return abs2(a[0]) + abs2(a[1]);
}

// Pauli matrices applied to a spinor: sigma_a v.
template <class T>
Spinor<T> sigma_apply(int a, const Spinor<T>& v) {
  switch (a) {
    case 0:
      return {v[1], v[0]};
    case 1:
      return {times_i(-v[1]), times_i(v[0])};
    default:
      return {v[0], -v[1]};
  }
}

template <class T>
Mat2<T> sigma(int a) {
  Mat2<T> r;
  const T one(1.0);
  const T zero(0.0);
  switch (a) {
    case 0:
      r(0, 1) = {one, zero};
      r(1, 0) = {one, zero};
      break;
    case 1:
      r(0, 1) = {zero, -one};
      r(1, 0) = {zero, one};
      break;
    default:
      r(0, 0) = {one, zero};
      r(1, 1) = {-one, zero};
      break;
  }
  return r;
}

// v·sigma for a real 3-vector v.
template <class T>
Mat2<T> sigma_dot(const Vec3<T>& v) {
  Mat2<T> r;
  r(0, 0) = {v[2], T(0.0)};
  r(1, 1) = {-v[2], T(0.0)};
  r(0, 1) = {v[0], -v[1]};
  r(1, 0) = {v[0], v[1]};
  return r;
}

// Expectation vector Φ†σΦ.
template <class T>
Vec3<T> pauli_expectation(const Spinor<T>& phi) {
  const Cplx<T> cross_term = conj(phi[0]) * phi[1];
  return {cross_term.re * 2.0, cross_term.im * 2.0, abs2(phi[0]) - abs2(phi[1])};
}

// Components W_a of a 2x2 matrix K in the Pauli basis: W_a = Re Tr(σ_a K).
template <class T>
Vec3<T> pauli_components(const Mat2<T>& k) {
  // Tr(σ_x K) = K10 + K01, Tr(σ_y K) = i(K01 - K10), Tr(σ_z K) = K00 - K11
  const Cplx<T> tx = k(1, 0) + k(0, 1);
  const Cplx<T> ty = times_i(k(0, 1) - k(1, 0));
  const Cplx<T> tz = k(0, 0) - k(1, 1);
  return {tx.re, ty.re, tz.re};
}

// exp(i θ v̂·σ / 2) with unit v̂: cos(θ/2) + i sin(θ/2) v̂·σ.
template <class T>
Mat2<T> su2_rotation(const Vec3<T>& unit_axis, const T& angle) {
  const T c = cos(angle * 0.5);
  const T s = sin(angle * 0.5);
  Mat2<T> r;
  r(0, 0) = {c, s * unit_axis[2]};
  r(1, 1) = {c, -(s * unit_axis[2])};
  // i s (v_x σ_x + v_y σ_y): (0,1) = i s (v_x - i v_y) = s v_y + i s v_x
  r(0, 1) = {s * unit_axis[1], s * unit_axis[0]};
  r(1, 0) = {-(s * unit_axis[1]), s * unit_axis[0]};
  return r;
}

// exp(i σ_a θ / 2) about a coordinate axis.
template <class T>
Mat2<T> su2_axis_rotation(int axis, const T& angle) {
  Vec3<T> v{T(0.0), T(0.0), T(0.0)};
  v[axis] = T(1.0);
  return su2_rotation(v, angle);
}

// SO(3) frame M_ab = ½ Tr[U† σ_a U σ_b].
template <class T>
Mat3<T> spin_frame(const Mat2<T>& u) {
  Mat3<T> m;
  const Mat2<T> ud = adjoint(u);
  for (int a = 0; a < 3; ++a) {
    const Mat2<T> conj_a = ud * sigma<T>(a) * u;
    const Vec3<T> comps = pauli_components(conj_a);
    for (int b = 0; b < 3; ++b) m(a, b) = comps[b] * 0.5;
  }
  return m;
}

}  // namespace spincharge
