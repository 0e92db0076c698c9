#pragma once

// Forward-mode automatic differentiation over the four space-time
// coordinates (t, x, y, z). Nesting Dual<Dual<double>> yields exact first and
// second partial derivatives, which is what the analytic backend needs to
// evaluate field strengths built from first derivatives of connections.

#include <array>
#include <cmath>
#include <type_traits>

namespace spincharge {

inline constexpr int kSpacetimeDim = 4;

template <class T>
struct Dual {
  T v{};
  std::array<T, kSpacetimeDim> d{};

  Dual() = default;
  Dual(double c) : v(c) {}  // NOLINT(google-explicit-constructor)
  Dual(T value, const std::array<T, kSpacetimeDim>& grad) : v(value), d(grad) {}
};

using Jet1 = Dual<double>;
using Jet2 = Dual<Jet1>;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

// Underlying double value at any nesting depth.
inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v + b.v;
  for (int i = 0; i < kSpacetimeDim; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v - b.v;
  for (int i = 0; i < kSpacetimeDim; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  Dual<T> r;
  r.v = -a.v;
  for (int i = 0; i < kSpacetimeDim; ++i) r.d[i] = -a.d[i];
  return r;
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  Dual<T> r;
  r.v = a.v * b.v;
  for (int i = 0; i < kSpacetimeDim; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double c) {
  Dual<T> r;
  r.v = a.v * c;
  for (int i = 0; i < kSpacetimeDim; ++i) r.d[i] = a.d[i] * c;
  return r;
}
template <class T>
Dual<T> operator*(double c, const Dual<T>& a) {
  return a * c;
}
template <class T>
Dual<T> operator+(const Dual<T>& a, double c) {
  Dual<T> r = a;
  r.v = r.v + c;
  return r;
}
template <class T>
Dual<T> operator+(double c, const Dual<T>& a) {
  return a + c;
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double c) {
  return a + (-c);
}
template <class T>
Dual<T> operator-(double c, const Dual<T>& a) {
  return (-a) + c;
}
template <class T>
Dual<T> reciprocal(const Dual<T>& a) {
  Dual<T> r;
  r.v = 1.0 / a.v;
  const T scale = -(r.v * r.v);
  for (int i = 0; i < kSpacetimeDim; ++i) r.d[i] = a.d[i] * scale;
  return r;
}
inline double reciprocal(double a) { return 1.0 / a; }

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  return a * reciprocal(b);
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double c) {
  return a * (1.0 / c);
}
template <class T>
Dual<T> operator/(double c, const Dual<T>& a) {
  return reciprocal(a) * c;
}

template <class T>
Dual<T>& operator+=(Dual<T>& a, const Dual<T>& b) {
  a = a + b;
  return a;
}
template <class T>
Dual<T>& operator-=(Dual<T>& a, const Dual<T>& b) {
  a = a - b;
  return a;
}
template <class T>
Dual<T>& operator*=(Dual<T>& a, const Dual<T>& b) {
  a = a * b;
  return a;
}

// Chain rule helper: f(a) with f(a.v) = fv and f'(a.v) = dfv.
template <class T>
Dual<T> chain(const Dual<T>& a, const T& fv, const T& dfv) {
  Dual<T> r;
  r.v = fv;
  for (int i = 0; i < kSpacetimeDim; ++i) r.d[i] = a.d[i] * dfv;
  return r;
}

using std::atan2;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;

template <class T>
Dual<T> sin(const Dual<T>& a) {
  return chain(a, T(sin(a.v)), T(cos(a.v)));
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  return chain(a, T(cos(a.v)), T(-sin(a.v)));
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  const T e = exp(a.v);
  return chain(a, e, e);
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return chain(a, T(log(a.v)), T(reciprocal(a.v)));
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  const T s = sqrt(a.v);
  return chain(a, s, T(reciprocal(s) * 0.5));
}
template <class T>
Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
  Dual<T> r;
  r.v = atan2(y.v, x.v);
  const T inv = reciprocal(x.v * x.v + y.v * y.v);
  for (int i = 0; i < kSpacetimeDim; ++i) r.d[i] = (x.v * y.d[i] - y.v * x.d[i]) * inv;
  return r;
}

// Seeds an independent variable: value c, unit derivative along `axis`.
template <class T>
Dual<T> variable(const T& c, int axis) {
  Dual<T> r;
  r.v = c;
  r.d[axis] = T(1.0);
  return r;
}

// Lifts a T-valued point into Dual<T>, seeding one more derivative level.
template <class T>
std::array<Dual<T>, kSpacetimeDim> seed_point(const std::array<T, kSpacetimeDim>& x) {
  std::array<Dual<T>, kSpacetimeDim> r;
  for (int mu = 0; mu < kSpacetimeDim; ++mu) r[mu] = variable(x[mu], mu);
  return r;
}

}  // namespace spincharge
