#include "spincharge/analytic.hpp"

#include <cmath>
#include <random>

namespace spincharge {

namespace {

template <class T>
Spinor<T> lift(const Spinor<double>& s) {
  return {Cplx<T>{T(s[0].re), T(s[0].im)}, Cplx<T>{T(s[1].re), T(s[1].im)}};
}

template <class T>
Mat2<T> lift(const Mat2<double>& m) {
  Mat2<T> r;
  for (int i = 0; i < 4; ++i) r.e[i] = {T(m.e[i].re), T(m.e[i].im)};
  return r;
}

bool has_time_modes(const SmoothScalar& f) {
  for (const auto& m : f.modes) {
    if (m.k[0] != 0.0) return true;
  }
  return false;
}

SupportBox cube_box(double half_width, bool with_time) {
  SupportBox box;
  for (int mu = 0; mu < 4; ++mu) {
    const double h = (mu == 0 && !with_time) ? 0.0 : half_width;
    box.lo[mu] = -h;
    box.hi[mu] = h;
  }
  return box;
}

}  // namespace

FieldSample<Jet1> eval_analytic(const AnalyticFamily& family, const Point4& point) {
  Point4T<Jet1> x;
  for (int mu = 0; mu < 4; ++mu) x[mu] = variable(point[mu], mu);
  return family.sample(x);
}

SmoothScalar SmoothScalar::random(std::uint64_t seed, int count, double total_amplitude,
                                  double max_k, bool with_time) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  SmoothScalar f;
  for (int i = 0; i < count; ++i) {
    Mode m;
    m.amplitude = total_amplitude / count * unit(rng);
    for (int mu = 0; mu < 4; ++mu) m.k[mu] = max_k * unit(rng);
    if (!with_time) m.k[0] = 0.0;
    m.phase = phase(rng);
    f.modes.push_back(m);
  }
  return f;
}

FamilyPtr random_smooth_family(std::uint64_t seed, const RandomFamilyOptions& options) {
  const double h = options.box_half_width;
  const bool td = options.time_dependent;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto next_seed = [&rng]() { return rng(); };

  Bump bump;
  bump.radius = {td ? h : 1e300, h, h, h};

  // Vacuum spinor with both components populated.
  const double mix = 0.35 * M_PI + 0.2 * unit(rng);
  const double rel_phase = M_PI * unit(rng);
  const Spinor<double> vacuum{Cplx<double>{std::cos(mix), 0.0},
                              Cplx<double>{std::sin(mix) * std::cos(rel_phase),
                                           std::sin(mix) * std::sin(rel_phase)}};

  // Four real perturbation channels, each bounded by 0.125 so |δψ| <= 0.25.
  std::array<SmoothScalar, 4> dpsi;
  for (auto& f : dpsi) f = SmoothScalar::random(next_seed(), 3, 0.125, 2.5, td);
  std::array<SmoothScalar, 4> da;
  for (auto& f : da) {
    f = SmoothScalar::random(next_seed(), 3, options.with_gauge_potential ? 0.6 : 0.0, 2.0, td);
  }
  std::array<SmoothScalar, 3> angles;
  for (auto& f : angles) {
    f = SmoothScalar::random(next_seed(), 3, options.with_spin_frame ? 1.5 : 0.0, 2.0, td);
  }
  std::array<double, 3> angle_offsets{};
  if (options.with_spin_frame) {
    for (double& o : angle_offsets) o = M_PI * unit(rng);
  }

  auto rule = [=]<class T>(const Point4T<T>& x) {
    const T b = bump(x);
    FieldSample<T> s;
    for (int c = 0; c < 2; ++c) {
      s.psi[c] = {T(vacuum[c].re) + b * dpsi[2 * c](x), T(vacuum[c].im) + b * dpsi[2 * c + 1](x)};
    }
    for (int mu = 0; mu < 4; ++mu) s.a_mu[mu] = b * da[mu](x);
    const Mat2<T> r1 = su2_axis_rotation(2, T(angle_offsets[0]) + b * angles[0](x));
    const Mat2<T> r2 = su2_axis_rotation(1, T(angle_offsets[1]) + b * angles[1](x));
    const Mat2<T> r3 = su2_axis_rotation(2, T(angle_offsets[2]) + b * angles[2](x));
    s.u = r1 * r2 * r3;
    return s;
  };
  return make_family("random-smooth:" + std::to_string(seed), cube_box(h, td), td, rule);
}

FamilyPtr constant_family(const Spinor<double>& psi, const std::array<double, 4>& a_mu,
                          const Mat2<double>& u) {
  auto rule = [=]<class T>(const Point4T<T>&) {
    FieldSample<T> s;
    s.psi = lift<T>(psi);
    for (int mu = 0; mu < 4; ++mu) s.a_mu[mu] = T(a_mu[mu]);
    s.u = lift<T>(u);
    return s;
  };
  return make_family("constant", cube_box(1.0, false), false, rule);
}

FamilyPtr plane_wave_family(const Point4& k, const Spinor<double>& chi) {
  auto rule = [=]<class T>(const Point4T<T>& x) {
    T phase(0.0);
    for (int mu = 0; mu < 4; ++mu) phase = phase + x[mu] * k[mu];
    const Cplx<T> w = expi(phase);
    const Spinor<T> c = lift<T>(chi);
    FieldSample<T> s;
    s.psi = {w * c[0], w * c[1]};
    s.u = Mat2<T>::identity();
    return s;
  };
  return make_family("plane-wave", cube_box(M_PI, k[0] != 0.0), k[0] != 0.0, rule);
}

FamilyPtr gaussian_bump_family(const Vec3d& centre, double width, double amplitude,
                               const Spinor<double>& chi) {
  auto rule = [=]<class T>(const Point4T<T>& x) {
    T r2(0.0);
    for (int k = 0; k < 3; ++k) {
      const T d = x[k + 1] - centre[k];
      r2 = r2 + d * d;
    }
    const T rho = 1.0 + amplitude * exp(r2 * (-1.0 / (width * width)));
    const Spinor<T> c = lift<T>(chi);
    FieldSample<T> s;
    s.psi = scale(c, rho);
    s.u = Mat2<T>::identity();
    return s;
  };
  return make_family("gaussian-bump", cube_box(6.0 * width, false), false, rule);
}

FamilyPtr pure_rho_family(std::uint64_t seed, double base, double half_width) {
  Bump bump;
  bump.radius = {1e300, half_width, half_width, half_width};
  const SmoothScalar f = SmoothScalar::random(seed, 4, 0.5 * base, 2.5, false);
  auto rule = [=]<class T>(const Point4T<T>& x) {
    FieldSample<T> s;
    const T rho = base + bump(x) * f(x);
    s.psi = {Cplx<T>{rho, T(0.0)}, Cplx<T>{T(0.0), T(0.0)}};
    s.u = Mat2<T>::identity();
    return s;
  };
  return make_family("pure-rho:" + std::to_string(seed), cube_box(half_width, false), false, rule);
}

FamilyPtr abelian_frame_family(const SmoothScalar& f, double half_width) {
  auto rule = [=]<class T>(const Point4T<T>& x) {
    FieldSample<T> s;
    s.psi = {Cplx<T>{T(std::sqrt(0.5)), T(0.0)}, Cplx<T>{T(0.0), T(std::sqrt(0.5))}};
    s.u = su2_axis_rotation(2, f(x));
    return s;
  };
  return make_family("abelian-frame", cube_box(half_width, false), false, rule);
}

FamilyPtr gauge_maxwell(FamilyPtr base, SmoothScalar beta, double charge) {
  const bool td = base->time_dependent() || has_time_modes(beta);
  auto rule = [=]<class T>(const Point4T<T>& x) {
    FieldSample<T> s = base->sample(x);
    const Dual<T> b = beta(seed_point(x));
    const Cplx<T> w = expi(b.v);
    s.psi = {w * s.psi[0], w * s.psi[1]};
    // Covariant derivative i∂ - eA is preserved by A → A - ∂β/e.
    for (int mu = 0; mu < 4; ++mu) s.a_mu[mu] = s.a_mu[mu] - b.d[mu] * (1.0 / charge);
    return s;
  };
  return make_family(base->id() + "+maxwell", base->support(), td, rule);
}

FamilyPtr gauge_internal(FamilyPtr base, SmoothScalar alpha) {
  auto rule = [=]<class T>(const Point4T<T>& x) {
    FieldSample<T> s = base->sample(x);
    s.u = s.u * su2_axis_rotation(2, alpha(x));
    return s;
  };
  const bool td = base->time_dependent() || has_time_modes(alpha);
  return make_family(base->id() + "+internal", base->support(), td, rule);
}

}  // namespace spincharge
