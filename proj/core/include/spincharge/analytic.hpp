#pragma once

// Analytically differentiable field families. Every family is a single
// templated evaluation rule; evaluating it on jets gives exact derivatives,
// which lets Leibniz-rule identities be checked to floating-point precision.

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "spincharge/algebra.hpp"
#include "spincharge/dual.hpp"

namespace spincharge {

// (t, x, y, z)
using Point4 = std::array<double, 4>;

template <class T>
using Point4T = std::array<T, 4>;

template <class T>
struct FieldSample {
  Spinor<T> psi;
  std::array<T, 4> a_mu;  // (A_0, A_x, A_y, A_z)
  Mat2<T> u;              // SU(2) spin frame used for the decomposition
};

struct SupportBox {
  Point4 lo{};
  Point4 hi{};

  bool contains(const Point4& p) const {
    for (int mu = 0; mu < 4; ++mu) {
      if (p[mu] < lo[mu] || p[mu] > hi[mu]) return false;
    }
    return true;
  }
};

class AnalyticFamily {
 public:
  virtual ~AnalyticFamily() = default;

  virtual const std::string& id() const = 0;
  virtual const SupportBox& support() const = 0;
  // Whether fields depend on t; static families have exactly zero time derivatives.
  virtual bool time_dependent() const = 0;

  virtual FieldSample<double> sample(const Point4T<double>& x) const = 0;
  virtual FieldSample<Jet1> sample(const Point4T<Jet1>& x) const = 0;
  virtual FieldSample<Jet2> sample(const Point4T<Jet2>& x) const = 0;
};

using FamilyPtr = std::shared_ptr<const AnalyticFamily>;

// Wraps a C++20 template lambda `[]<class T>(const Point4T<T>&) -> FieldSample<T>`.
template <class Rule>
class RuleFamily final : public AnalyticFamily {
 public:
  RuleFamily(std::string id, SupportBox box, bool time_dependent, Rule rule)
      : id_(std::move(id)), box_(box), time_dependent_(time_dependent), rule_(std::move(rule)) {}

  const std::string& id() const override { return id_; }
  const SupportBox& support() const override { return box_; }
  bool time_dependent() const override { return time_dependent_; }

  FieldSample<double> sample(const Point4T<double>& x) const override { return rule_(x); }
  FieldSample<Jet1> sample(const Point4T<Jet1>& x) const override { return rule_(x); }
  FieldSample<Jet2> sample(const Point4T<Jet2>& x) const override { return rule_(x); }

 private:
  std::string id_;
  SupportBox box_;
  bool time_dependent_;
  Rule rule_;
};

template <class Rule>
FamilyPtr make_family(std::string id, SupportBox box, bool time_dependent, Rule rule) {
  return std::make_shared<RuleFamily<Rule>>(std::move(id), box, time_dependent, std::move(rule));
}

// Field value and exact first partials ∂_0..∂_3 at a point.
FieldSample<Jet1> eval_analytic(const AnalyticFamily& family, const Point4& point);

// Smooth compactly supported bump exp(1 - 1/(1 - r²)) with r² the scaled
// squared distance from `centre`; identically zero (with all derivatives)
// outside the unit ball.
struct Bump {
  Point4 centre{};
  Point4 radius{1.0, 1.0, 1.0, 1.0};

  template <class T>
  T operator()(const Point4T<T>& x) const {
    T r2(0.0);
    for (int mu = 0; mu < 4; ++mu) {
      const T d = (x[mu] - centre[mu]) * (1.0 / radius[mu]);
      r2 = r2 + d * d;
    }
    if (primal(r2) >= 1.0) return T(0.0);
    return exp(1.0 - 1.0 / (1.0 - r2));
  }
};

// Random superposition of plane modes a·sin(k·x + φ).
struct SmoothScalar {
  struct Mode {
    double amplitude;
    Point4 k;
    double phase;
  };
  std::vector<Mode> modes;
  double offset = 0.0;

  template <class T>
  T operator()(const Point4T<T>& x) const {
    T acc(offset);
    for (const Mode& m : modes) {
      T arg(m.phase);
      for (int mu = 0; mu < 4; ++mu) arg = arg + x[mu] * m.k[mu];
      acc = acc + sin(arg) * m.amplitude;
    }
    return acc;
  }

  // `count` modes with amplitudes summing to at most `total_amplitude`,
  // wave numbers in [-max_k, max_k]; time wave number zeroed unless `with_time`.
  static SmoothScalar random(std::uint64_t seed, int count, double total_amplitude, double max_k,
                             bool with_time);
};

// Options for the seeded random families used by identity and invariance checks.
struct RandomFamilyOptions {
  double box_half_width = 1.5;
  bool time_dependent = true;
  bool with_gauge_potential = true;
  bool with_spin_frame = true;
};

// Compact-support, vortex-free configuration: ψ = vacuum spinor + bump-modulated
// perturbation with |ψ| >= 0.5, A_μ = bump·(random), U a product of three
// axis rotations with bump-modulated random angles.
FamilyPtr random_smooth_family(std::uint64_t seed, const RandomFamilyOptions& options = {});

FamilyPtr constant_family(const Spinor<double>& psi, const std::array<double, 4>& a_mu = {},
                          const Mat2<double>& u = Mat2<double>::identity());

// ψ = e^{i k·x} χ with k·x = Σ_μ k_μ x_μ.
FamilyPtr plane_wave_family(const Point4& k, const Spinor<double>& chi);

// ψ = (1 + amplitude·exp(-|x - c|²/w²)) χ, spatial and static.
FamilyPtr gaussian_bump_family(const Vec3d& centre, double width, double amplitude,
                               const Spinor<double>& chi);

// ψ = ρ(x)(1, 0)ᵀ with ρ = base + bump·(random), constant U and Φ, A = 0, static.
FamilyPtr pure_rho_family(std::uint64_t seed, double base = 1.0, double half_width = 1.5);

// Constant ψ, A = 0 and U(x) = exp(iσ_3 f(x)/2) for a smooth static f.
FamilyPtr abelian_frame_family(const SmoothScalar& f, double half_width = 1.5);

// Maxwellian gauge transform of `base`: ψ → e^{iβ}ψ, A_μ → A_μ - ∂_μβ/e, U unchanged
// (the sign that keeps i∂ - eA covariant).
FamilyPtr gauge_maxwell(FamilyPtr base, SmoothScalar beta, double charge);

// Internal U_I(1) transform: U → U exp(iσ_3 α/2); ψ and A unchanged, so the
// derived Φ = U†ψ/ρ picks up exp(-iσ_3 α/2).
FamilyPtr gauge_internal(FamilyPtr base, SmoothScalar alpha);

}  // namespace spincharge
