#pragma once

// Spin-charge decomposition ψ = ρ U Φ and its connection fields
//
//   ½ W_μ·σ = i U† ∂_μ U
//   J_μ     = -e A_μ + i Φ† ∂_μ Φ + ½ n·W_μ
//   X_μ     = W_μ - 2 J_μ n
//
// on the lattice (central differences, static) and at single points of an
// analytic family (exact jets).

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "spincharge/algebra.hpp"
#include "spincharge/analytic.hpp"
#include "spincharge/lattice.hpp"

namespace spincharge {

// Which local section of the Hopf bundle realises U[s].
//   north: regular everywhere except s = -ẑ, equals the identity at s = +ẑ.
//   south: V† U_north(R_x(π) s) with V = iσ_x, regular except at s = +ẑ.
enum class SectionConvention : std::uint8_t { north, south };

template <class T>
Mat2<T> u_from_director_section(const Vec3<T>& s, SectionConvention convention) {
  if (convention == SectionConvention::south) {
    const Vec3<T> flipped{s[0], -s[1], -s[2]};
    const Mat2<T> north = u_from_director_section(flipped, SectionConvention::north);
    // V† = -iσ_x
    Mat2<T> vdag;
    vdag(0, 1) = {T(0.0), T(-1.0)};
    vdag(1, 0) = {T(0.0), T(-1.0)};
    return vdag * north;
  }
  // U = [[c, -w*], [w, c]] with c = cos(θ/2), w = e^{iφ} sin(θ/2).
  const T c = sqrt((1.0 + s[2]) * 0.5);
  const T perp = sqrt(s[0] * s[0] + s[1] * s[1]);
  Mat2<T> u;
  u(0, 0) = {c, T(0.0)};
  u(1, 1) = {c, T(0.0)};
  if (primal(perp) == 0.0) return u;
  const T sin_half = sqrt((1.0 - s[2]) * 0.5);
  const T scale_factor = sin_half / perp;
  const Cplx<T> w{s[0] * scale_factor, s[1] * scale_factor};
  u(1, 0) = w;
  u(0, 1) = -conj(w);
  return u;
}

// True where the chosen section is singular (or numerically unreliable) for
// this director.
inline bool section_singular(const Vec3d& s, SectionConvention convention) {
  const bool on_axis = std::hypot(s[0], s[1]) < 1e-14;
  return on_axis && (convention == SectionConvention::north ? s[2] < 0.0 : s[2] > 0.0);
}

struct SectionReport {
  // Sites where the requested section was singular and the other one was used.
  std::vector<std::size_t> switched_sites;
};

using UnitaryField = LatticeField<Mat2<double>>;

// U[s] sitewise; satisfies (U(1,0)ᵀ)†σ(U(1,0)ᵀ) = s and det U = 1.
UnitaryField construct_U_from_s(const DirectorField& s,
                                SectionConvention convention = SectionConvention::north,
                                SectionReport* report = nullptr);

enum MaskBit : std::uint8_t {
  kMaskRho = 1,    // ρ = 0: Φ, n undefined
  kMaskPlus = 2,   // ρ₊ = 0: Ω₊ undefined (set to 0)
  kMaskMinus = 4,  // ρ₋ = 0: Ω₋ undefined (set to 0)
};

struct SpinChargeFields {
  LatticeGrid grid;
  ScalarField rho;
  LatticeField<std::array<double, 2>> rho_pm;
  LatticeField<std::array<double, 2>> omega_pm;
  UnitaryField u;
  LatticeField<Spinor<double>> phi;
  DirectorField n;
  DirectorField s;
  LatticeField<Mat3d> m_frame;
  LatticeField<std::array<Vec3d, 4>> w_mu;
  LatticeField<std::array<double, 4>> j_mu;
  LatticeField<std::array<Vec3d, 4>> x_mu;
  LatticeField<std::uint8_t> mask;

  bool has_connections = false;
  // max |K - K†| over sites and directions for K = iU†∂U (finite differences
  // break exact anti-hermiticity of U†∂U).
  double hermiticity_residual = 0.0;
  // max |Im(iΦ†∂Φ)| over sites and directions.
  double current_imaginary_residual = 0.0;

  bool masked(std::size_t i) const { return (mask[i] & kMaskRho) != 0; }
};

SpinChargeFields decompose(const PauliField& psi, const UnitaryField& u);

// ψ = U (ρ₊ e^{iΩ₊}, ρ₋ e^{iΩ₋})ᵀ sitewise.
LatticeField<Spinor<double>> recompose(const SpinChargeFields& scf);

// Fills w_mu, j_mu, x_mu using central differences; static fields so
// ∂_0 ≡ 0 (W_0 = 0, J_0 = -e A_0). Masked sites keep zero connections.
void connection_fields(SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                       const SimulationParams& params);

LatticeField<Mat3d> spin_frame(const UnitaryField& u);

struct InvariantReport {
  double rho_split = 0.0;       // max |ρ² - ρ₊² - ρ₋²| / ρ²
  double phi_norm = 0.0;        // max |Φ†Φ - 1|
  double unitarity = 0.0;       // max |U†U - 1|
  double determinant = 0.0;     // max |det U - 1|
  double director_norm = 0.0;   // max | |n| - 1 |, | |s| - 1 |
  double frame_column = 0.0;    // max |s - M ẑ|
  double frame_orthogonality = 0.0;  // max |MᵀM - 1|, |det M - 1|
  double nx_identity = 0.0;     // max |n·X_μ - n·W_μ + 2 J_μ|
};

InvariantReport check_invariants(const SpinChargeFields& scf);

// ---------------------------------------------------------------------------
// Point evaluation with exact derivatives.

template <class T>
struct PointFields {
  T rho;
  Spinor<T> phi;
  Vec3<T> n;
  Mat2<T> u;
  Mat3<T> frame;
  std::array<T, 4> a_mu;
  std::array<Vec3<T>, 4> w;
  std::array<T, 4> j;
  std::array<Vec3<T>, 4> x;
};

// All fields as jets: values plus exact first partials. Derivatives of the
// connections (∂_ν W_μ etc.) come from second derivatives of the family.
struct PointDecomposition {
  PointFields<Jet1> fields;
  double hermiticity_residual = 0.0;
  double current_imaginary_residual = 0.0;
};

// Throws std::domain_error when ρ = 0 at the point (masked).
PointDecomposition decompose_point(const AnalyticFamily& family, const SimulationParams& params,
                                   const Point4& point);

// Magnetic field H_i = ε_ijk ∂_j A_k + h_ext from the family's potential.
Vec3d magnetic_field(const std::array<Jet1, 4>& a_mu, const SimulationParams& params);

}  // namespace spincharge
