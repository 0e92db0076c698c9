#pragma once

// Pauli-Maxwell density and its rewritten (Georgi-Glashow) form.
//
//   L_P  = Re ψ†(i∂₀ - eA₀ + μ)ψ + (1/2m)|(i∂_k - eA_k)ψ|² + (ge/2m) ψ†σ·Hψ - ¼F²
//   L_GG = (1/2m)(∂ρ)² + ρ²(J₀+μ) + (ρ²/2m)J² + (ρ²/8m)(Dn)² + c_F/e² 𝓕² + c_Z (ge/m)ρ² H·M·n
//
// F² and 𝓕² are summed over all ordered index pairs with unit metric.
// The imaginary part of ψ†i∂₀ψ is iρ∂₀ρ, a total time derivative, and is
// dropped on the Pauli side.

#include <array>
#include <cstddef>
#include <string>

#include "spincharge/analytic.hpp"
#include "spincharge/decompose.hpp"
#include "spincharge/lattice.hpp"

namespace spincharge {

// Coefficients of the field-strength and Zeeman terms in L_GG.
struct GgCoefficients {
  std::string name;
  double field_strength = 0.0;  // c_F
  double zeeman = 0.0;          // c_Z

  // Values that follow from substituting ψ = ρUΦ (𝓕 = 2eF in the smooth
  // sector, ψ†σψ = ρ² M·n): c_F = -1/16, c_Z = 1/2.
  static GgCoefficients derived() { return {"derived", -1.0 / 16.0, 0.5}; }
  // The coefficients as usually quoted for the rewritten form: c_F = +1/16, c_Z = 1/4.
  static GgCoefficients as_printed() { return {"as-printed", 1.0 / 16.0, 0.25}; }
};

struct PauliTerms {
  double time = 0.0;
  double kinetic = 0.0;
  double zeeman = 0.0;
  double maxwell = 0.0;
  double total() const { return time + kinetic + zeeman + maxwell; }
};

struct GgTerms {
  double gradient_rho = 0.0;
  double time = 0.0;
  double current = 0.0;
  double covariant = 0.0;
  double field_strength = 0.0;
  double zeeman = 0.0;
  double total() const {
    return gradient_rho + time + current + covariant + field_strength + zeeman;
  }
};

// Analytic backend (exact derivatives).
PauliTerms pauli_terms(const FieldSample<Jet1>& sample, const SimulationParams& params);
double pauli_density(const AnalyticFamily& family, const SimulationParams& params,
                     const Point4& point);

GgTerms gg_terms(const PointFields<Jet1>& fields, const SimulationParams& params,
                 const GgCoefficients& coefficients = GgCoefficients::derived());
double gg_density(const AnalyticFamily& family, const SimulationParams& params, const Point4& point,
                  const GgCoefficients& coefficients = GgCoefficients::derived());

// Lattice backend (central differences, static).
ScalarField pauli_density(const PauliField& field, const SimulationParams& params);
// Requires connection fields; throws LatticeError otherwise. Masked sites get 0
// and are counted in `masked_sites`.
ScalarField gg_density(const SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                       const SimulationParams& params,
                       const GgCoefficients& coefficients = GgCoefficients::derived(),
                       std::size_t* masked_sites = nullptr);

// a³ Σ_x f(x) in site order with compensated summation.
double integrate(const ScalarField& density);

struct QuadratureSpec {
  int order = 12;  // Gauss-Legendre nodes per axis
  double tolerance = 1e-8;
};

struct DensityReport {
  std::string family;
  std::string backend;
  std::string quadrature;
  double integrated_pauli = 0.0;
  double integrated_gg = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  double pointwise_max_diff = 0.0;
  Point4 pointwise_max_location{};
  // Same comparison with GgCoefficients::as_printed().
  double integrated_gg_as_printed = 0.0;
  double rel_diff_as_printed = 0.0;
  std::size_t points = 0;
  std::size_t masked_points = 0;
  double tolerance = 0.0;
  bool pass = false;
};

double relative_difference(double a, double b);

// Integrates both densities over the family's support box (3D at t = 0 for
// static families, 4D otherwise). PASS iff rel_diff < tolerance.
DensityReport verify_identity(const AnalyticFamily& family, const SimulationParams& params,
                              const QuadratureSpec& quadrature = {});

// Samples ψ, A and U of a family on the lattice sites at time t.
struct SampledFields {
  PauliField pauli;
  UnitaryField u;
};
SampledFields sample_family(const AnalyticFamily& family, const LatticeGrid& grid, double t = 0.0);

// Lattice-backend comparison on sampled fields (stencil errors make this O(a²)).
DensityReport verify_identity_lattice(const AnalyticFamily& family, const SimulationParams& params,
                                      const LatticeGrid& grid);

// ψ → exp(i γ₀ s₀·σ/2) ψ.
Spinor<double> spatial_rotate(const Spinor<double>& psi, const Vec3d& s0, double gamma0);

// Lattice Maxwellian transform: ψ → e^{iβ}ψ and link variables
// A_k(x) → A_k(x) - (β(x+k) - β(x))/(e a); A₀ unchanged (static).
PauliField gauge_maxwell(const PauliField& field, const ScalarField& beta, double charge);
// Φ → e^{iβ}Φ and Ω± → Ω± + β on a decomposition; U, ρ, n, s unchanged.
SpinChargeFields gauge_maxwell(const SpinChargeFields& scf, const ScalarField& beta);

// U → U exp(iσ₃α/2), Φ → exp(-iσ₃α/2)Φ; recomposed ψ unchanged. Connections
// are dropped (has_connections = false) and must be recomputed.
SpinChargeFields gauge_internal(const SpinChargeFields& scf, const ScalarField& alpha);

}  // namespace spincharge
