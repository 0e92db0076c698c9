#pragma once

// Topological diagnostics on director and phase fields.
//
// Plaquette convention: the plaquette (x, k) has normal axis k and spans the
// axes i = (k+1)%3, j = (k+2)%3 with corners x, x+i, x+i+j, x+j in that
// order, so its orientation is +k. The cube at x spans x .. x+(1,1,1).

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spincharge/decompose.hpp"
#include "spincharge/lattice.hpp"

namespace spincharge {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 𝓕_{μν}, μ,ν ∈ {t,x,y,z}; antisymmetric.
using Tensor4 = std::array<std::array<double, 4>, 4>;

// 𝓕_{μν} = G_{μν}·n - n·(D_μ n × D_ν n) with D_μ = ∂_μ + X_μ× and
// G_{μν} = ∂_μX_ν - ∂_νX_μ + X_μ × X_ν, from exact jets.
Tensor4 thooft_tensor(const Vec3<Jet1>& n, const std::array<Vec3<Jet1>, 4>& x);
Tensor4 thooft_tensor(const PointFields<Jet1>& fields);

// Lattice version with central differences; ∂_0 ≡ 0.
Tensor4 thooft_tensor(const DirectorField& n, const LatticeField<std::array<Vec3d, 4>>& x,
                      const Site& site);
// Throws TopologyError at masked sites or when connections are missing.
Tensor4 thooft_tensor(const SpinChargeFields& scf, const Site& site);

// Signed area of the geodesic triangle (a, b, c) on the unit sphere, in (-2π, 2π].
// `degenerate` is set when the triangle contains antipodal corners.
double solid_angle(const Vec3d& a, const Vec3d& b, const Vec3d& c, bool* degenerate = nullptr);

// Signed spherical area swept by the four corners of plaquette (x, k).
double plaquette_solid_angle(const DirectorField& n, const Site& x, int k,
                             bool* degenerate = nullptr);

// Lattice magnetic field B_k(x) = (plaquette solid angle)/a²; exactly
// divergence free away from monopole cubes.
LatticeField<Vec3d> plaquette_flux_density(const DirectorField& n);

// ---------------------------------------------------------------------------
// Hopf invariant

struct HopfResult {
  double raw = 0.0;
  long rounded = 0;
  // max |net flux| over periodic coordinate planes (must vanish).
  double max_plane_flux = 0.0;
  std::array<int, 3> box{};  // periodic box used for the spectral solve
};

struct HopfOptions {
  // Extra vacuum layers appended on each side of vacuum-padded grids before
  // the periodic embedding.
  int padding = 0;
};

// Spectral method: C = curl⁻¹ B in the transverse gauge on the periodic
// lattice, Q = (1/16π²) ∫ C·B. Throws TopologyError when a coordinate plane
// carries net flux (no periodic C exists) or a monopole is present.
HopfResult hopf_charge(const DirectorField& n, const HopfOptions& options = {});

struct LinkingResult {
  bool ok = false;
  long linking = 0;
  double raw = 0.0;
  std::size_t curves_a = 0;
  std::size_t curves_b = 0;
  std::size_t segments_a = 0;
  std::size_t segments_b = 0;
  std::string failure;
};

// Independent oracle: Gauss linking number of the preimages of two regular
// values, traced through a 6-tetrahedron subdivision of every lattice cube.
LinkingResult hopf_charge_oracle(const DirectorField& n);
LinkingResult hopf_charge_oracle(const DirectorField& n, const Vec3d& value_a,
                                 const Vec3d& value_b);

using Polyline = std::vector<Vec3d>;

// Closed preimage curves of `value` (as ordered vertex loops in lattice
// coordinates). Sets `failure` when a curve fails to close.
std::vector<Polyline> preimage_curves(const DirectorField& n, const Vec3d& value,
                                      std::string* failure = nullptr,
                                      std::size_t* segment_count = nullptr);

// Gauss linking number of two closed polygons (exact segment-pair solid angles).
double gauss_linking(const std::vector<Polyline>& a, const std::vector<Polyline>& b);

// ---------------------------------------------------------------------------
// Vortices and monopoles

enum class VortexComponent : std::uint8_t { plus, minus, spin };

struct VortexPlaquette {
  std::size_t site = 0;  // plaquette base site
  int normal = 0;        // normal axis k
  VortexComponent component = VortexComponent::plus;
  int winding = 0;
};

struct VortexScan {
  std::vector<VortexPlaquette> vortices;
  std::size_t skipped = 0;   // plaquettes touching masked / undefined sites
  std::size_t examined = 0;
};

// Reduce a phase difference into (-π, π].
double branch_reduce(double dphi);

// Winding (1/2π)Σ branch-reduced differences around every plaquette.
// `mask`/`mask_bit` mark sites where the phase is undefined.
VortexScan detect_phase_vortices(const ScalarField& phase, VortexComponent component,
                                 const LatticeField<std::uint8_t>* mask = nullptr,
                                 std::uint8_t mask_bit = 0);
// Both condensate phases of a decomposition.
VortexScan detect_phase_vortices(const SpinChargeFields& scf);

// Windings of ω = arg(s₁ + i s₂) on plaquettes with the given normal axis.
// Plaquettes with a corner where |s₁ + i s₂| < 1e-8 are skipped.
VortexScan detect_spin_vortices(const DirectorField& s, int normal_axis = 2);

// Net winding of `phase` around the rectangle [lo, hi] in the (i, j) plane at
// fixed coordinate `level` along the remaining axis, traversed counterclockwise.
int contour_winding(const ScalarField& phase, int normal_axis, std::array<int, 2> lo,
                    std::array<int, 2> hi, int level);

// Boundary of a vortex set: for every dual link, the balance of windings on
// plaquettes sharing that link. Zero everywhere for a closed vortex network.
long vortex_boundary_defect(const VortexScan& scan, const LatticeGrid& grid);

struct MonopoleCube {
  Site cube{};  // base corner; may be -1 on the ghost shell of padded grids
  int charge = 0;
  double flux = 0.0;  // Σ face solid angles (4π × charge up to rounding)
};

struct MonopoleScan {
  std::vector<MonopoleCube> monopoles;
  std::size_t degenerate_faces = 0;
  long total_charge = 0;
};

MonopoleScan detect_monopoles(const DirectorField& n);

// 't Hooft flux (solid-angle sum, outward) through the surface of the box of
// cubes [lo, hi) (site coordinates).
double box_surface_flux(const DirectorField& n, const Site& lo, const Site& hi);

struct DefectReport {
  std::vector<VortexPlaquette> vortex_plaquettes;
  std::vector<MonopoleCube> monopole_cubes;
  long hopf_charge = 0;
  double raw_hopf = 0.0;
  bool hopf_valid = false;
  std::string hopf_failure;
  std::size_t skipped_plaquettes = 0;
  std::size_t degenerate_faces = 0;
};

DefectReport detect_defects(const SpinChargeFields& scf);

}  // namespace spincharge
