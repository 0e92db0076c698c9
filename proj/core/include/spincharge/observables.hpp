#pragma once

// Loop observables: Wilson loops of the 't Hooft field, the Wess-Zumino
// surface action, magnetic flux in the London limit, the W decomposition
// identity and the strong-field reduction.

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spincharge/analytic.hpp"
#include "spincharge/decompose.hpp"
#include "spincharge/lattice.hpp"
#include "spincharge/topology.hpp"

namespace spincharge {

class ObservableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Link from `site` to site + direction·e_axis.
struct LatticeLink {
  Site site{};
  int axis = 0;
  int direction = 1;  // ±1
};

// Plaquette (site, normal) with the orientation convention of topology.hpp,
// times `orientation` = ±1.
struct LatticePlaquette {
  Site site{};
  int normal = 2;
  int orientation = 1;
};

struct LatticeLoop {
  std::vector<LatticeLink> links;
  std::vector<LatticePlaquette> surface;  // optional spanning surface

  // Consecutive links connect and the last returns to the first site.
  bool closed() const;
  // Oriented boundary of `surface` equals the contour link by link.
  bool surface_matches() const;
};

// Counterclockwise rectangle about +normal in the plane spanned by
// i = (normal+1)%3 and j = (normal+2)%3, lengths in sites, with its flat
// spanning surface.
LatticeLoop rectangular_loop(const Site& corner, int normal, int len_i, int len_j);

// Plain-text loop description, one entry per line, `#` comments:
//   link x y z axis direction          axis 0..2, direction ±1
//   plaquette x y z normal orientation
//   rectangle x y z normal len_i len_j (contour and flat surface)
// Throws ObservableError naming the line.
LatticeLoop parse_loop(const std::string& text);

using Phase = std::complex<double>;

// Σ over surface plaquettes of orientation × spherical area of the corners.
double wz_action(const DirectorField& n, const std::vector<LatticePlaquette>& surface);

// ∮ A_k dl_k with A_k(x) the link variable of the link x → x + e_k.
double flux_integral(const LatticeField<std::array<double, 4>>& a_mu, const LatticeLoop& loop);

// Sum over links of n·X at the link midpoint (endpoint average) times a.
double thooft_line_integral(const SpinChargeFields& scf, const LatticeLoop& loop);

struct WilsonLoop {
  Phase w_total{1.0, 0.0};    // exp(i ∫_S 𝓕)
  Phase w_maxwell{1.0, 0.0};  // exp(i e ∮ A)
  Phase w_wz{1.0, 0.0};       // exp(-i S_WZ)
  double residual = 0.0;      // |w_total - w_maxwell w_wz|

  double surface_flux = 0.0;  // ∫_S 𝓕
  double line_flux = 0.0;     // ∮ A
  double wz = 0.0;            // S_WZ
  double nx_line = 0.0;       // ∮ n·X

  // Informational: ∫_S 𝓕 = ∮ n·X - S_WZ holds for any smooth (n, X), and in
  // the vortex-free sector n·X = 2eA - 2iΦ†∂Φ turns it into ∮ 2eA.
  double abelian_residual = 0.0;  // |w_total - exp(i∮n·X) w_wz|
  double double_charge_residual = 0.0;  // |w_total - exp(2ie∮A)|
};

// Lattice backend: 𝓕 averaged over the four plaquette corners. Throws
// ObservableError when the loop has no matching surface, when connections
// are missing, or when the surface touches masked sites, Abrikosov vortex
// plaquettes or monopole cubes.
WilsonLoop wilson_loop(const SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                       const LatticeLoop& loop, const SimulationParams& params);

// Axis-aligned rectangle origin + s e_mu + t e_nu, (s, t) ∈ [0, l_mu] × [0, l_nu],
// traversed +mu, +nu, -mu, -nu.
struct RectangleLoop {
  Point4 origin{};
  int mu = 1;
  int nu = 2;
  double l_mu = 1.0;
  double l_nu = 1.0;
};

struct LoopQuadrature {
  int panels = 6;  // per side
  int order = 10;  // Gauss-Legendre nodes per panel
};

// Analytic backend: exact-jet integrands, composite Gauss-Legendre.
WilsonLoop wilson_loop(const AnalyticFamily& family, const SimulationParams& params,
                       const RectangleLoop& loop, const LoopQuadrature& quadrature = {});

// Random rectangle inside `box` in a random spatial plane, at a random time.
RectangleLoop random_rectangle(std::uint64_t seed, const SupportBox& box);

// -(2π/e)(Δ₊²N₊ + Δ₋²N₋)/(Δ₊² + Δ₋²) + spin_mixing/(2e), from squared
// condensates. Throws std::invalid_argument when both vanish.
double quantization_prediction(double charge, double delta_plus_sq, double delta_minus_sq,
                               int n_plus, int n_minus, double spin_mixing);
double quantization_prediction(const SimulationParams& params, int n_plus, int n_minus,
                               double spin_mixing);

struct LondonVortex {
  PauliField pauli;
  UnitaryField u;
  SpinChargeFields scf;  // with connections
  int n_plus = 0;
  int n_minus = 0;
  double core_radius = 0.0;
  double prediction = 0.0;  // quantization_prediction with zero mixing
  // N₊ ≠ N₋ while both condensates are nonzero: infinite-energy configuration.
  bool constraint_violated = false;
  SimulationParams params;
};

// ρ± = Δ±, Ω± = N± atan2(y, x) about the z axis through the box centre,
// U = 1, and A_k chosen so that J_k = 0 beyond `core_radius` (inside, A is
// scaled down by (r/r_c)²). A_k(x) is stored as the link integral of the
// continuum potential divided by a. core_radius <= 0 picks 2a.
LondonVortex london_vortex(const LatticeGrid& grid, int n_plus, int n_minus,
                           const SimulationParams& params, double core_radius = 0.0);

struct FluxMeasurement {
  double measured = 0.0;    // ∮ A
  double prediction = 0.0;
  double relative_error = 0.0;
  double spin_mixing = 0.0;     // ∮ n·W
  double current_circulation = 0.0;  // ∮ |J| dl, should vanish in the London regime
  double loop_radius = 0.0;     // half the shorter side, physical units
  bool london_regime = true;    // current_circulation below threshold × |prediction|
  bool constraint_violated = false;
};

FluxMeasurement measure_flux(const LondonVortex& vortex, const LatticeLoop& loop,
                             double current_threshold = 1e-2);

// Square loop of half-width `half_sites` sites centred on the vortex axis, in the
// z plane `level`.
LatticeLoop centred_square_loop(const LatticeGrid& grid, int half_sites, int level);

// W^a = -½ ε^{abc} (MᵀM')_{bc}  and  W^a = -ε^{abc} n₀^b ∂n₀^c + λ n₀^a with
// n₀ = -ẑ·M and λ = n₀·W.
struct WIdentityReport {
  double frame_residual = 0.0;     // W vs -½ε(MᵀM')
  double director_residual = 0.0;  // W vs -ε n₀ ∂n₀ + λ n₀
  // The frame form with the index order and normalization -ε^{abc} M_{bn} ∂M_{nc}.
  double literal_frame_residual = 0.0;
  double max_residual() const { return std::max(frame_residual, director_residual); }
  std::size_t points = 0;
};

WIdentityReport verify_W_identity(const SpinChargeFields& scf);
WIdentityReport verify_W_identity(const AnalyticFamily& family, const SimulationParams& params,
                                  const std::vector<Point4>& points);

// max_k |∂_k n₀ + W_k × n₀| at one point, exact jets.
double strong_field_residual(const AnalyticFamily& family, const SimulationParams& params,
                             const Point4& point);

struct StrongFieldOptions {
  int normal_axis = 2;  // H ∝ ẑ; vortices are read on plaquettes with this normal
  double tolerance = 1e-2;  // on the lattice D_k n₀ residual
};

struct StrongFieldReduction {
  DirectorField n0;
  double dn0_residual = 0.0;  // max |∂_k n₀ + W_k × n₀| (central differences)
  // 𝓕_{ij}(W, n₀) per plaquette, split into its Abrikosov and spin parts.
  ScalarField f_abrikosov;  // 2π (ρ₊² - ρ₋²)/ρ² (Σ₊ - Σ₋)
  ScalarField f_spin;       // 2π Σ^s
  ScalarField f_reduced;    // sum of the two
  ScalarField density_2d;   // reduced Lagrangian density
  VortexScan abrikosov_plus;
  VortexScan abrikosov_minus;
  VortexScan spin;
};

// Throws ObservableError when the D_k n₀ residual exceeds the tolerance or
// connections are missing.
StrongFieldReduction strong_field_reduce(const SpinChargeFields& scf,
                                         const LatticeField<std::array<double, 4>>& a_mu,
                                         const SimulationParams& params,
                                         const StrongFieldOptions& options = {});

// Reduced density at one site given the vortex densities Σ (winding/a²) on
// the plaquette with the chosen normal.
double reduced_density_2d(const SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                          const SimulationParams& params, const Site& site, int normal_axis,
                          double sigma_plus, double sigma_minus, double sigma_spin);

}  // namespace spincharge
