#pragma once

// Faddeev energy of a director field n with background amplitude ρ:
//
//   E = ∫ (1/2m)(∂ρ)² + (ρ²/8m)(∂_k n)² + (1/16e²)(n·∂_i n × ∂_j n)² + (geρ²/4m) H·n
//
// discretised on forward links. (∂_k n)² a² is taken as the squared geodesic
// angle between neighbours, not the chord |Δn|². The quartic density is summed over
// ordered pairs (i, j) with F_ij = Ω_ij/a², Ω_ij the spherical area spanned by
// the plaquette corners. Unlike n·(n(x+i) × n(x+j)) this does not saturate
// when neighbours are far apart, so solitons cannot shrink through the lattice.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spincharge/lattice.hpp"

namespace spincharge {

struct FaddeevConfig {
  DirectorField n;
  ScalarField rho;
  SimulationParams params;

  // Constant ρ background on the grid of n.
  static FaddeevConfig with_constant_rho(DirectorField n, double rho, SimulationParams params);
};

struct FaddeevEnergy {
  double total = 0.0;
  double e2 = 0.0;
  double e4 = 0.0;
  double zeeman = 0.0;
  double rho = 0.0;
};

FaddeevEnergy faddeev_energy(const FaddeevConfig& config);

// ∂E/∂n(x) projected onto the tangent plane at n(x). Per-site derivative of
// the discrete energy (a functional derivative times a³).
Vec3Field faddeev_gradient(const FaddeevConfig& config);

// ∂E/∂ρ(x) of the discrete energy.
ScalarField faddeev_rho_gradient(const FaddeevConfig& config);

// L2 norm of the functional derivative: sqrt(Σ_x |g(x)|² / a³).
double gradient_norm(const Vec3Field& gradient);

struct RelaxSchedule {
  int max_steps = 5000;
  double initial_step = 0.05;  // applied to the functional derivative g/a³
  double tolerance = 1e-4;     // on gradient_norm
  int hopf_every = 10;
  int max_backtracks = 60;
  bool barzilai_borwein = true;
  bool relax_rho = false;
};

enum class Termination : std::uint8_t { converged, max_steps, charge_jump, stalled };

std::string to_string(Termination t);

struct TraceRecord {
  int step = 0;
  double energy = 0.0;
  double e2 = 0.0;
  double e4 = 0.0;
  double gradient_norm = 0.0;
  double step_size = 0.0;
  std::optional<long> hopf;
};

struct RelaxationResult {
  FaddeevConfig final_config;
  std::vector<double> energy_trace;  // accepted steps, starting with the initial energy
  std::vector<long> hopf_trace;
  std::vector<TraceRecord> trace;
  FaddeevEnergy final_energy;
  double virial_ratio = 0.0;  // E2/E4
  double final_gradient_norm = 0.0;
  Termination termination = Termination::max_steps;
  int accepted_steps = 0;
  int rejected_trials = 0;
};

// Called after every accepted step with the current configuration.
using RelaxObserver = std::function<void(const TraceRecord&, const FaddeevConfig&)>;

RelaxationResult relax(FaddeevConfig initial, const RelaxSchedule& schedule,
                       const RelaxObserver& observer = {});

// Unit field from the rational map W = Z₁^p / Z₀^q with
//   Z₁ = (x + iy)/r · sin f(r),  Z₀ = cos f(r) - i (z/r) sin f(r),
//   f(r) = π (1 - r/R)² for r < R and 0 beyond, R = scale;
// n = (2 Re W, 2 Im W, 1 - |W|²)/(1 + |W|²). Equals ẑ for r ≥ R; Hopf charge p·q.
DirectorField toroidal_ansatz(int p, int q, double scale, const LatticeGrid& grid);

// Reflection z → -z of the site pattern (orientation reversal).
DirectorField mirror_z(const DirectorField& n);

}  // namespace spincharge
