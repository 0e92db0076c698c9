#pragma once

// Run configuration: flat `key = value` text, `#` starts a comment.
//
// `grid` is the only required key (it may also come from an override, i.e. the
// command line), except where no lattice is built: detect and observables read
// it from the snapshot and analytic verify-identity has no grid.
// Everything else has a default.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spincharge/lattice.hpp"

namespace spincharge {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& message)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  // 0 for overrides and whole-config checks.
  int line() const { return line_; }

 private:
  int line_;
};

enum class Backend : std::uint8_t { lattice, analytic };

struct Tolerances {
  double identity = 1e-8;      // relative, integrated Lagrangians
  double round_trip = 1e-12;   // recompose(decompose(ψ))
  double gauge = 1e-10;
  double hopf = 0.05;          // |raw - p·q|
  double virial = 0.05;        // |E2/E4 - 1|
  double gradient = 1e-4;      // relaxation stop
  double monopole_flux = 1e-6;
  double flux = 0.01;          // relative, London flux
  double wilson = 1e-6;
  double strong_field = 1e-8;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct RunConfig {
  std::string subcommand = "suite";
  std::string suite = "identity";

  std::array<int, 3> grid{0, 0, 0};
  double spacing = 0.25;
  Boundary boundary = Boundary::periodic;
  SimulationParams params;

  // The one generator seed; every random family derives from it.
  std::uint64_t seed = 1;
  Backend backend = Backend::analytic;
  Tolerances tol;

  std::string out = ".";
  std::string snapshot;
  std::string loop;

  // identity
  std::string family = "random";
  int seeds = 10;
  int quadrature_order = 12;

  // relaxation / Hopf ansatz
  int p = 1;
  int q = 1;
  double scale = 4.5;
  int max_steps = 5000;
  double step = 0.05;
  int hopf_every = 10;
  int snapshot_every = 0;
  bool relax_rho = false;

  // London vortex
  int n_plus = 1;
  int n_minus = 1;
  double core_radius = 0.0;

  LatticeGrid lattice() const { return make_lattice(grid, spacing, boundary); }

  friend bool operator==(const RunConfig& a, const RunConfig& b);
};

// `key=value` strings applied after the text, e.g. from command-line flags.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

// Throws ConfigError on unknown keys, malformed values, a missing grid and
// failed validation; text errors carry their line number.
RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});

// Every key, one per line, doubles at round-trip precision.
std::string serialize(const RunConfig& config);

bool grid_required(const RunConfig& config);

// Throws ConfigError (line 0).
void validate(const RunConfig& config);

std::string to_string(Backend b);

}  // namespace spincharge
