#pragma once

// SCF1 binary snapshots.
//
//   "SCF1" | u32 nx, ny, nz | f64 spacing | u8 boundary
//   then blocks, each an 8-byte ASCII tag followed by little-endian f64 data
//   in site order (z fastest):
//     PSI_RE__  Re ψ₊, Re ψ₋   per site
//     PSI_IM__  Im ψ₊, Im ψ₋   per site
//     A_MU____  A_0..A_3       per site
//     DIR_____  s_x, s_y, s_z  per site (spin director defining U)
//
// Blocks appear in that order; any may be absent, but PSI_RE__ and PSI_IM__
// come together.
//
// A decomposition uses the same header with its own blocks, in this order:
//   RHO_____  ρ                 RHO_PM__  ρ₊, ρ₋          OMEGA_PM  Ω₊, Ω₋
//   U_MAT___  Re,Im of U row-major (8)                    N_DIR___  n
//   S_DIR___  s                 W_MU____  W_μ^a, μ-major (12, optional)
//   J_MU____  J_0..J_3 (optional, present iff W_MU____ is)
// Φ, M, X and the masks are rebuilt on reading.

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "spincharge/decompose.hpp"
#include "spincharge/lattice.hpp"

namespace spincharge {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  LatticeGrid grid;
  std::optional<LatticeField<Spinor<double>>> psi;
  std::optional<LatticeField<std::array<double, 4>>> a_mu;
  std::optional<DirectorField> dir;

  // ψ and A (A zero when absent). Throws SnapshotError without PSI blocks.
  PauliField pauli() const;
  // U from DIR on the north section, identity when DIR is absent.
  UnitaryField frame() const;
};

void write_snapshot(std::ostream& out, const Snapshot& snap);
void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::string& path);

void write_decomposition(std::ostream& out, const SpinChargeFields& scf);
void write_decomposition(const std::string& path, const SpinChargeFields& scf);
SpinChargeFields read_decomposition(std::istream& in);
SpinChargeFields read_decomposition(const std::string& path);

// Spinor ρ (cos θ/2, e^{iφ} sin θ/2) whose Pauli direction is n (U = 1).
LatticeField<Spinor<double>> spinor_from_director(const DirectorField& n, const ScalarField& rho);

}  // namespace spincharge
