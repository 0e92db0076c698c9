#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spincharge/algebra.hpp"

namespace spincharge {

enum class Boundary : std::uint8_t { periodic = 0, vacuum_padded = 1 };

using Site = std::array<int, 3>;

class LatticeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// 3D lattice with lattice constant `spacing`. Sites are stored site-major with
// z fastest. Physical coordinates are centred on the origin.
class LatticeGrid {
 public:
  LatticeGrid() = default;
  LatticeGrid(std::array<int, 3> dims, double spacing, Boundary boundary);

  const std::array<int, 3>& dims() const { return dims_; }
  int dim(int axis) const { return dims_[axis]; }
  double spacing() const { return spacing_; }
  Boundary boundary() const { return boundary_; }

  std::size_t size() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  // Number of ghost sites on the one-site vacuum shell (0 when periodic).
  std::size_t ghost_count() const;

  std::size_t index(const Site& s) const {
    return (static_cast<std::size_t>(s[0]) * dims_[1] + s[1]) * dims_[2] + s[2];
  }
  Site site(std::size_t index) const;
  bool contains(const Site& s) const {
    return s[0] >= 0 && s[0] < dims_[0] && s[1] >= 0 && s[1] < dims_[1] && s[2] >= 0 &&
           s[2] < dims_[2];
  }
  // Wraps periodic coordinates; vacuum-padded sites are returned unchanged.
  Site wrap(Site s) const;
  // Neighbour `steps` along `axis`; may leave the grid on vacuum-padded lattices.
  Site shifted(Site s, int axis, int steps) const {
    s[axis] += steps;
    return wrap(s);
  }

  Vec3d position(const Site& s) const;
  double coordinate(int axis, double lattice_coord) const {
    return (lattice_coord - 0.5 * (dims_[axis] - 1)) * spacing_;
  }
  double volume_element() const { return spacing_ * spacing_ * spacing_; }

  friend bool operator==(const LatticeGrid& a, const LatticeGrid& b) {
    return a.dims_ == b.dims_ && a.spacing_ == b.spacing_ && a.boundary_ == b.boundary_;
  }

 private:
  std::array<int, 3> dims_{4, 4, 4};
  double spacing_ = 1.0;
  Boundary boundary_ = Boundary::periodic;
};

LatticeGrid make_lattice(std::array<int, 3> dims, double spacing, Boundary boundary);

// Per-site storage with a fixed vacuum value seen outside vacuum-padded grids.
template <class V>
class LatticeField {
 public:
  LatticeField() = default;
  LatticeField(LatticeGrid grid, V vacuum)
      : grid_(grid), vacuum_(vacuum), data_(grid.size(), vacuum) {}

  const LatticeGrid& grid() const { return grid_; }
  const V& vacuum() const { return vacuum_; }

  V& operator[](std::size_t i) { return data_[i]; }
  const V& operator[](std::size_t i) const { return data_[i]; }
  V& at(const Site& s) { return data_[grid_.index(s)]; }
  // Boundary-aware lookup: wraps on periodic grids, returns the vacuum value
  // outside vacuum-padded grids.
  const V& at(const Site& s) const {
    const Site w = grid_.wrap(s);
    return grid_.contains(w) ? data_[grid_.index(w)] : vacuum_;
  }

  std::size_t size() const { return data_.size(); }
  std::vector<V>& values() { return data_; }
  const std::vector<V>& values() const { return data_; }

 private:
  LatticeGrid grid_;
  V vacuum_{};
  std::vector<V> data_;
};

using ScalarField = LatticeField<double>;
using Vec3Field = LatticeField<Vec3d>;

// Unit three-vector field (houses both n and s).
class DirectorField : public LatticeField<Vec3d> {
 public:
  DirectorField() = default;
  explicit DirectorField(LatticeGrid grid, Vec3d vacuum = {0.0, 0.0, 1.0})
      : LatticeField<Vec3d>(grid, vacuum) {}

  // max_x | |v(x)| - 1 |
  double max_norm_defect() const;
  void normalize();
};

struct PauliField {
  LatticeField<Spinor<double>> psi;
  LatticeField<std::array<double, 4>> a_mu;

  PauliField() = default;
  explicit PauliField(LatticeGrid grid)
      : psi(grid, Spinor<double>{}), a_mu(grid, std::array<double, 4>{}) {}

  const LatticeGrid& grid() const { return psi.grid(); }
  bool all_finite() const;
};

struct SimulationParams {
  double m = 1.0;
  double e = 1.0;
  double g = 1.0;
  double mu = 0.0;
  Vec3d h_ext{0.0, 0.0, 0.0};
  double delta_plus = 1.0;
  double delta_minus = 1.0;

  // Throws std::invalid_argument when m <= 0, e <= 0 or a condensate is negative.
  void validate() const;
};

// Central difference (f(x+a e) - f(x-a e)) / 2a along spatial axis 0..2.
double central_derivative(const ScalarField& f, const Site& s, int axis);
Vec3d central_derivative(const LatticeField<Vec3d>& f, const Site& s, int axis);
Spinor<double> central_derivative(const LatticeField<Spinor<double>>& f, const Site& s, int axis);
Mat2<double> central_derivative(const LatticeField<Mat2<double>>& f, const Site& s, int axis);

}  // namespace spincharge
