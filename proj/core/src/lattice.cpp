#include "spincharge/lattice.hpp"

#include <cmath>
#include <string>

namespace spincharge {

LatticeGrid::LatticeGrid(std::array<int, 3> dims, double spacing, Boundary boundary)
    : dims_(dims), spacing_(spacing), boundary_(boundary) {
  for (int d : dims) {
    if (d < 4) throw LatticeError("lattice dimension must be >= 4, got " + std::to_string(d));
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw LatticeError("lattice spacing must be positive");
  }
}

LatticeGrid make_lattice(std::array<int, 3> dims, double spacing, Boundary boundary) {
  return LatticeGrid(dims, spacing, boundary);
}

std::size_t LatticeGrid::ghost_count() const {
  if (boundary_ == Boundary::periodic) return 0;
  std::size_t padded = 1;
  for (int d : dims_) padded *= static_cast<std::size_t>(d + 2);
  return padded - size();
}

Site LatticeGrid::site(std::size_t index) const {
  Site s;
  s[2] = static_cast<int>(index % dims_[2]);
  index /= dims_[2];
  s[1] = static_cast<int>(index % dims_[1]);
  s[0] = static_cast<int>(index / dims_[1]);
  return s;
}

Site LatticeGrid::wrap(Site s) const {
  if (boundary_ == Boundary::periodic) {
    for (int a = 0; a < 3; ++a) {
      s[a] %= dims_[a];
      if (s[a] < 0) s[a] += dims_[a];
    }
  }
  return s;
}

Vec3d LatticeGrid::position(const Site& s) const {
  return {coordinate(0, s[0]), coordinate(1, s[1]), coordinate(2, s[2])};
}

double DirectorField::max_norm_defect() const {
  double worst = 0.0;
  for (const auto& v : values()) worst = std::max(worst, std::abs(norm(v) - 1.0));
  return worst;
}

void DirectorField::normalize() {
  for (auto& v : values()) v = normalized(v);
}

bool PauliField::all_finite() const {
  for (const auto& sp : psi.values()) {
    for (const auto& c : sp) {
      if (!std::isfinite(c.re) || !std::isfinite(c.im)) return false;
    }
  }
  for (const auto& a : a_mu.values()) {
    for (double v : a) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void SimulationParams::validate() const {
  if (!(m > 0.0)) throw std::invalid_argument("m must be > 0");
  if (!(e > 0.0)) throw std::invalid_argument("e must be > 0");
  if (delta_plus < 0.0 || delta_minus < 0.0) {
    throw std::invalid_argument("condensate amplitudes must be >= 0");
  }
}

namespace {

template <class V, class Sub, class Scale>
V central_difference(const LatticeField<V>& f, const Site& s, int axis, Sub sub, Scale scale) {
  const LatticeGrid& g = f.grid();
  const V& fwd = f.at(g.shifted(s, axis, +1));
  const V& bwd = f.at(g.shifted(s, axis, -1));
  return scale(sub(fwd, bwd), 0.5 / g.spacing());
}

}  // namespace

double central_derivative(const ScalarField& f, const Site& s, int axis) {
  return central_difference(
      f, s, axis, [](double a, double b) { return a - b; },
      [](double v, double k) { return v * k; });
}

Vec3d central_derivative(const LatticeField<Vec3d>& f, const Site& s, int axis) {
  return central_difference(
      f, s, axis, [](const Vec3d& a, const Vec3d& b) { return a - b; },
      [](const Vec3d& v, double k) { return v * k; });
}

Spinor<double> central_derivative(const LatticeField<Spinor<double>>& f, const Site& s, int axis) {
  return central_difference(
      f, s, axis, [](const Spinor<double>& a, const Spinor<double>& b) { return a - b; },
      [](const Spinor<double>& v, double k) { return scale(v, k); });
}

Mat2<double> central_derivative(const LatticeField<Mat2<double>>& f, const Site& s, int axis) {
  return central_difference(
      f, s, axis, [](const Mat2<double>& a, const Mat2<double>& b) { return a - b; },
      [](const Mat2<double>& v, double k) { return scale(v, k); });
}

}  // namespace spincharge
