#include <gtest/gtest.h>

#include <cmath>

#include "spincharge/faddeev.hpp"
#include "spincharge/topology.hpp"

using namespace spincharge;

namespace {

Polyline circle(const Vec3d& centre, const Vec3d& e1, const Vec3d& e2, int n) {
  Polyline p;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * M_PI * i / n;
    p.push_back(centre + e1 * std::cos(t) + e2 * std::sin(t));
  }
  return p;
}

ScalarField azimuth(const LatticeGrid& g) {
  ScalarField f(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3d x = g.position(g.site(i));
    f[i] = std::atan2(x[1], x[0]);
  }
  return f;
}

}  // namespace

TEST(SolidAngle, Octant) {
  EXPECT_NEAR(solid_angle({1, 0, 0}, {0, 1, 0}, {0, 0, 1}), M_PI / 2, 1e-15);
  EXPECT_NEAR(solid_angle({1, 0, 0}, {0, 0, 1}, {0, 1, 0}), -M_PI / 2, 1e-15);
  EXPECT_NEAR(solid_angle({1, 0, 0}, {1, 0, 0}, {0, 1, 0}), 0.0, 1e-15);
}

TEST(SolidAngle, FlagsAntipodalCorners) {
  bool degenerate = false;
  solid_angle({0, 0, 1}, {0, 0, -1}, {1, 0, 0}, &degenerate);
  EXPECT_TRUE(degenerate);
}

TEST(GaussLinking, HopfLinkAndUnlinkedCircles) {
  const Polyline a = circle({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, 120);
  const Polyline b = circle({1, 0, 0}, {1, 0, 0}, {0, 0, 1}, 120);
  const Polyline far = circle({3, 0, 0}, {1, 0, 0}, {0, 0, 1}, 120);
  const double l = gauss_linking({a}, {b});
  EXPECT_NEAR(std::abs(l), 1.0, 1e-9);
  // orientation reversal flips the sign
  const Polyline rb(b.rbegin(), b.rend());
  EXPECT_NEAR(gauss_linking({a}, {rb}), -l, 1e-9);
  EXPECT_NEAR(gauss_linking({a}, {far}), 0.0, 1e-9);
}

TEST(Monopole, HedgehogCarriesUnitCharge) {
  const LatticeGrid g = make_lattice({8, 8, 8}, 0.5, Boundary::vacuum_padded);
  DirectorField n(g);
  for (std::size_t i = 0; i < g.size(); ++i) n[i] = normalized(g.position(g.site(i)));
  const MonopoleScan s = detect_monopoles(n);
  int interior = 0;
  for (const MonopoleCube& m : s.monopoles) {
    if (g.contains(m.cube) && g.contains(Site{m.cube[0] + 1, m.cube[1] + 1, m.cube[2] + 1})) {
      EXPECT_EQ(m.cube, (Site{3, 3, 3}));
      EXPECT_EQ(m.charge, 1);
      EXPECT_NEAR(m.flux, 4 * M_PI, 1e-9);
      ++interior;
    }
  }
  EXPECT_EQ(interior, 1);
  EXPECT_NEAR(box_surface_flux(n, {0, 0, 0}, {7, 7, 7}), 4 * M_PI, 1e-9);
  EXPECT_NEAR(box_surface_flux(n, {4, 4, 4}, {7, 7, 7}), 0.0, 1e-9);
}

TEST(Monopole, SmoothFieldHasNone) {
  const LatticeGrid g = make_lattice({16, 16, 16}, 0.25, Boundary::vacuum_padded);
  const DirectorField n = toroidal_ansatz(1, 1, 1.6, g);
  const MonopoleScan s = detect_monopoles(n);
  EXPECT_TRUE(s.monopoles.empty());
  EXPECT_EQ(s.total_charge, 0);
}

TEST(Vortex, PhaseWindingAboutAxis) {
  const LatticeGrid g = make_lattice({8, 8, 4}, 0.5, Boundary::periodic);
  const ScalarField phase = azimuth(g);
  const VortexScan scan = detect_phase_vortices(phase, VortexComponent::plus);
  int centre = 0;
  for (const VortexPlaquette& v : scan.vortices) {
    const Site s = g.site(v.site);
    if (v.normal == 2 && s[0] == 3 && s[1] == 3) {
      EXPECT_EQ(v.winding, 1);
      ++centre;
    }
  }
  EXPECT_EQ(centre, 4);
  EXPECT_EQ(vortex_boundary_defect(scan, g), 0);

  EXPECT_EQ(contour_winding(phase, 2, {1, 1}, {6, 6}, 0), 1);
  EXPECT_EQ(contour_winding(phase, 2, {4, 4}, {7, 7}, 2), 0);
}

TEST(Vortex, MaskedSitesAreSkipped) {
  const LatticeGrid g = make_lattice({4, 4, 4}, 1.0, Boundary::periodic);
  const ScalarField phase = azimuth(g);
  LatticeField<std::uint8_t> mask(g, 0);
  mask[g.index({1, 1, 0})] = kMaskPlus;
  const VortexScan masked = detect_phase_vortices(phase, VortexComponent::plus, &mask, kMaskPlus);
  const VortexScan all = detect_phase_vortices(phase, VortexComponent::plus);
  EXPECT_GT(masked.skipped, 0u);
  EXPECT_EQ(all.skipped, 0u);
}

TEST(Vortex, SpinVortex) {
  const LatticeGrid g = make_lattice({8, 8, 4}, 0.5, Boundary::periodic);
  DirectorField s(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3d x = g.position(g.site(i));
    const double phi = std::atan2(x[1], x[0]);
    s[i] = {0.8 * std::cos(phi), 0.8 * std::sin(phi), 0.6};
  }
  const VortexScan scan = detect_spin_vortices(s);
  int centre = 0;
  for (const VortexPlaquette& v : scan.vortices) {
    EXPECT_EQ(v.component, VortexComponent::spin);
    const Site b = g.site(v.site);
    if (b[0] == 3 && b[1] == 3) {
      EXPECT_EQ(v.winding, 1);
      ++centre;
    }
  }
  EXPECT_EQ(centre, 4);
}

TEST(Vortex, BranchReduce) {
  EXPECT_NEAR(branch_reduce(1.5 * M_PI), -0.5 * M_PI, 1e-15);
  EXPECT_NEAR(branch_reduce(-M_PI), M_PI, 1e-15);
  EXPECT_NEAR(branch_reduce(0.3), 0.3, 1e-15);
}

TEST(Hopf, UniformFieldIsTrivial) {
  const LatticeGrid g = make_lattice({12, 12, 12}, 0.5, Boundary::periodic);
  DirectorField n(g);
  const HopfResult h = hopf_charge(n);
  EXPECT_NEAR(h.raw, 0.0, 1e-12);
  EXPECT_EQ(h.rounded, 0);
}

TEST(Hopf, AnsatzChargeAndMirror) {
  const LatticeGrid g = make_lattice({32, 32, 32}, 0.35, Boundary::vacuum_padded);
  const DirectorField n = toroidal_ansatz(1, 1, 4.5, g);
  const HopfResult h = hopf_charge(n);
  EXPECT_NEAR(h.raw, 1.0, 0.05);
  EXPECT_EQ(h.rounded, 1);
  EXPECT_LT(h.max_plane_flux, 1e-9);

  const LinkingResult l = hopf_charge_oracle(n);
  ASSERT_TRUE(l.ok) << l.failure;
  EXPECT_EQ(l.linking, 1);

  const DirectorField m = mirror_z(n);
  EXPECT_EQ(hopf_charge(m).rounded, -1);
  EXPECT_EQ(hopf_charge_oracle(m).linking, -1);
}

TEST(Hopf, HigherCharge) {
  const LatticeGrid g = make_lattice({32, 32, 32}, 0.35, Boundary::vacuum_padded);
  const DirectorField n = toroidal_ansatz(1, 2, 4.5, g);
  EXPECT_EQ(hopf_charge(n).rounded, 2);
  EXPECT_EQ(hopf_charge_oracle(n).linking, 2);
}

TEST(FluxDensity, DivergenceFreeForSmoothField) {
  const LatticeGrid g = make_lattice({16, 16, 16}, 0.25, Boundary::periodic);
  const DirectorField n = toroidal_ansatz(1, 1, 1.8, g);
  const LatticeField<Vec3d> b = plaquette_flux_density(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Site s = g.site(i);
    double div = 0.0;
    for (int k = 0; k < 3; ++k) div += b.at(g.shifted(s, k, 1))[k] - b[i][k];
    worst = std::max(worst, std::abs(div));
  }
  EXPECT_LT(worst, 1e-10);
}
