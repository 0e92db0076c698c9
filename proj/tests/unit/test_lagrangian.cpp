#include <gtest/gtest.h>

#include <cmath>

#include "spincharge/lagrangian.hpp"

using namespace spincharge;

namespace {

double amplitude(const AnalyticFamily& f, const Point4& x) {
  const FieldSample<double> s = f.sample(Point4T<double>{x[0], x[1], x[2], x[3]});
  return std::sqrt(abs2(s.psi[0]) + abs2(s.psi[1]));
}

}  // namespace

// ψ = ρ(1,0)ᵀ, A = 0: L = μρ² + (∇ρ)²/2m. Gradient by central differences of
// the sampled amplitude, independent of the jet machinery.
TEST(PauliDensity, PureRhoMatchesFiniteDifferenceOracle) {
  const auto fam = pure_rho_family(3);
  SimulationParams p;
  p.m = 1.7;
  p.mu = 0.4;
  const double h = 1e-5;
  for (const Point4& x : {Point4{0, 0.1, -0.2, 0.3}, Point4{0, -0.6, 0.4, 0.05}}) {
    const double rho = amplitude(*fam, x);
    double grad2 = 0.0;
    for (int k = 1; k <= 3; ++k) {
      Point4 up = x, dn = x;
      up[k] += h;
      dn[k] -= h;
      const double d = (amplitude(*fam, up) - amplitude(*fam, dn)) / (2 * h);
      grad2 += d * d;
    }
    const double expect = p.mu * rho * rho + grad2 / (2 * p.m);
    EXPECT_NEAR(pauli_density(*fam, p, x), expect, 1e-8);
    EXPECT_NEAR(gg_density(*fam, p, x), expect, 1e-8);
  }
}

TEST(PauliDensity, PlaneWave) {
  const Point4 k{0.3, -0.7, 1.1, 0.25};
  const Spinor<double> chi{Cplx<double>{0.6, 0.2}, Cplx<double>{-0.3, 0.5}};
  const auto fam = plane_wave_family(k, chi);
  SimulationParams p;
  p.m = 2.0;
  p.mu = 0.9;
  const double c2 = abs2(chi[0]) + abs2(chi[1]);
  const double k2 = k[1] * k[1] + k[2] * k[2] + k[3] * k[3];
  const double expect = (p.mu - k[0]) * c2 + k2 * c2 / (2 * p.m);
  const Point4 x{0.3, 0.2, -0.1, 0.7};
  EXPECT_NEAR(pauli_density(*fam, p, x), expect, 1e-14);
  EXPECT_NEAR(gg_density(*fam, p, x), expect, 1e-14);
}

TEST(PauliDensity, ZeemanTermForSpinUp) {
  const auto fam = constant_family(Spinor<double>{Cplx<double>{1.0, 0.0}, Cplx<double>{}});
  SimulationParams p;
  p.m = 2.0;
  p.e = 0.5;
  p.g = 3.0;
  p.h_ext = {0.0, 0.0, 0.8};
  const double expect = p.g * p.e * 0.8 / (2 * p.m);
  EXPECT_NEAR(pauli_density(*fam, p, {0, 0, 0, 0}), expect, 1e-15);
  EXPECT_NEAR(gg_density(*fam, p, {0, 0, 0, 0}), expect, 1e-15);
  // quoted coefficients halve the Zeeman term
  EXPECT_NEAR(gg_density(*fam, p, {0, 0, 0, 0}, GgCoefficients::as_printed()), expect / 2, 1e-15);
}

TEST(Identity, PointwiseOnRandomFamilies) {
  const SimulationParams p{.m = 1.3, .e = 0.8, .g = 2.0, .mu = 0.2, .h_ext = {0.1, -0.2, 0.3}};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto fam = random_smooth_family(seed);
    for (const Point4& x : {Point4{0.1, 0.2, 0.3, 0.4}, Point4{-0.3, -0.5, 0.1, 0.2}, Point4{0.0, 0.0, 0.0, 0.0}}) {
      const double lp = pauli_density(*fam, p, x);
      EXPECT_NEAR(gg_density(*fam, p, x), lp, 1e-11 * (1.0 + std::abs(lp))) << seed;
    }
  }
}

TEST(Identity, IntegratedDerivedPassesAndQuotedFails) {
  const auto fam = random_smooth_family(7, {.time_dependent = false});
  const DensityReport r = verify_identity(*fam, SimulationParams{}, {.order = 10, .tolerance = 1e-8});
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.rel_diff, 1e-10);
  EXPECT_GT(r.rel_diff_as_printed, 1e-3);
  EXPECT_EQ(r.masked_points, 0u);
}

TEST(Identity, DensityIsMaxwellGaugeInvariant) {
  const auto base = random_smooth_family(4);
  const auto moved = gauge_maxwell(base, SmoothScalar::random(8, 3, 1.0, 2.0, true), 1.0);
  const SimulationParams p;
  for (const Point4& x : {Point4{0.1, 0.2, 0.3, -0.4}, Point4{-0.2, 0.5, 0.0, 0.1}}) {
    EXPECT_NEAR(pauli_density(*base, p, x), pauli_density(*moved, p, x), 1e-12);
    EXPECT_NEAR(gg_density(*base, p, x), gg_density(*moved, p, x), 1e-12);
  }
}

TEST(Identity, DensityIsInternalGaugeInvariant) {
  const auto base = random_smooth_family(5);
  const auto moved = gauge_internal(base, SmoothScalar::random(9, 3, 1.0, 2.0, true));
  const SimulationParams p;
  const Point4 x{0.1, -0.3, 0.2, 0.4};
  EXPECT_NEAR(gg_density(*base, p, x), gg_density(*moved, p, x), 1e-12);
}

TEST(Identity, LatticeErrorShrinksQuadratically) {
  const auto fam = random_smooth_family(2, {.time_dependent = false});
  const SimulationParams p;
  const DensityReport coarse = verify_identity_lattice(*fam, p, make_lattice({32, 32, 32}, 0.125, Boundary::periodic));
  const DensityReport fine = verify_identity_lattice(*fam, p, make_lattice({64, 64, 64}, 0.0625, Boundary::periodic));
  EXPECT_LT(fine.pointwise_max_diff, coarse.pointwise_max_diff);
  const double order = std::log2(coarse.abs_diff / fine.abs_diff);
  EXPECT_GT(order, 1.6);
  EXPECT_LT(order, 2.4);
}

TEST(Rotation, AboutZIsDiagonalPhase) {
  const Spinor<double> psi{Cplx<double>{0.3, 0.4}, Cplx<double>{-0.5, 0.1}};
  const double g = 0.9;
  const Spinor<double> r = spatial_rotate(psi, {0, 0, 1}, g);
  const Cplx<double> up{std::cos(g / 2), std::sin(g / 2)};
  const Cplx<double> dn{std::cos(g / 2), -std::sin(g / 2)};
  const Cplx<double> e0 = up * psi[0];
  const Cplx<double> e1 = dn * psi[1];
  EXPECT_NEAR(r[0].re, e0.re, 1e-15);
  EXPECT_NEAR(r[0].im, e0.im, 1e-15);
  EXPECT_NEAR(r[1].re, e1.re, 1e-15);
  EXPECT_NEAR(r[1].im, e1.im, 1e-15);
  // 2π is -1 on spinors
  const Spinor<double> full = spatial_rotate(psi, normalized(Vec3d{1, 2, 3}), 2 * M_PI);
  EXPECT_NEAR(full[0].re, -psi[0].re, 1e-14);
  EXPECT_NEAR(full[1].im, -psi[1].im, 1e-14);
}

TEST(LatticeGauge, MaxwellAndInternalTransformsOnDecomposition) {
  const auto fam = random_smooth_family(6, {.time_dependent = false});
  const LatticeGrid g = make_lattice({8, 8, 8}, 0.4, Boundary::periodic);
  const SampledFields s = sample_family(*fam, g);
  const SpinChargeFields scf = decompose(s.pauli, s.u);
  ScalarField beta(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) beta[i] = 0.3 * std::sin(static_cast<double>(i));

  const SpinChargeFields m = gauge_maxwell(scf, beta);
  const auto before = recompose(scf);
  const auto after = recompose(m);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Cplx<double> ph{std::cos(beta[i]), std::sin(beta[i])};
    for (int c = 0; c < 2; ++c) {
      const Cplx<double> want = ph * before[i][c];
      EXPECT_NEAR(after[i][c].re, want.re, 1e-13);
      EXPECT_NEAR(after[i][c].im, want.im, 1e-13);
    }
    for (int k = 0; k < 3; ++k) EXPECT_EQ(m.n[i][k], scf.n[i][k]);
  }

  const SpinChargeFields in = gauge_internal(scf, beta);
  EXPECT_FALSE(in.has_connections);
  const auto same = recompose(in);
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int c = 0; c < 2; ++c) {
      EXPECT_NEAR(same[i][c].re, before[i][c].re, 1e-13);
      EXPECT_NEAR(same[i][c].im, before[i][c].im, 1e-13);
    }
}
