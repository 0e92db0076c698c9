#include <gtest/gtest.h>

#include <cmath>

#include "spincharge/faddeev.hpp"

using namespace spincharge;

TEST(Energy, UniformFieldHasNoGradientEnergy) {
  const LatticeGrid g = make_lattice({6, 6, 6}, 0.5, Boundary::periodic);
  const FaddeevConfig c = FaddeevConfig::with_constant_rho(DirectorField(g), 1.0, SimulationParams{});
  const FaddeevEnergy e = faddeev_energy(c);
  EXPECT_EQ(e.total, 0.0);
  EXPECT_EQ(gradient_norm(faddeev_gradient(c)), 0.0);
}

TEST(Energy, ZeemanFavoursAntiAlignedDirector) {
  const LatticeGrid g = make_lattice({4, 4, 4}, 0.5, Boundary::periodic);
  SimulationParams p;
  p.g = 2.0;
  p.e = 1.5;
  p.m = 0.5;
  p.h_ext = {0.0, 0.0, 0.7};
  DirectorField up(g), down(g);
  for (std::size_t i = 0; i < g.size(); ++i) down[i] = {0.0, 0.0, -1.0};
  const double rho = 1.2;
  const double up_e = faddeev_energy(FaddeevConfig::with_constant_rho(up, rho, p)).zeeman;
  const double down_e = faddeev_energy(FaddeevConfig::with_constant_rho(down, rho, p)).zeeman;
  // (geρ²/4m) h per unit volume
  const double volume = static_cast<double>(g.size()) * 0.125;
  EXPECT_NEAR(up_e, p.g * p.e * rho * rho * 0.7 / (4 * p.m) * volume, 1e-12);
  EXPECT_NEAR(down_e, -up_e, 1e-12);
}

TEST(Energy, GradientMatchesDirectionalDerivative) {
  const LatticeGrid g = make_lattice({8, 8, 8}, 0.5, Boundary::vacuum_padded);
  SimulationParams p;
  p.h_ext = {0.1, 0.0, 0.2};
  const FaddeevConfig c = FaddeevConfig::with_constant_rho(toroidal_ansatz(1, 1, 1.8, g), 1.0, p);
  const Vec3Field grad = faddeev_gradient(c);
  const double h = 1e-6;
  for (std::size_t i : {std::size_t{73}, std::size_t{219}, std::size_t{300}, std::size_t{455}}) {
    const Vec3d n = c.n[i];
    EXPECT_NEAR(dot(grad[i], n), 0.0, 1e-12);
    const Vec3d t = normalized(cross(n, Vec3d{0.3, -0.5, 0.8}));
    FaddeevConfig plus = c, minus = c;
    plus.n[i] = normalized(n + t * h);
    minus.n[i] = normalized(n - t * h);
    const double fd = (faddeev_energy(plus).total - faddeev_energy(minus).total) / (2 * h);
    EXPECT_NEAR(dot(grad[i], t), fd, 1e-6 * (1.0 + std::abs(fd))) << i;
  }
}

TEST(Energy, RhoGradientMatchesFiniteDifference) {
  const LatticeGrid g = make_lattice({6, 6, 6}, 0.5, Boundary::periodic);
  FaddeevConfig c = FaddeevConfig::with_constant_rho(toroidal_ansatz(1, 1, 1.4, g), 1.0, SimulationParams{});
  for (std::size_t i = 0; i < g.size(); ++i) c.rho[i] = 1.0 + 0.1 * std::sin(0.7 * static_cast<double>(i));
  const ScalarField grad = faddeev_rho_gradient(c);
  const double h = 1e-6;
  for (std::size_t i : {std::size_t{5}, std::size_t{100}, std::size_t{150}}) {
    FaddeevConfig plus = c, minus = c;
    plus.rho[i] += h;
    minus.rho[i] -= h;
    const double fd = (faddeev_energy(plus).total - faddeev_energy(minus).total) / (2 * h);
    EXPECT_NEAR(grad[i], fd, 1e-6 * (1.0 + std::abs(fd)));
  }
}

TEST(Ansatz, UnitVacuumOutsideRadius) {
  const LatticeGrid g = make_lattice({12, 12, 12}, 0.5, Boundary::vacuum_padded);
  const double scale = 2.0;
  const DirectorField n = toroidal_ansatz(2, 1, scale, g);
  EXPECT_LT(n.max_norm_defect(), 1e-14);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3d x = g.position(g.site(i));
    if (norm(x) >= scale) {
      EXPECT_EQ(n[i][0], 0.0);
      EXPECT_EQ(n[i][1], 0.0);
      EXPECT_EQ(n[i][2], 1.0);
    }
  }
}

TEST(Ansatz, MirrorIsAnInvolution) {
  const LatticeGrid g = make_lattice({6, 6, 6}, 0.5, Boundary::periodic);
  const DirectorField n = toroidal_ansatz(1, 1, 1.4, g);
  const DirectorField back = mirror_z(mirror_z(n));
  for (std::size_t i = 0; i < g.size(); ++i)
    for (int k = 0; k < 3; ++k) EXPECT_EQ(back[i][k], n[i][k]);
}

TEST(Ansatz, FrozenEnergy) {
  const LatticeGrid g = make_lattice({24, 24, 24}, 0.35, Boundary::vacuum_padded);
  const FaddeevConfig c = FaddeevConfig::with_constant_rho(toroidal_ansatz(1, 1, 3.0, g), 1.0, SimulationParams{});
  const FaddeevEnergy e = faddeev_energy(c);
  EXPECT_NEAR(e.total / 76.29599281649 - 1.0, 0.0, 1e-10);
  EXPECT_NEAR(e.total, e.e2 + e.e4, 1e-10);
}

TEST(Relax, ShortRunIsMonotoneAndKeepsCharge) {
  const LatticeGrid g = make_lattice({16, 16, 16}, 0.5, Boundary::vacuum_padded);
  const FaddeevConfig c = FaddeevConfig::with_constant_rho(toroidal_ansatz(1, 1, 3.0, g), 1.0, SimulationParams{});
  RelaxSchedule s;
  s.max_steps = 40;
  s.hopf_every = 20;
  int calls = 0;
  const RelaxationResult r = relax(c, s, [&](const TraceRecord&, const FaddeevConfig&) { ++calls; });
  ASSERT_GE(r.energy_trace.size(), 2u);
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i) EXPECT_LE(r.energy_trace[i], r.energy_trace[i - 1]);
  EXPECT_EQ(calls, r.accepted_steps);
  EXPECT_EQ(r.termination, Termination::max_steps);
  for (long h : r.hopf_trace) EXPECT_EQ(h, 1);
  EXPECT_LT(r.final_config.n.max_norm_defect(), 1e-12);
  EXPECT_NEAR(r.virial_ratio, r.final_energy.e2 / r.final_energy.e4, 1e-12);
}

TEST(Relax, UniformFieldConvergesImmediately) {
  const LatticeGrid g = make_lattice({4, 4, 4}, 0.5, Boundary::periodic);
  const RelaxationResult r = relax(FaddeevConfig::with_constant_rho(DirectorField(g), 1.0, SimulationParams{}), RelaxSchedule{});
  EXPECT_EQ(r.termination, Termination::converged);
  EXPECT_EQ(r.accepted_steps, 0);
}
