#include <gtest/gtest.h>

#include <cmath>

#include "spincharge/lagrangian.hpp"
#include "spincharge/observables.hpp"

using namespace spincharge;

TEST(Quantization, PredictionArithmetic) {
  EXPECT_DOUBLE_EQ(quantization_prediction(1.0, 0.5, 0.5, 1, 1, 0.0), -2 * M_PI);
  EXPECT_DOUBLE_EQ(quantization_prediction(2.0, 1.0, 0.0, 3, 7, 0.0), -3 * M_PI);
  // mixing enters as ∮n·W / 2e
  EXPECT_DOUBLE_EQ(quantization_prediction(2.0, 1.0, 1.0, 0, 0, 0.8), 0.2);
  EXPECT_THROW(quantization_prediction(1.0, 0.0, 0.0, 1, 1, 0.0), std::invalid_argument);

  SimulationParams p;
  p.delta_plus = 0.8;
  p.delta_minus = 0.6;
  // squared condensates 0.64 and 0.36
  EXPECT_NEAR(quantization_prediction(p, 1, 0, 0.0), -2 * M_PI * 0.64, 1e-15);
}

TEST(Loop, RectangleIsClosedWithMatchingSurface) {
  LatticeLoop loop = rectangular_loop({1, 2, 0}, 2, 3, 2);
  EXPECT_EQ(loop.links.size(), 10u);
  EXPECT_EQ(loop.surface.size(), 6u);
  EXPECT_TRUE(loop.closed());
  EXPECT_TRUE(loop.surface_matches());
  loop.surface.pop_back();
  EXPECT_FALSE(loop.surface_matches());
  loop = rectangular_loop({1, 2, 0}, 2, 3, 2);
  loop.links.pop_back();
  EXPECT_FALSE(loop.closed());
}

TEST(Loop, ParseText) {
  const LatticeLoop r = parse_loop("# square\nrectangle 0 0 1 0 2 2\n");
  EXPECT_TRUE(r.closed());
  EXPECT_TRUE(r.surface_matches());

  const LatticeLoop l = parse_loop(
      "link 0 0 0 0 1\nlink 1 0 0 1 1\nlink 1 1 0 0 -1\nlink 0 1 0 1 -1\nplaquette 0 0 0 2 1\n");
  EXPECT_TRUE(l.closed());
  EXPECT_TRUE(l.surface_matches());
  const LatticeLoop flipped = parse_loop(
      "link 0 0 0 0 1\nlink 1 0 0 1 1\nlink 1 1 0 0 -1\nlink 0 1 0 1 -1\nplaquette 0 0 0 2 -1\n");
  EXPECT_FALSE(flipped.surface_matches());
}

TEST(Loop, ParseErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      parse_loop(text);
    } catch (const ObservableError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("link 0 0 0 0 1\nbogus 1 2 3\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("link 0 0 0 3 1\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("link 0 0 0 0 2\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("\n\nrectangle 0 0 0 2 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("link 0 0 0 0 1 extra\n"), "");
}

TEST(Flux, LinkIntegralOfUniformField) {
  // A_y = B x on the links: ∮A = B × area.
  const LatticeGrid g = make_lattice({8, 8, 4}, 0.5, Boundary::periodic);
  const double b = 0.7;
  LatticeField<std::array<double, 4>> a(g, std::array<double, 4>{});
  for (std::size_t i = 0; i < g.size(); ++i) a[i][2] = b * g.position(g.site(i))[0];
  const LatticeLoop loop = rectangular_loop({1, 2, 0}, 2, 3, 2);
  EXPECT_NEAR(flux_integral(a, loop), b * 1.5 * 1.0, 1e-14);
}

TEST(Flux, WzActionOfUniformDirectorVanishes) {
  const LatticeGrid g = make_lattice({4, 4, 4}, 0.5, Boundary::periodic);
  const DirectorField n(g);
  EXPECT_EQ(wz_action(n, rectangular_loop({0, 0, 0}, 0, 2, 2).surface), 0.0);
}

TEST(London, FluxIsQuantizedBeyondTheCore) {
  SimulationParams p;
  p.e = 1.3;
  p.delta_plus = 0.8;
  p.delta_minus = 0.6;
  const LatticeGrid g = make_lattice({32, 32, 4}, 0.25, Boundary::periodic);
  const LondonVortex v = london_vortex(g, 1, 1, p);
  EXPECT_FALSE(v.constraint_violated);
  EXPECT_NEAR(v.prediction, -2 * M_PI / p.e, 1e-14);
  EXPECT_DOUBLE_EQ(v.core_radius, 0.5);
  for (int half : {4, 8, 11}) {
    const FluxMeasurement m = measure_flux(v, centred_square_loop(g, half, 1));
    EXPECT_TRUE(m.london_regime) << half;
    EXPECT_NEAR(m.measured, m.prediction, 1e-10) << half;
    EXPECT_NEAR(m.current_circulation, 0.0, 1e-10);
    EXPECT_NEAR(m.spin_mixing, 0.0, 1e-14);
  }
  const FluxMeasurement inner = measure_flux(v, centred_square_loop(g, 1, 1));
  EXPECT_FALSE(inner.london_regime);
  EXPECT_DOUBLE_EQ(inner.loop_radius, 0.25);
}

TEST(London, UnequalWindingsViolateTheConstraint) {
  SimulationParams p;
  const LatticeGrid g = make_lattice({16, 16, 4}, 0.25, Boundary::periodic);
  const LondonVortex v = london_vortex(g, 1, 2, p);
  EXPECT_TRUE(v.constraint_violated);
  EXPECT_TRUE(measure_flux(v, centred_square_loop(g, 6, 0)).constraint_violated);
}

TEST(Wilson, LatticeRefusesVortexSurfaces) {
  const LatticeGrid g = make_lattice({16, 16, 4}, 0.25, Boundary::periodic);
  const LondonVortex v = london_vortex(g, 1, 1, SimulationParams{});
  EXPECT_THROW(wilson_loop(v.scf, v.pauli.a_mu, centred_square_loop(g, 4, 0), v.params), ObservableError);
  LatticeLoop bare = centred_square_loop(g, 4, 0);
  bare.surface.clear();
  EXPECT_THROW(wilson_loop(v.scf, v.pauli.a_mu, bare, v.params), ObservableError);
}

TEST(Wilson, LatticeSmoothLoop) {
  const auto fam = random_smooth_family(3, {.time_dependent = false});
  const LatticeGrid g = make_lattice({16, 16, 16}, 0.25, Boundary::periodic);
  const SampledFields s = sample_family(*fam, g);
  SpinChargeFields scf = decompose(s.pauli, s.u);
  connection_fields(scf, s.pauli.a_mu, SimulationParams{});
  const WilsonLoop w = wilson_loop(scf, s.pauli.a_mu, rectangular_loop({5, 5, 8}, 2, 4, 4), SimulationParams{});
  EXPECT_NEAR(std::abs(w.w_total), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(w.w_maxwell), 1.0, 1e-14);
  EXPECT_LT(w.abelian_residual, 0.05);
}

TEST(Wilson, AnalyticAbelianRelation) {
  const SimulationParams p;
  for (std::uint64_t seed : {1u, 2u}) {
    const auto f = random_smooth_family(seed);
    const WilsonLoop w = wilson_loop(*f, p, random_rectangle(seed, f->support()));
    EXPECT_LT(w.abelian_residual, 1e-9) << seed;
    EXPECT_LT(w.double_charge_residual, 1e-9) << seed;
    EXPECT_NEAR(w.surface_flux, w.nx_line - w.wz, 1e-9);
  }
}

TEST(Wilson, AnalyticConstantFieldIsTrivial) {
  const auto f = constant_family(Spinor<double>{Cplx<double>{0.6, 0.0}, Cplx<double>{0.0, 0.8}});
  const WilsonLoop w = wilson_loop(*f, SimulationParams{}, RectangleLoop{});
  EXPECT_NEAR(w.surface_flux, 0.0, 1e-15);
  EXPECT_NEAR(w.residual, 0.0, 1e-15);
}

TEST(WIdentity, AnalyticFormsAgree) {
  const auto f = random_smooth_family(4);
  const std::vector<Point4> pts{{0.1, 0.2, 0.3, 0.4}, {-0.4, 0.1, -0.2, 0.6}, {0.0, 0.5, 0.5, -0.5}};
  const WIdentityReport r = verify_W_identity(*f, SimulationParams{}, pts);
  EXPECT_EQ(r.points, 3u);
  EXPECT_LT(r.max_residual(), 1e-12);
  EXPECT_GT(r.literal_frame_residual, 1e-3);
}

TEST(WIdentity, LatticeErrorShrinksWithSpacing) {
  const auto f = random_smooth_family(5, {.time_dependent = false});
  auto residual = [&](int n) {
    const SampledFields s = sample_family(*f, make_lattice({n, n, n}, 4.0 / n, Boundary::periodic));
    SpinChargeFields scf = decompose(s.pauli, s.u);
    connection_fields(scf, s.pauli.a_mu, SimulationParams{});
    return verify_W_identity(scf).max_residual();
  };
  // still short of the asymptotic factor 4 at these spacings
  const double coarse = residual(32);
  const double fine = residual(64);
  EXPECT_GT(coarse / fine, 2.5);
}

TEST(StrongField, CovariantDerivativeOfReferenceDirectorVanishes) {
  const auto f = random_smooth_family(6);
  for (const Point4& x : {Point4{0.1, 0.2, 0.3, 0.4}, Point4{0.3, -0.1, 0.0, 0.2}})
    EXPECT_LT(strong_field_residual(*f, SimulationParams{}, x), 1e-12);
}

TEST(StrongField, ReductionOnLondonVortex) {
  SimulationParams p;
  p.h_ext = {0.0, 0.0, 1.0};
  const LatticeGrid g = make_lattice({16, 16, 4}, 0.25, Boundary::periodic);
  const LondonVortex v = london_vortex(g, 1, 1, p);
  const StrongFieldReduction r = strong_field_reduce(v.scf, v.pauli.a_mu, p);
  EXPECT_LT(r.dn0_residual, 1e-12);
  // U = 1: no spin vortices, one Abrikosov line per condensate at the centre
  EXPECT_TRUE(r.spin.vortices.empty());
  long plus = 0;
  for (const VortexPlaquette& q : r.abrikosov_plus.vortices) plus += q.winding;
  EXPECT_EQ(plus, 0);  // periodic wrap compensates
  EXPECT_FALSE(r.abrikosov_plus.vortices.empty());
}
