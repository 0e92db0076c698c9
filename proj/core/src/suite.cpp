#include "spincharge/suite.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "spincharge/analytic.hpp"
#include "spincharge/faddeev.hpp"
#include "spincharge/lagrangian.hpp"
#include "spincharge/observables.hpp"
#include "spincharge/topology.hpp"

namespace spincharge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FamilyPtr identity_family(const std::string& name, std::uint64_t seed) {
  if (name == "random") return random_smooth_family(seed);
  if (name == "pure-rho") return pure_rho_family(seed);
  if (name == "abelian-frame") return abelian_frame_family(SmoothScalar::random(seed, 4, 1.5, 2.0, false));
  throw ConfigError(0, "unknown family '" + name + "' (random, pure-rho, abelian-frame)");
}

void identity_suite(const RunConfig& c, SuiteReport& r) {
  for (int i = 0; i < c.seeds; ++i) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
    const FamilyPtr f = identity_family(c.family, seed);
    const DensityReport d = c.backend == Backend::analytic
                                ? verify_identity(*f, c.params, QuadratureSpec{c.quadrature_order, c.tol.identity})
                                : verify_identity_lattice(*f, c.params, c.lattice());
    r.records.push_back(make_check("identity." + c.family + ".seed" + std::to_string(seed), d.rel_diff, c.tol.identity));
  }
}

void topology_suite(const RunConfig& c, SuiteReport& r) {
  const LatticeGrid g = c.lattice();
  const DirectorField n = toroidal_ansatz(c.p, c.q, c.scale, g);
  const double target = static_cast<double>(c.p) * c.q;
  const std::string tag = "hopf.p" + std::to_string(c.p) + "q" + std::to_string(c.q);

  double spectral = kInf;
  long rounded = 0;
  try {
    const HopfResult h = hopf_charge(n);
    spectral = h.raw;
    rounded = h.rounded;
  } catch (const TopologyError&) {
  }
  r.records.push_back(make_check(tag + ".spectral", std::abs(spectral - target), c.tol.hopf));

  const LinkingResult l = hopf_charge_oracle(n);
  r.records.push_back(make_check(tag + ".linking", l.ok ? std::abs(l.linking - target) : kInf, 0.0));
  const double agree = (l.ok && std::isfinite(spectral)) ? std::abs(static_cast<double>(rounded - l.linking)) : kInf;
  r.records.push_back(make_check(tag + ".agreement", agree, 0.0));
}

void flux_suite(const RunConfig& c, SuiteReport& r) {
  const LatticeGrid g = c.lattice();
  const LondonVortex v = london_vortex(g, c.n_plus, c.n_minus, c.params, c.core_radius);
  // Loop radius at least a third of the smaller transverse box side.
  const int side = std::min(g.dim(0), g.dim(1));
  const int half = (side + 2) / 3;
  if (2 * half >= side) throw ConfigError(0, "flux suite: grid too small for a loop of radius L/3");
  const FluxMeasurement m = measure_flux(v, centred_square_loop(g, half, g.dim(2) / 2));
  r.records.push_back(make_check("flux.relative_error", m.relative_error, c.tol.flux));
  r.records.push_back(make_check("flux.current_circulation", m.current_circulation, 1e-2 * std::abs(m.prediction)));
  r.records.push_back(make_check("flux.spin_mixing", std::abs(m.spin_mixing), c.tol.flux));

  // Worked case: Δ₊² = 0.7, Δ₋² = 0.3, N = (2, 1) gives -(2π/e)·1.7.
  const double worked = quantization_prediction(c.params.e, 0.7, 0.3, 2, 1, 0.0);
  r.records.push_back(make_check("flux.prediction_arithmetic", std::abs(worked - (-(2.0 * M_PI / c.params.e) * 1.7)), 0.0));
}

void faddeev_suite(const RunConfig& c, SuiteReport& r) {
  const LatticeGrid g = c.lattice();
  const FaddeevConfig init =
      FaddeevConfig::with_constant_rho(toroidal_ansatz(c.p, c.q, c.scale, g), 1.0, c.params);
  RelaxSchedule s;
  s.max_steps = c.max_steps;
  s.initial_step = c.step;
  s.tolerance = c.tol.gradient;
  s.hopf_every = c.hopf_every;
  s.relax_rho = c.relax_rho;
  const RelaxationResult res = relax(init, s);

  double rises = 0.0;
  for (std::size_t i = 1; i < res.energy_trace.size(); ++i) {
    if (!(res.energy_trace[i] < res.energy_trace[i - 1])) rises += 1.0;
  }
  r.records.push_back(make_check("faddeev.energy_nonincreasing_steps", rises, 0.0));
  const double target = static_cast<double>(c.p) * c.q;
  double drift = res.hopf_trace.empty() ? kInf : 0.0;
  for (long h : res.hopf_trace) drift = std::max(drift, std::abs(h - target));
  if (res.termination == Termination::charge_jump) drift = std::max(drift, 1.0);
  r.records.push_back(make_check("faddeev.hopf_drift", drift, 0.0));
  r.records.push_back(make_check("faddeev.virial", std::abs(res.virial_ratio - 1.0), c.tol.virial));
  CheckRecord conv = make_check("faddeev.gradient_norm", res.final_gradient_norm, c.tol.gradient);
  conv.pass = res.termination == Termination::converged;
  r.records.push_back(conv);
}

}  // namespace

CheckRecord make_check(std::string name, double measured, double tolerance) {
  CheckRecord r;
  r.name = std::move(name);
  r.measured = measured;
  r.tolerance = tolerance;
  r.pass = tolerance > 0.0 ? measured < tolerance : measured == 0.0;
  return r;
}

std::string format_record(const CheckRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "check=%s measured=%.9e tolerance=%.3e status=%s", r.name.c_str(), r.measured,
                r.tolerance, r.pass ? "PASS" : "FAIL");
  return buf;
}

bool SuiteReport::all_pass() const {
  for (const CheckRecord& r : records) {
    if (!r.pass) return false;
  }
  return !records.empty();
}

std::string SuiteReport::text() const {
  std::string out;
  std::size_t failed = 0;
  for (const CheckRecord& r : records) {
    out += format_record(r) + "\n";
    failed += r.pass ? 0 : 1;
  }
  out += "summary suite=" + suite + " checks=" + std::to_string(records.size()) +
         " failed=" + std::to_string(failed) + " status=" + (all_pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

SuiteReport run_suite(const std::string& name, const RunConfig& config) {
  validate(config);
  SuiteReport r;
  r.suite = name;
  if (name == "identity") {
    identity_suite(config, r);
  } else if (name == "topology") {
    topology_suite(config, r);
  } else if (name == "flux") {
    flux_suite(config, r);
  } else if (name == "faddeev") {
    faddeev_suite(config, r);
  } else {
    throw ConfigError(0, "unknown suite '" + name + "'");
  }
  return r;
}

}  // namespace spincharge
