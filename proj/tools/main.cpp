// spincharge command-line tool.
//
// Exit status: 0 all checks pass, 1 a check failed, 2 usage or I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "spincharge/config.hpp"
#include "spincharge/decompose.hpp"
#include "spincharge/faddeev.hpp"
#include "spincharge/lagrangian.hpp"
#include "spincharge/observables.hpp"
#include "spincharge/snapshot.hpp"
#include "spincharge/suite.hpp"
#include "spincharge/topology.hpp"

namespace sc = spincharge;

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

// Usage and I/O problems, mapped to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string site_text(const sc::Site& s) {
  return std::to_string(s[0]) + "," + std::to_string(s[1]) + "," + std::to_string(s[2]);
}

struct Flags {
  std::string config_path;
  // key -> raw value, applied in insertion order
  std::vector<std::pair<std::string, std::string*>> bound;
  std::vector<std::unique_ptr<std::string>> storage;

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    storage.push_back(std::make_unique<std::string>());
    app->add_option(flag, *storage.back(), help);
    bound.emplace_back(key, storage.back().get());
  }

  sc::RunConfig resolve(const std::string& subcommand) const {
    const std::string text = config_path.empty() ? std::string() : read_file(config_path);
    sc::ConfigOverrides o{{"subcommand", subcommand}};
    for (const auto& [key, value] : bound) {
      if (!value->empty()) o.emplace_back(key, *value);
    }
    return sc::parse_config(text, o);
  }
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "key = value configuration file");
  f.bind(app, "--seed", "seed", "base seed of the random generator");
  f.bind(app, "--grid", "grid", "lattice size X,Y,Z");
  f.bind(app, "--spacing", "spacing", "lattice constant");
  f.bind(app, "--out", "out", "output directory");
  f.bind(app, "--boundary", "boundary", "periodic or vacuum");
  f.bind(app, "--m", "m", "mass");
  f.bind(app, "--e", "e", "charge");
  f.bind(app, "--g", "g", "gyromagnetic factor");
}

sc::SpinChargeFields decompose_snapshot(const sc::Snapshot& snap) {
  return sc::decompose(snap.pauli(), snap.frame());
}

// ---------------------------------------------------------------------------

int cmd_verify_identity(const sc::RunConfig& c) {
  bool ok = true;
  for (int i = 0; i < c.seeds; ++i) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
    sc::FamilyPtr f;
    if (c.family == "random") {
      f = sc::random_smooth_family(seed);
    } else if (c.family == "pure-rho") {
      f = sc::pure_rho_family(seed);
    } else if (c.family == "abelian-frame") {
      f = sc::abelian_frame_family(sc::SmoothScalar::random(seed, 4, 1.5, 2.0, false));
    } else {
      throw UsageError("unknown family '" + c.family + "' (random, pure-rho, abelian-frame)");
    }
    sc::DensityReport d;
    if (c.backend == sc::Backend::analytic) {
      d = sc::verify_identity(*f, c.params, sc::QuadratureSpec{c.quadrature_order, c.tol.identity});
    } else {
      d = sc::verify_identity_lattice(*f, c.params, c.lattice());
      d.pass = d.rel_diff < c.tol.identity;
    }
    ok = ok && d.pass;
    std::cout << "family=" << d.family << " seed=" << seed << " backend=" << d.backend
              << " pauli=" << num(d.integrated_pauli) << " gg=" << num(d.integrated_gg)
              << " abs_diff=" << num(d.abs_diff) << " rel_diff=" << num(d.rel_diff)
              << " rel_diff_as_printed=" << num(d.rel_diff_as_printed) << " tolerance=" << num(c.tol.identity)
              << " status=" << (d.pass ? "PASS" : "FAIL") << "\n";
  }
  return ok ? kPass : kCheckFailed;
}

int cmd_relax(const sc::RunConfig& c) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw UsageError("cannot create " + c.out + ": " + ec.message());
  const fs::path dir(c.out);

  const sc::LatticeGrid g = c.lattice();
  const sc::FaddeevConfig init =
      sc::FaddeevConfig::with_constant_rho(sc::toroidal_ansatz(c.p, c.q, c.scale, g), 1.0, c.params);

  std::ofstream trace(dir / "relax_trace.csv");
  if (!trace) throw UsageError("cannot write " + (dir / "relax_trace.csv").string());
  trace << "step,energy,e2,e4,gradient_norm,hopf\n";

  auto snapshot = [&](const sc::FaddeevConfig& cfg, const fs::path& path) {
    sc::Snapshot s;
    s.grid = g;
    s.psi = sc::spinor_from_director(cfg.n, cfg.rho);
    sc::write_snapshot(path.string(), s);
  };

  sc::RelaxSchedule s;
  s.max_steps = c.max_steps;
  s.initial_step = c.step;
  s.tolerance = c.tol.gradient;
  s.hopf_every = c.hopf_every;
  s.relax_rho = c.relax_rho;

  auto write_record = [&](const sc::TraceRecord& r) {
    trace << r.step << ',' << num(r.energy) << ',' << num(r.e2) << ',' << num(r.e4) << ','
          << num(r.gradient_norm) << ',' << (r.hopf ? std::to_string(*r.hopf) : std::string()) << '\n';
  };
  const sc::RelaxationResult res = sc::relax(init, s, [&](const sc::TraceRecord& r, const sc::FaddeevConfig& cfg) {
    if (c.snapshot_every > 0 && r.step % c.snapshot_every == 0) {
      char name[40];
      std::snprintf(name, sizeof name, "snapshot_%06d.scf1", r.step);
      snapshot(cfg, dir / name);
    }
  });
  for (const sc::TraceRecord& r : res.trace) write_record(r);
  snapshot(res.final_config, dir / "final.scf1");
  if (!trace) throw UsageError("write failed for relax_trace.csv");

  const bool ok = res.termination == sc::Termination::converged;
  std::cout << "termination=" << sc::to_string(res.termination) << " steps=" << res.accepted_steps
            << " energy=" << num(res.final_energy.total) << " e2=" << num(res.final_energy.e2)
            << " e4=" << num(res.final_energy.e4) << " virial=" << num(res.virial_ratio)
            << " gradient_norm=" << num(res.final_gradient_norm)
            << " hopf=" << (res.hopf_trace.empty() ? std::string("none") : std::to_string(res.hopf_trace.back()))
            << " status=" << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kPass : kCheckFailed;
}

int cmd_detect(const sc::RunConfig& c, const std::string& fields_path) {
  if (c.snapshot.empty()) throw UsageError("detect needs a snapshot");
  const sc::Snapshot snap = sc::read_snapshot(c.snapshot);
  const sc::SpinChargeFields scf = decompose_snapshot(snap);
  if (!fields_path.empty()) sc::write_decomposition(fields_path, scf);
  const sc::DefectReport d = sc::detect_defects(scf);

  for (const sc::VortexPlaquette& v : d.vortex_plaquettes) {
    const char* comp = v.component == sc::VortexComponent::plus    ? "plus"
                       : v.component == sc::VortexComponent::minus ? "minus"
                                                                   : "spin";
    std::cout << "type=vortex component=" << comp << " location=" << site_text(scf.grid.site(v.site))
              << " normal=" << v.normal << " charge=" << v.winding << "\n";
  }
  for (const sc::MonopoleCube& m : d.monopole_cubes) {
    std::cout << "type=monopole location=" << site_text(m.cube) << " charge=" << m.charge
              << " flux=" << num(m.flux) << "\n";
  }
  if (d.hopf_valid) {
    std::cout << "type=hopf charge=" << d.hopf_charge << " raw=" << num(d.raw_hopf) << "\n";
  } else {
    std::cout << "type=hopf status=undefined reason=\"" << d.hopf_failure << "\"\n";
  }
  std::cout << "type=summary vortex_plaquettes=" << d.vortex_plaquettes.size()
            << " monopoles=" << d.monopole_cubes.size() << " skipped_plaquettes=" << d.skipped_plaquettes
            << " degenerate_faces=" << d.degenerate_faces << "\n";
  return kPass;
}

int cmd_observables(const sc::RunConfig& c) {
  if (c.snapshot.empty()) throw UsageError("observables needs a snapshot");
  if (c.loop.empty()) throw UsageError("observables needs a loop file");
  const sc::Snapshot snap = sc::read_snapshot(c.snapshot);
  sc::LatticeLoop loop;
  try {
    loop = sc::parse_loop(read_file(c.loop));
  } catch (const sc::ObservableError& e) {
    throw UsageError(e.what());
  }
  sc::SpinChargeFields scf = decompose_snapshot(snap);
  const sc::PauliField pauli = snap.pauli();
  sc::connection_fields(scf, pauli.a_mu, c.params);

  std::cout << "quantity=line_flux value=" << num(sc::flux_integral(pauli.a_mu, loop)) << "\n";
  std::cout << "quantity=nx_line value=" << num(sc::thooft_line_integral(scf, loop)) << "\n";
  if (loop.surface.empty()) {
    std::cout << "quantity=wilson status=skipped reason=\"no spanning surface\"\n";
    return kPass;
  }
  sc::WilsonLoop w;
  try {
    w = sc::wilson_loop(scf, pauli.a_mu, loop, c.params);
  } catch (const sc::ObservableError& e) {
    std::cout << "quantity=wilson status=FAIL reason=\"" << e.what() << "\"\n";
    return kCheckFailed;
  }
  auto phase = [](const char* name, const sc::Phase& p) {
    std::cout << "quantity=" << name << " re=" << num(p.real()) << " im=" << num(p.imag())
              << " arg=" << num(std::arg(p)) << "\n";
  };
  phase("w_total", w.w_total);
  phase("w_maxwell", w.w_maxwell);
  phase("w_wz", w.w_wz);
  std::cout << "quantity=surface_flux value=" << num(w.surface_flux) << "\n";
  std::cout << "quantity=wz_action value=" << num(w.wz) << "\n";
  std::cout << "quantity=abelian_residual value=" << num(w.abelian_residual) << "\n";
  std::cout << "quantity=double_charge_residual value=" << num(w.double_charge_residual) << "\n";
  const sc::CheckRecord r = sc::make_check("wilson.residual", w.residual, c.tol.wilson);
  std::cout << sc::format_record(r) << "\n";
  return r.pass ? kPass : kCheckFailed;
}

int cmd_suite(const sc::RunConfig& c) {
  const sc::SuiteReport r = sc::run_suite(c.suite, c);
  std::cout << r.text();
  return r.all_pass() ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-charge decomposition of Pauli fields: identities, topology, relaxation"};
  app.require_subcommand(1);

  Flags identity_flags, relax_flags, detect_flags, obs_flags, suite_flags;

  CLI::App* identity = app.add_subcommand("verify-identity", "compare the two Lagrangian forms on random families");
  add_common(identity, identity_flags);
  identity_flags.bind(identity, "--family", "family", "random, pure-rho or abelian-frame");
  identity_flags.bind(identity, "--seeds", "seeds", "number of seeds");
  identity_flags.bind(identity, "--tolerance", "tol.identity", "relative tolerance");
  identity_flags.bind(identity, "--backend", "backend", "analytic or lattice");
  identity_flags.bind(identity, "--order", "quadrature_order", "Gauss-Legendre nodes per axis");

  CLI::App* relax = app.add_subcommand("relax", "relax a toroidal Hopf ansatz");
  add_common(relax, relax_flags);
  relax_flags.bind(relax, "--p", "p", "poloidal winding");
  relax_flags.bind(relax, "--q", "q", "toroidal winding");
  relax_flags.bind(relax, "--scale", "scale", "ansatz radius");
  relax_flags.bind(relax, "--max-steps", "max_steps", "step limit");
  relax_flags.bind(relax, "--tol", "tol.gradient", "gradient-norm tolerance");
  relax_flags.bind(relax, "--step", "step", "initial step size");
  relax_flags.bind(relax, "--snapshot-every", "snapshot_every", "write a snapshot every N accepted steps");
  std::string h_field;
  relax->add_option("--field", h_field, "external field h along z");

  CLI::App* detect = app.add_subcommand("detect", "report vortices, monopoles and Hopf charge of a snapshot");
  add_common(detect, detect_flags);
  std::string detect_path;
  detect->add_option("snapshot", detect_path, "SCF1 file")->required();
  std::string fields_path;
  detect->add_option("--fields", fields_path, "also write the decomposition (SCF1 blocks RHO_____ ...) here");

  CLI::App* obs = app.add_subcommand("observables", "Wilson loop and fluxes along a lattice loop");
  add_common(obs, obs_flags);
  std::string obs_path, loop_path;
  obs->add_option("snapshot", obs_path, "SCF1 file")->required();
  obs->add_option("--loop", loop_path, "loop description file")->required();

  CLI::App* suite = app.add_subcommand("suite", "run a bundled verification suite");
  add_common(suite, suite_flags);
  std::string suite_name;
  suite->add_option("name", suite_name, "identity, topology, flux or faddeev")->required();
  suite_flags.bind(suite, "--seeds", "seeds", "number of seeds (identity)");
  suite_flags.bind(suite, "--p", "p", "poloidal winding");
  suite_flags.bind(suite, "--q", "q", "toroidal winding");
  suite_flags.bind(suite, "--scale", "scale", "ansatz radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (identity->parsed()) return cmd_verify_identity(identity_flags.resolve("verify-identity"));
    if (relax->parsed()) {
      if (!h_field.empty()) {
        relax_flags.storage.push_back(std::make_unique<std::string>("0,0," + h_field));
        relax_flags.bound.emplace_back("h_ext", relax_flags.storage.back().get());
      }
      return cmd_relax(relax_flags.resolve("relax"));
    }
    if (detect->parsed()) {
      detect_flags.storage.push_back(std::make_unique<std::string>(detect_path));
      detect_flags.bound.emplace_back("snapshot", detect_flags.storage.back().get());
      return cmd_detect(detect_flags.resolve("detect"), fields_path);
    }
    if (obs->parsed()) {
      obs_flags.storage.push_back(std::make_unique<std::string>(obs_path));
      obs_flags.bound.emplace_back("snapshot", obs_flags.storage.back().get());
      obs_flags.storage.push_back(std::make_unique<std::string>(loop_path));
      obs_flags.bound.emplace_back("loop", obs_flags.storage.back().get());
      return cmd_observables(obs_flags.resolve("observables"));
    }
    if (suite->parsed()) {
      suite_flags.storage.push_back(std::make_unique<std::string>(suite_name));
      suite_flags.bound.emplace_back("suite", suite_flags.storage.back().get());
      return cmd_suite(suite_flags.resolve("suite"));
    }
  } catch (const sc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const sc::SnapshotError& e) {
    std::cerr << "snapshot error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
