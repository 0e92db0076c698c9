#include "spincharge/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace spincharge {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

template <class I>
I to_integer(const std::string& s) {
  I v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("not a boolean: '" + s + "'");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class M>
Key real(M member) {
  return {[member](RunConfig& c, const std::string& v) { std::invoke(member, c) = to_double(v); },
          [member](const RunConfig& c) { return fmt(std::invoke(member, c)); }};
}

Key integer(int RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.*member = to_integer<int>(v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Key text(std::string RunConfig::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.*member = v; },
          [member](const RunConfig& c) { return c.*member; }};
}

Key tolerance(double Tolerances::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.tol.*member = to_double(v); },
          [member](const RunConfig& c) { return fmt(c.tol.*member); }};
}

Key param(double SimulationParams::*member) {
  return {[member](RunConfig& c, const std::string& v) { c.params.*member = to_double(v); },
          [member](const RunConfig& c) { return fmt(c.params.*member); }};
}

// Serialization order is the order of this table.
const std::vector<std::pair<std::string, Key>>& keys() {
  static const std::vector<std::pair<std::string, Key>> table = {
      {"subcommand", text(&RunConfig::subcommand)},
      {"suite", text(&RunConfig::suite)},
      {"grid",
       {[](RunConfig& c, const std::string& v) {
          const auto parts = split(v, ',');
          if (parts.size() != 3) throw std::invalid_argument("grid needs X,Y,Z");
          for (int k = 0; k < 3; ++k) c.grid[k] = to_integer<int>(parts[k]);
        },
        [](const RunConfig& c) {
          return std::to_string(c.grid[0]) + "," + std::to_string(c.grid[1]) + "," + std::to_string(c.grid[2]);
        }}},
      {"spacing", real(&RunConfig::spacing)},
      {"boundary",
       {[](RunConfig& c, const std::string& v) {
          if (v == "periodic") {
            c.boundary = Boundary::periodic;
          } else if (v == "vacuum") {
            c.boundary = Boundary::vacuum_padded;
          } else {
            throw std::invalid_argument("boundary must be periodic or vacuum");
          }
        },
        [](const RunConfig& c) { return std::string(c.boundary == Boundary::periodic ? "periodic" : "vacuum"); }}},
      {"m", param(&SimulationParams::m)},
      {"e", param(&SimulationParams::e)},
      {"g", param(&SimulationParams::g)},
      {"mu", param(&SimulationParams::mu)},
      {"h_ext",
       {[](RunConfig& c, const std::string& v) {
          const auto parts = split(v, ',');
          if (parts.size() != 3) throw std::invalid_argument("h_ext needs three components");
          for (int k = 0; k < 3; ++k) c.params.h_ext[k] = to_double(parts[k]);
        },
        [](const RunConfig& c) {
          return fmt(c.params.h_ext[0]) + "," + fmt(c.params.h_ext[1]) + "," + fmt(c.params.h_ext[2]);
        }}},
      {"delta_plus", param(&SimulationParams::delta_plus)},
      {"delta_minus", param(&SimulationParams::delta_minus)},
      {"seed",
       {[](RunConfig& c, const std::string& v) { c.seed = to_integer<std::uint64_t>(v); },
        [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"backend",
       {[](RunConfig& c, const std::string& v) {
          if (v == "lattice") {
            c.backend = Backend::lattice;
          } else if (v == "analytic") {
            c.backend = Backend::analytic;
          } else {
            throw std::invalid_argument("backend must be lattice or analytic");
          }
        },
        [](const RunConfig& c) { return to_string(c.backend); }}},
      {"tol.identity", tolerance(&Tolerances::identity)},
      {"tol.round_trip", tolerance(&Tolerances::round_trip)},
      {"tol.gauge", tolerance(&Tolerances::gauge)},
      {"tol.hopf", tolerance(&Tolerances::hopf)},
      {"tol.virial", tolerance(&Tolerances::virial)},
      {"tol.gradient", tolerance(&Tolerances::gradient)},
      {"tol.monopole_flux", tolerance(&Tolerances::monopole_flux)},
      {"tol.flux", tolerance(&Tolerances::flux)},
      {"tol.wilson", tolerance(&Tolerances::wilson)},
      {"tol.strong_field", tolerance(&Tolerances::strong_field)},
      {"out", text(&RunConfig::out)},
      {"snapshot", text(&RunConfig::snapshot)},
      {"loop", text(&RunConfig::loop)},
      {"family", text(&RunConfig::family)},
      {"seeds", integer(&RunConfig::seeds)},
      {"quadrature_order", integer(&RunConfig::quadrature_order)},
      {"p", integer(&RunConfig::p)},
      {"q", integer(&RunConfig::q)},
      {"scale", real(&RunConfig::scale)},
      {"max_steps", integer(&RunConfig::max_steps)},
      {"step", real(&RunConfig::step)},
      {"hopf_every", integer(&RunConfig::hopf_every)},
      {"snapshot_every", integer(&RunConfig::snapshot_every)},
      {"relax_rho",
       {[](RunConfig& c, const std::string& v) { c.relax_rho = to_bool(v); },
        [](const RunConfig& c) { return std::string(c.relax_rho ? "true" : "false"); }}},
      {"n_plus", integer(&RunConfig::n_plus)},
      {"n_minus", integer(&RunConfig::n_minus)},
      {"core_radius", real(&RunConfig::core_radius)},
  };
  return table;
}

const Key* find_key(const std::string& name) {
  for (const auto& [k, v] : keys()) {
    if (k == name) return &v;
  }
  return nullptr;
}

void apply(RunConfig& c, const std::string& key, const std::string& value, int line) {
  const Key* k = find_key(key);
  if (!k) throw ConfigError(line, "unknown key '" + key + "'");
  try {
    k->set(c, value);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, key + ": " + e.what());
  }
}

}  // namespace

bool grid_required(const RunConfig& c) {
  if (c.subcommand == "detect" || c.subcommand == "observables") return false;
  return !(c.subcommand == "verify-identity" && c.backend == Backend::analytic);
}

std::string to_string(Backend b) { return b == Backend::lattice ? "lattice" : "analytic"; }

bool operator==(const RunConfig& a, const RunConfig& b) {
  for (const auto& [name, key] : keys()) {
    if (key.get(a) != key.get(b)) return false;
  }
  return true;
}

void validate(const RunConfig& c) {
  static const std::set<std::string> subcommands{"verify-identity", "relax", "detect", "observables", "suite"};
  static const std::set<std::string> suites{"identity", "topology", "flux", "faddeev"};
  auto fail = [](const std::string& m) { throw ConfigError(0, m); };
  if (!subcommands.count(c.subcommand)) fail("unknown subcommand '" + c.subcommand + "'");
  if (!suites.count(c.suite)) fail("unknown suite '" + c.suite + "'");
  if (grid_required(c) || c.grid != std::array<int, 3>{0, 0, 0}) {
    for (int d : c.grid) {
      if (d < 2) fail("grid dimensions must be >= 2");
    }
  }
  if (!(c.spacing > 0.0)) fail("spacing must be > 0");
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (c.seeds < 1) fail("seeds must be >= 1");
  if (c.quadrature_order < 2 || c.quadrature_order > 64) fail("quadrature_order must be in [2, 64]");
  if (!(c.scale > 0.0)) fail("scale must be > 0");
  if (c.max_steps < 0) fail("max_steps must be >= 0");
  if (!(c.step > 0.0)) fail("step must be > 0");
  if (c.hopf_every < 1) fail("hopf_every must be >= 1");
  if (c.snapshot_every < 0) fail("snapshot_every must be >= 0");
  const Tolerances& t = c.tol;
  for (double v : {t.identity, t.round_trip, t.gauge, t.hopf, t.virial, t.gradient, t.monopole_flux, t.flux,
                   t.wilson, t.strong_field}) {
    if (!(v > 0.0)) fail("tolerances must be > 0");
  }
}

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  RunConfig c;
  bool have_grid = false;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");
    if (!seen.insert(key).second) throw ConfigError(line, "duplicate key '" + key + "'");
    apply(c, key, value, line);
    have_grid = have_grid || key == "grid";
  }
  for (const auto& [key, value] : overrides) {
    apply(c, key, value, 0);
    have_grid = have_grid || key == "grid";
  }
  if (!have_grid && grid_required(c)) throw ConfigError(0, "missing required key 'grid'");
  validate(c);
  return c;
}

std::string serialize(const RunConfig& config) {
  std::string out;
  for (const auto& [name, key] : keys()) out += name + " = " + key.get(config) + "\n";
  return out;
}

}  // namespace spincharge
