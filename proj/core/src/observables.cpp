#include "spincharge/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "spincharge/summation.hpp"

namespace spincharge {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

Site step(Site s, int axis, int steps) {
  s[axis] += steps;
  return s;
}

using LinkKey = std::array<int, 4>;  // base site + axis

void add_link(std::map<LinkKey, int>& acc, const Site& from, int axis, int direction, int weight) {
  const Site base = direction > 0 ? from : step(from, axis, -1);
  acc[{base[0], base[1], base[2], axis}] += weight * (direction > 0 ? 1 : -1);
}

std::array<Site, 4> plaquette_corners(const LatticePlaquette& p) {
  const int i = (p.normal + 1) % 3;
  const int j = (p.normal + 2) % 3;
  return {p.site, step(p.site, i, 1), step(step(p.site, i, 1), j, 1), step(p.site, j, 1)};
}

Phase expi_std(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Composite Gauss-Legendre rule on [0, length].
struct LineRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

LineRule composite_rule(double length, const LoopQuadrature& q) {
  const GaussRule g = gauss_legendre(q.order);
  LineRule r;
  const double h = length / q.panels;
  for (int p = 0; p < q.panels; ++p) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      r.nodes.push_back(h * (p + 0.5 * (g.nodes[i] + 1.0)));
      r.weights.push_back(0.5 * h * g.weights[i]);
    }
  }
  return r;
}

double winding_around(const ScalarField& phase, const std::array<Site, 4>& corners) {
  double w = 0.0;
  for (int c = 0; c < 4; ++c) {
    w += branch_reduce(phase.at(corners[(c + 1) % 4]) - phase.at(corners[c]));
  }
  return w / kTwoPi;
}

ScalarField omega_component(const SpinChargeFields& scf, int c) {
  ScalarField f(scf.grid, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = scf.omega_pm[i][c];
  return f;
}

void check_surface(const SpinChargeFields& scf, const LatticeLoop& loop) {
  const LatticeGrid& g = scf.grid;
  const ScalarField om_p = omega_component(scf, 0);
  const ScalarField om_m = omega_component(scf, 1);
  for (const LatticePlaquette& p : loop.surface) {
    const auto corners = plaquette_corners(p);
    for (const Site& c : corners) {
      const Site w = g.wrap(c);
      if (!g.contains(w)) throw ObservableError("wilson_loop: surface leaves the grid");
      if (scf.masked(g.index(w))) throw ObservableError("wilson_loop: surface touches a site with ρ = 0");
    }
    if (std::lround(winding_around(om_p, corners)) != 0 ||
        std::lround(winding_around(om_m, corners)) != 0) {
      throw ObservableError("wilson_loop: surface crosses an Abrikosov vortex");
    }
    for (int side : {0, -1}) {
      const Site lo = step(p.site, p.normal, side);
      const Site hi{lo[0] + 1, lo[1] + 1, lo[2] + 1};
      if (std::abs(box_surface_flux(scf.n, lo, hi)) > kTwoPi) {
        throw ObservableError("wilson_loop: surface is adjacent to a monopole");
      }
    }
  }
}

void fill_phases(WilsonLoop& w, double charge) {
  w.w_total = expi_std(w.surface_flux);
  w.w_maxwell = expi_std(charge * w.line_flux);
  w.w_wz = expi_std(-w.wz);
  w.residual = std::abs(w.w_total - w.w_maxwell * w.w_wz);
  w.abelian_residual = std::abs(w.w_total - expi_std(w.nx_line) * w.w_wz);
  w.double_charge_residual = std::abs(w.w_total - expi_std(2.0 * charge * w.line_flux));
}

Vec3d jet_values(const Vec3<Jet1>& v) { return {v[0].v, v[1].v, v[2].v}; }
Vec3d jet_partials(const Vec3<Jet1>& v, int mu) { return {v[0].d[mu], v[1].d[mu], v[2].d[mu]}; }

}  // namespace

// ---------------------------------------------------------------------------
// Loops

bool LatticeLoop::closed() const {
  if (links.empty()) return false;
  for (std::size_t l = 0; l < links.size(); ++l) {
    const LatticeLink& a = links[l];
    const LatticeLink& b = links[(l + 1) % links.size()];
    if (a.direction != 1 && a.direction != -1) return false;
    if (step(a.site, a.axis, a.direction) != b.site) return false;
  }
  return true;
}

bool LatticeLoop::surface_matches() const {
  if (surface.empty() || !closed()) return false;
  std::map<LinkKey, int> acc;
  for (const LatticeLink& l : links) add_link(acc, l.site, l.axis, l.direction, 1);
  for (const LatticePlaquette& p : surface) {
    const int i = (p.normal + 1) % 3;
    const int j = (p.normal + 2) % 3;
    const auto c = plaquette_corners(p);
    add_link(acc, c[0], i, 1, -p.orientation);
    add_link(acc, c[1], j, 1, -p.orientation);
    add_link(acc, c[2], i, -1, -p.orientation);
    add_link(acc, c[3], j, -1, -p.orientation);
  }
  return std::all_of(acc.begin(), acc.end(), [](const auto& kv) { return kv.second == 0; });
}

LatticeLoop rectangular_loop(const Site& corner, int normal, int len_i, int len_j) {
  if (normal < 0 || normal > 2 || len_i < 1 || len_j < 1) {
    throw std::invalid_argument("rectangular_loop: bad normal or lengths");
  }
  const int i = (normal + 1) % 3;
  const int j = (normal + 2) % 3;
  LatticeLoop loop;
  Site s = corner;
  auto walk = [&](int axis, int dir, int len) {
    for (int n = 0; n < len; ++n) {
      loop.links.push_back({s, axis, dir});
      s = step(s, axis, dir);
    }
  };
  walk(i, 1, len_i);
  walk(j, 1, len_j);
  walk(i, -1, len_i);
  walk(j, -1, len_j);
  for (int a = 0; a < len_i; ++a) {
    for (int b = 0; b < len_j; ++b) loop.surface.push_back({step(step(corner, i, a), j, b), normal, 1});
  }
  return loop;
}

LatticeLoop parse_loop(const std::string& text) {
  LatticeLoop loop;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::istringstream fields(hash == std::string::npos ? raw : raw.substr(0, hash));
    std::string kind;
    if (!(fields >> kind)) continue;
    auto fail = [line](const std::string& m) {
      throw ObservableError("loop line " + std::to_string(line) + ": " + m);
    };
    if (kind != "link" && kind != "plaquette" && kind != "rectangle") fail("unknown entry '" + kind + "'");
    const int count = kind == "rectangle" ? 6 : 5;
    std::array<int, 6> v{};
    for (int i = 0; i < count; ++i) {
      if (!(fields >> v[i])) fail("expected " + std::to_string(count) + " integers after '" + kind + "'");
    }
    std::string extra;
    if (fields >> extra) fail("trailing text '" + extra + "'");
    const Site s{v[0], v[1], v[2]};
    if (v[3] < 0 || v[3] > 2) fail("axis must be 0, 1 or 2");
    if (kind == "link") {
      if (v[4] != 1 && v[4] != -1) fail("direction must be 1 or -1");
      loop.links.push_back({s, v[3], v[4]});
    } else if (kind == "plaquette") {
      if (v[4] != 1 && v[4] != -1) fail("orientation must be 1 or -1");
      loop.surface.push_back({s, v[3], v[4]});
    } else if (kind == "rectangle") {
      if (v[4] < 1 || v[5] < 1) fail("rectangle lengths must be >= 1");
      const LatticeLoop r = rectangular_loop(s, v[3], v[4], v[5]);
      loop.links.insert(loop.links.end(), r.links.begin(), r.links.end());
      loop.surface.insert(loop.surface.end(), r.surface.begin(), r.surface.end());
    }
  }
  if (loop.links.empty()) throw ObservableError("loop: no links");
  return loop;
}

double wz_action(const DirectorField& n, const std::vector<LatticePlaquette>& surface) {
  CompensatedSum acc;
  for (const LatticePlaquette& p : surface) acc += p.orientation * plaquette_solid_angle(n, p.site, p.normal);
  return acc.value();
}

double flux_integral(const LatticeField<std::array<double, 4>>& a_mu, const LatticeLoop& loop) {
  const double a = a_mu.grid().spacing();
  CompensatedSum acc;
  for (const LatticeLink& l : loop.links) {
    const Site base = l.direction > 0 ? l.site : step(l.site, l.axis, -1);
    acc += l.direction * a_mu.at(base)[l.axis + 1] * a;
  }
  return acc.value();
}

double thooft_line_integral(const SpinChargeFields& scf, const LatticeLoop& loop) {
  const double a = scf.grid.spacing();
  CompensatedSum acc;
  for (const LatticeLink& l : loop.links) {
    const Site end = step(l.site, l.axis, l.direction);
    const double v0 = dot(scf.n.at(l.site), scf.x_mu.at(l.site)[l.axis + 1]);
    const double v1 = dot(scf.n.at(end), scf.x_mu.at(end)[l.axis + 1]);
    acc += l.direction * 0.5 * (v0 + v1) * a;
  }
  return acc.value();
}

// ---------------------------------------------------------------------------
// Wilson loops

WilsonLoop wilson_loop(const SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                       const LatticeLoop& loop, const SimulationParams& params) {
  if (!scf.has_connections) throw ObservableError("wilson_loop: connection fields not computed");
  if (!loop.closed()) throw ObservableError("wilson_loop: contour is not closed");
  if (!loop.surface_matches()) throw ObservableError("wilson_loop: surface boundary differs from contour");
  check_surface(scf, loop);

  const LatticeGrid& g = scf.grid;
  const double area = g.spacing() * g.spacing();
  CompensatedSum flux;
  for (const LatticePlaquette& p : loop.surface) {
    const int i = (p.normal + 1) % 3;
    const int j = (p.normal + 2) % 3;
    double avg = 0.0;
    for (const Site& c : plaquette_corners(p)) avg += 0.25 * thooft_tensor(scf, g.wrap(c))[i + 1][j + 1];
    flux += p.orientation * avg * area;
  }
  WilsonLoop w;
  w.surface_flux = flux.value();
  w.line_flux = flux_integral(a_mu, loop);
  w.wz = wz_action(scf.n, loop.surface);
  w.nx_line = thooft_line_integral(scf, loop);
  fill_phases(w, params.e);
  return w;
}

WilsonLoop wilson_loop(const AnalyticFamily& family, const SimulationParams& params,
                       const RectangleLoop& loop, const LoopQuadrature& quadrature) {
  if (loop.mu == loop.nu || loop.mu < 0 || loop.mu > 3 || loop.nu < 0 || loop.nu > 3) {
    throw std::invalid_argument("wilson_loop: loop plane needs two distinct axes");
  }
  const LineRule rs = composite_rule(loop.l_mu, quadrature);
  const LineRule rt = composite_rule(loop.l_nu, quadrature);
  auto at = [&](double s, double t) {
    Point4 p = loop.origin;
    p[loop.mu] += s;
    p[loop.nu] += t;
    return p;
  };

  CompensatedSum flux, wz;
  for (std::size_t a = 0; a < rs.nodes.size(); ++a) {
    for (std::size_t b = 0; b < rt.nodes.size(); ++b) {
      const PointFields<Jet1> f = decompose_point(family, params, at(rs.nodes[a], rt.nodes[b])).fields;
      const double weight = rs.weights[a] * rt.weights[b];
      flux += weight * thooft_tensor(f)[loop.mu][loop.nu];
      wz += weight * triple(jet_values(f.n), jet_partials(f.n, loop.mu), jet_partials(f.n, loop.nu));
    }
  }

  // Edges: +mu at t = 0, +nu at s = l_mu, -mu at t = l_nu, -nu at s = 0.
  CompensatedSum line, nx;
  auto edge = [&](const LineRule& r, int axis, double sign, auto point_of) {
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      const Point4 p = point_of(r.nodes[k]);
      Point4T<double> x{p[0], p[1], p[2], p[3]};
      line += sign * r.weights[k] * family.sample(x).a_mu[axis];
      const PointFields<Jet1> f = decompose_point(family, params, p).fields;
      nx += sign * r.weights[k] * dot(jet_values(f.n), jet_values(f.x[axis]));
    }
  };
  edge(rs, loop.mu, 1.0, [&](double s) { return at(s, 0.0); });
  edge(rt, loop.nu, 1.0, [&](double t) { return at(loop.l_mu, t); });
  edge(rs, loop.mu, -1.0, [&](double s) { return at(s, loop.l_nu); });
  edge(rt, loop.nu, -1.0, [&](double t) { return at(0.0, t); });

  WilsonLoop w;
  w.surface_flux = flux.value();
  w.line_flux = line.value();
  w.wz = wz.value();
  w.nx_line = nx.value();
  fill_phases(w, params.e);
  return w;
}

RectangleLoop random_rectangle(std::uint64_t seed, const SupportBox& box) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  static constexpr std::array<std::array<int, 2>, 3> kPlanes{{{1, 2}, {1, 3}, {2, 3}}};
  RectangleLoop r;
  const auto& plane = kPlanes[static_cast<std::size_t>(unit(rng) * 3.0) % 3];
  r.mu = plane[0];
  r.nu = plane[1];
  for (int m = 0; m < 4; ++m) {
    const double w = box.hi[m] - box.lo[m];
    r.origin[m] = box.lo[m] + w * (0.1 + 0.4 * unit(rng));
  }
  r.l_mu = (box.hi[r.mu] - box.lo[r.mu]) * (0.15 + 0.35 * unit(rng));
  r.l_nu = (box.hi[r.nu] - box.lo[r.nu]) * (0.15 + 0.35 * unit(rng));
  return r;
}

// ---------------------------------------------------------------------------
// Flux quantization

double quantization_prediction(double charge, double delta_plus_sq, double delta_minus_sq,
                               int n_plus, int n_minus, double spin_mixing) {
  if (!(charge > 0.0)) throw std::invalid_argument("quantization_prediction: charge must be positive");
  if (delta_plus_sq < 0.0 || delta_minus_sq < 0.0) {
    throw std::invalid_argument("quantization_prediction: negative condensate");
  }
  const double total = delta_plus_sq + delta_minus_sq;
  if (total == 0.0) throw std::invalid_argument("quantization_prediction: both condensates vanish");
  const double weighted = (delta_plus_sq * n_plus + delta_minus_sq * n_minus) / total;
  return -(kTwoPi / charge) * weighted + spin_mixing / (2.0 * charge);
}

double quantization_prediction(const SimulationParams& params, int n_plus, int n_minus,
                               double spin_mixing) {
  return quantization_prediction(params.e, params.delta_plus * params.delta_plus,
                                 params.delta_minus * params.delta_minus, n_plus, n_minus,
                                 spin_mixing);
}

LondonVortex london_vortex(const LatticeGrid& grid, int n_plus, int n_minus,
                           const SimulationParams& params, double core_radius) {
  params.validate();
  if (!(params.delta_plus > 0.0) || !(params.delta_minus > 0.0)) {
    throw std::invalid_argument("london_vortex: both condensates must be positive");
  }
  const double a = grid.spacing();
  const double rc = core_radius > 0.0 ? core_radius : 2.0 * a;
  const double dp2 = params.delta_plus * params.delta_plus;
  const double dm2 = params.delta_minus * params.delta_minus;
  const double weighted = (dp2 * n_plus + dm2 * n_minus) / (dp2 + dm2);

  LondonVortex v;
  v.n_plus = n_plus;
  v.n_minus = n_minus;
  v.core_radius = rc;
  v.prediction = quantization_prediction(params, n_plus, n_minus, 0.0);
  v.constraint_violated = n_plus != n_minus;
  v.pauli = PauliField(grid);
  v.u = UnitaryField(grid, Mat2<double>::identity());

  // A = -(weighted/e) p(r) ∇θ with p = min(1, r²/r_c²).
  auto potential = [&](double x, double y) -> std::array<double, 2> {
    const double r2 = x * x + y * y;
    if (r2 == 0.0) return {0.0, 0.0};
    const double p = std::min(1.0, r2 / (rc * rc));
    const double f = -weighted / params.e * p / r2;
    return {-y * f, x * f};
  };
  const GaussRule gl = gauss_legendre(16);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3d x = grid.position(grid.site(i));
    const double theta = std::atan2(x[1], x[0]);
    const bool on_axis = x[0] == 0.0 && x[1] == 0.0;
    const double rp = on_axis && n_plus != 0 ? 0.0 : params.delta_plus;
    const double rm = on_axis && n_minus != 0 ? 0.0 : params.delta_minus;
    v.pauli.psi[i] = {Cplx<double>{rp * std::cos(n_plus * theta), rp * std::sin(n_plus * theta)},
                      Cplx<double>{rm * std::cos(n_minus * theta), rm * std::sin(n_minus * theta)}};

    std::array<double, 4> link{};
    for (int k = 0; k < 2; ++k) {
      Vec3d end = x;
      end[k] += a;
      // Closest approach of the link segment to the axis.
      Vec3d closest = x;
      closest[k] = std::clamp(0.0, std::min(x[k], end[k]), std::max(x[k], end[k]));
      const double dmin = std::hypot(closest[0], closest[1]);
      if (dmin > rc) {
        const double dtheta = branch_reduce(std::atan2(end[1], end[0]) - theta);
        link[k + 1] = -weighted / params.e * dtheta / a;
      } else {
        double acc = 0.0;
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
          Vec3d p = x;
          p[k] += 0.5 * a * (gl.nodes[q] + 1.0);
          acc += 0.5 * gl.weights[q] * potential(p[0], p[1])[k];
        }
        link[k + 1] = acc;
      }
    }
    v.pauli.a_mu[i] = link;
  }
  v.scf = decompose(v.pauli, v.u);
  connection_fields(v.scf, v.pauli.a_mu, params);
  v.params = params;
  return v;
}

namespace {

// Gauge-invariant supercurrent on the link x → x + e_k:
// -e A_k - Σ± (ρ±(x)ρ±(x+k)/ρ(x)ρ(x+k)) (ΔΩ±)/a.
double link_supercurrent(const SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                         const Site& base, int axis, double charge) {
  const LatticeGrid& g = scf.grid;
  const Site next = g.shifted(base, axis, 1);
  const double a = g.spacing();
  double j = -charge * a_mu.at(base)[axis + 1];
  const double rho = scf.rho.at(base) * scf.rho.at(next);
  if (rho == 0.0) return j;
  for (int c = 0; c < 2; ++c) {
    const double w = scf.rho_pm.at(base)[c] * scf.rho_pm.at(next)[c] / rho;
    j -= w * branch_reduce(scf.omega_pm.at(next)[c] - scf.omega_pm.at(base)[c]) / a;
  }
  return j;
}

}  // namespace

FluxMeasurement measure_flux(const LondonVortex& vortex, const LatticeLoop& loop,
                             double current_threshold) {
  if (!loop.closed()) throw ObservableError("measure_flux: contour is not closed");
  const SpinChargeFields& scf = vortex.scf;
  const double a = scf.grid.spacing();
  FluxMeasurement m;
  m.measured = flux_integral(vortex.pauli.a_mu, loop);

  CompensatedSum mixing, current;
  std::array<int, 3> lo{1 << 30, 1 << 30, 1 << 30};
  std::array<int, 3> hi{-(1 << 30), -(1 << 30), -(1 << 30)};
  for (const LatticeLink& l : loop.links) {
    const Site end = step(l.site, l.axis, l.direction);
    const Site base = l.direction > 0 ? l.site : end;
    const double w0 = dot(scf.n.at(l.site), scf.w_mu.at(l.site)[l.axis + 1]);
    const double w1 = dot(scf.n.at(end), scf.w_mu.at(end)[l.axis + 1]);
    mixing += l.direction * 0.5 * (w0 + w1) * a;
    current += std::abs(link_supercurrent(scf, vortex.pauli.a_mu, base, l.axis, vortex.params.e)) * a;
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], l.site[k]);
      hi[k] = std::max(hi[k], l.site[k]);
    }
  }
  m.spin_mixing = mixing.value();
  m.current_circulation = current.value();
  m.prediction = quantization_prediction(vortex.params, vortex.n_plus, vortex.n_minus, m.spin_mixing);
  const double scale = std::abs(m.prediction) > 0.0 ? std::abs(m.prediction) : 1.0;
  m.relative_error = std::abs(m.measured - m.prediction) / scale;
  m.london_regime = m.current_circulation <= current_threshold * scale;
  m.constraint_violated = vortex.constraint_violated;
  int shortest = 1 << 30;
  for (int k = 0; k < 3; ++k) {
    if (hi[k] > lo[k]) shortest = std::min(shortest, hi[k] - lo[k]);
  }
  m.loop_radius = shortest == (1 << 30) ? 0.0 : 0.5 * shortest * a;
  return m;
}

LatticeLoop centred_square_loop(const LatticeGrid& grid, int half_sites, int level) {
  if (half_sites < 1) throw std::invalid_argument("centred_square_loop: half width must be >= 1");
  // The axis sits at lattice coordinate (N-1)/2; start half_sites below it.
  std::array<int, 2> corner{};
  std::array<int, 2> len{};
  for (int k = 0; k < 2; ++k) {
    const int n = grid.dim(k);
    const int centre_lo = (n - 1) / 2;  // lower site for even n, the axis site for odd n
    corner[k] = centre_lo - half_sites + 1;
    len[k] = 2 * half_sites - 1 + (n % 2 == 0 ? 1 : 0);
    if (n % 2 == 1) {
      corner[k] = centre_lo - half_sites;
      len[k] = 2 * half_sites;
    }
  }
  return rectangular_loop(Site{corner[0], corner[1], level}, 2, len[0], len[1]);
}

// ---------------------------------------------------------------------------
// W identity and strong-field reduction

namespace {

constexpr int kEps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                               {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                               {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};

struct FrameForms {
  Vec3d frame;    // -½ ε (MᵀM')
  Vec3d literal;  // -ε (M M')
  Vec3d director; // -ε n₀ ∂n₀ + λ n₀
};

FrameForms frame_forms(const Mat3d& m, const Mat3d& dm, const Vec3d& w) {
  FrameForms f{};
  Vec3d n0{-m(2, 0), -m(2, 1), -m(2, 2)};
  Vec3d dn0{-dm(2, 0), -dm(2, 1), -dm(2, 2)};
  const double lambda = dot(n0, w);
  for (int a = 0; a < 3; ++a) {
    double fr = 0.0, li = 0.0, di = 0.0;
    for (int b = 0; b < 3; ++b) {
      for (int c = 0; c < 3; ++c) {
        if (kEps[a][b][c] == 0) continue;
        double mtm = 0.0, mm = 0.0;
        for (int n = 0; n < 3; ++n) {
          mtm += m(n, b) * dm(n, c);
          mm += m(b, n) * dm(n, c);
        }
        fr += kEps[a][b][c] * mtm;
        li += kEps[a][b][c] * mm;
        di += kEps[a][b][c] * n0[b] * dn0[c];
      }
    }
    f.frame[a] = -0.5 * fr;
    f.literal[a] = -li;
    f.director[a] = -di + lambda * n0[a];
  }
  return f;
}

double max_abs_diff(const Vec3d& a, const Vec3d& b) {
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

void accumulate(WIdentityReport& r, const FrameForms& f, const Vec3d& w) {
  r.frame_residual = std::max(r.frame_residual, max_abs_diff(f.frame, w));
  r.director_residual = std::max(r.director_residual, max_abs_diff(f.director, w));
  r.literal_frame_residual = std::max(r.literal_frame_residual, max_abs_diff(f.literal, w));
}

Mat3d central_frame_derivative(const LatticeField<Mat3d>& m, const Site& s, int k) {
  const LatticeGrid& g = m.grid();
  const Mat3d& up = m.at(g.shifted(s, k, 1));
  const Mat3d& down = m.at(g.shifted(s, k, -1));
  Mat3d d;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) d(r, c) = (up(r, c) - down(r, c)) / (2.0 * g.spacing());
  }
  return d;
}

Vec3d row3_negated(const Mat3d& m) { return {-m(2, 0), -m(2, 1), -m(2, 2)}; }

}  // namespace

WIdentityReport verify_W_identity(const SpinChargeFields& scf) {
  if (!scf.has_connections) throw ObservableError("verify_W_identity: connection fields not computed");
  WIdentityReport r;
  const LatticeGrid& g = scf.grid;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Site s = g.site(i);
    for (int k = 0; k < 3; ++k) {
      const Mat3d dm = central_frame_derivative(scf.m_frame, s, k);
      accumulate(r, frame_forms(scf.m_frame[i], dm, scf.w_mu[i][k + 1]), scf.w_mu[i][k + 1]);
    }
    ++r.points;
  }
  return r;
}

WIdentityReport verify_W_identity(const AnalyticFamily& family, const SimulationParams& params,
                                  const std::vector<Point4>& points) {
  WIdentityReport r;
  for (const Point4& p : points) {
    // The frame depends on U only; ρ = 0 points still fail decompose_point.
    const PointFields<Jet1> f = decompose_point(family, params, p).fields;
    Mat3d m;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m(a, b) = f.frame(a, b).v;
    }
    for (int mu = 0; mu < 4; ++mu) {
      Mat3d dm;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) dm(a, b) = f.frame(a, b).d[mu];
      }
      const Vec3d w = jet_values(f.w[mu]);
      accumulate(r, frame_forms(m, dm, w), w);
    }
    ++r.points;
  }
  return r;
}

double strong_field_residual(const AnalyticFamily& family, const SimulationParams& params,
                             const Point4& point) {
  const PointFields<Jet1> f = decompose_point(family, params, point).fields;
  Vec3d n0;
  for (int b = 0; b < 3; ++b) n0[b] = -f.frame(2, b).v;
  double worst = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    Vec3d dn0;
    for (int b = 0; b < 3; ++b) dn0[b] = -f.frame(2, b).d[mu];
    const Vec3d d = dn0 + cross(jet_values(f.w[mu]), n0);
    worst = std::max(worst, norm(d));
  }
  return worst;
}

double reduced_density_2d(const SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                          const SimulationParams& params, const Site& site, int normal_axis,
                          double sigma_plus, double sigma_minus, double sigma_spin) {
  (void)a_mu;  // J already carries -eA
  const LatticeGrid& g = scf.grid;
  const std::size_t idx = g.index(site);
  if (scf.masked(idx)) return 0.0;
  const double a = g.spacing();
  const double rho = scf.rho[idx];
  const std::array<double, 4>& j = scf.j_mu[idx];

  // ∂_k J_ν by central differences; ∂_0 ≡ 0.
  std::array<std::array<double, 4>, 4> dj{};
  for (int k = 0; k < 3; ++k) {
    const auto& up = scf.j_mu.at(g.shifted(site, k, 1));
    const auto& down = scf.j_mu.at(g.shifted(site, k, -1));
    for (int nu = 0; nu < 4; ++nu) dj[k + 1][nu] = (up[nu] - down[nu]) / (2.0 * a);
  }
  double grad_rho2 = 0.0, jk2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double d = central_derivative(scf.rho, site, k);
    grad_rho2 += d * d;
    jk2 += j[k + 1] * j[k + 1];
  }
  const int i = (normal_axis + 1) % 3 + 1;
  const int jj = (normal_axis + 2) % 3 + 1;
  const double sigma = kPi * (sigma_plus + sigma_minus - sigma_spin);
  double f2 = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      double f = dj[mu][nu] - dj[nu][mu];
      if (mu == i && nu == jj) f += sigma;
      if (mu == jj && nu == i) f -= sigma;
      f2 += f * f;
    }
  }
  const double m = params.m;
  return grad_rho2 / (2.0 * m) + rho * rho * (j[0] + params.mu) + rho * rho / (2.0 * m) * jk2 +
         f2 / (4.0 * params.e * params.e);
}

StrongFieldReduction strong_field_reduce(const SpinChargeFields& scf,
                                         const LatticeField<std::array<double, 4>>& a_mu,
                                         const SimulationParams& params,
                                         const StrongFieldOptions& options) {
  if (!scf.has_connections) throw ObservableError("strong_field_reduce: connection fields not computed");
  const LatticeGrid& g = scf.grid;
  const double a = g.spacing();
  StrongFieldReduction out;
  out.n0 = DirectorField(g, row3_negated(scf.m_frame.vacuum()));
  for (std::size_t i = 0; i < g.size(); ++i) out.n0[i] = row3_negated(scf.m_frame[i]);

  for (std::size_t i = 0; i < g.size(); ++i) {
    const Site s = g.site(i);
    for (int k = 0; k < 3; ++k) {
      const Vec3d dn = central_derivative(out.n0, s, k);
      const Vec3d d = dn + cross(scf.w_mu[i][k + 1], out.n0[i]);
      out.dn0_residual = std::max(out.dn0_residual, norm(d));
    }
  }
  if (out.dn0_residual > options.tolerance) {
    throw ObservableError("strong_field_reduce: D_k n0 residual " + std::to_string(out.dn0_residual) +
                          " exceeds tolerance");
  }

  const ScalarField om_p = omega_component(scf, 0);
  const ScalarField om_m = omega_component(scf, 1);
  out.abrikosov_plus = detect_phase_vortices(om_p, VortexComponent::plus, &scf.mask, kMaskPlus | kMaskRho);
  out.abrikosov_minus = detect_phase_vortices(om_m, VortexComponent::minus, &scf.mask, kMaskMinus | kMaskRho);
  out.spin = detect_spin_vortices(scf.s, options.normal_axis);

  ScalarField wp(g, 0.0), wm(g, 0.0), ws(g, 0.0);
  auto collect = [&](const VortexScan& scan, ScalarField& dst) {
    for (const VortexPlaquette& v : scan.vortices) {
      if (v.normal == options.normal_axis) dst[v.site] += v.winding;
    }
  };
  collect(out.abrikosov_plus, wp);
  collect(out.abrikosov_minus, wm);
  collect(out.spin, ws);

  out.f_abrikosov = ScalarField(g, 0.0);
  out.f_spin = ScalarField(g, 0.0);
  out.f_reduced = ScalarField(g, 0.0);
  out.density_2d = ScalarField(g, 0.0);
  const double inv_area = 1.0 / (a * a);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho2 = scf.rho[i] * scf.rho[i];
    const double pol = rho2 > 0.0
                           ? (scf.rho_pm[i][0] * scf.rho_pm[i][0] - scf.rho_pm[i][1] * scf.rho_pm[i][1]) / rho2
                           : 0.0;
    out.f_abrikosov[i] = kTwoPi * pol * (wp[i] - wm[i]) * inv_area;
    out.f_spin[i] = kTwoPi * ws[i] * inv_area;
    out.f_reduced[i] = out.f_abrikosov[i] + out.f_spin[i];
    out.density_2d[i] = reduced_density_2d(scf, a_mu, params, g.site(i), options.normal_axis,
                                           wp[i] * inv_area, wm[i] * inv_area, ws[i] * inv_area);
  }
  return out;
}

}  // namespace spincharge
