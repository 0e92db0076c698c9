#include "spincharge/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spincharge/summation.hpp"
#include "spincharge/topology.hpp"

namespace spincharge {

namespace {

Spinor<double> value_of(const Spinor<Jet1>& s) {
  return {Cplx<double>{s[0].re.v, s[0].im.v}, Cplx<double>{s[1].re.v, s[1].im.v}};
}

Spinor<double> partial_of(const Spinor<Jet1>& s, int mu) {
  return {Cplx<double>{s[0].re.d[mu], s[0].im.d[mu]}, Cplx<double>{s[1].re.d[mu], s[1].im.d[mu]}};
}

double field_strength_square(const Tensor4& f) {
  double acc = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) acc += f[mu][nu] * f[mu][nu];
  return acc;
}

// Shared by both backends once values and derivatives are in hand.
PauliTerms pauli_from_parts(const Spinor<double>& psi, const std::array<Spinor<double>, 4>& dpsi,
                            const std::array<double, 4>& a, const Vec3d& h, const Tensor4& f,
                            const SimulationParams& p) {
  PauliTerms t;
  const double rho2 = norm2(psi);
  // Re ψ† i∂₀ψ = -Im ψ†∂₀ψ
  t.time = -inner(psi, dpsi[0]).im + (p.mu - p.e * a[0]) * rho2;
  double kin = 0.0;
  for (int mu = 1; mu < 4; ++mu) {
    const Spinor<double> cov = Spinor<double>{times_i(dpsi[mu][0]), times_i(dpsi[mu][1])} -
                               scale(psi, p.e * a[mu]);
    kin += norm2(cov);
  }
  t.kinetic = kin / (2.0 * p.m);
  t.zeeman = p.g * p.e / (2.0 * p.m) * dot(h, pauli_expectation(psi));
  t.maxwell = -0.25 * field_strength_square(f);
  return t;
}

GgTerms gg_from_parts(double rho, const Vec3d& drho, const std::array<double, 4>& j,
                      const std::array<Vec3d, 3>& dn_cov, const Tensor4& thooft, const Vec3d& h,
                      const Mat3d& frame, const Vec3d& n, const SimulationParams& p,
                      const GgCoefficients& c) {
  GgTerms t;
  const double rho2 = rho * rho;
  t.gradient_rho = dot(drho, drho) / (2.0 * p.m);
  t.time = rho2 * (j[0] + p.mu);
  t.current = rho2 / (2.0 * p.m) * (j[1] * j[1] + j[2] * j[2] + j[3] * j[3]);
  double cov = 0.0;
  for (const Vec3d& d : dn_cov) cov += dot(d, d);
  t.covariant = rho2 / (8.0 * p.m) * cov;
  t.field_strength = c.field_strength / (p.e * p.e) * field_strength_square(thooft);
  t.zeeman = c.zeeman * p.g * p.e / p.m * rho2 * dot(h, frame * n);
  return t;
}

Tensor4 maxwell_tensor(const std::array<std::array<double, 4>, 4>& da) {
  // da[mu][nu] = ∂_μ A_ν
  Tensor4 f{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) f[mu][nu] = da[mu][nu] - da[nu][mu];
  return f;
}

Vec3d curl_spatial(const std::array<std::array<double, 4>, 4>& da, const Vec3d& h_ext) {
  Vec3d h;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    h[i] = da[j + 1][k + 1] - da[k + 1][j + 1] + h_ext[i];
  }
  return h;
}

template <class V, class Get>
auto lattice_diff(const LatticeField<V>& f, const Site& s, int axis, Get get) {
  const LatticeGrid& g = f.grid();
  const auto up = get(f.at(g.shifted(s, axis, 1)));
  const auto down = get(f.at(g.shifted(s, axis, -1)));
  return (up - down) * (0.5 / g.spacing());
}

std::array<std::array<double, 4>, 4> lattice_potential_derivatives(
    const LatticeField<std::array<double, 4>>& a, const Site& s) {
  std::array<std::array<double, 4>, 4> da{};
  for (int k = 0; k < 3; ++k) {
    for (int nu = 0; nu < 4; ++nu) {
      da[k + 1][nu] = lattice_diff(a, s, k, [nu](const std::array<double, 4>& v) { return v[nu]; });
    }
  }
  return da;
}

}  // namespace

double relative_difference(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

PauliTerms pauli_terms(const FieldSample<Jet1>& sample, const SimulationParams& params) {
  const Spinor<double> psi = value_of(sample.psi);
  std::array<Spinor<double>, 4> dpsi;
  std::array<double, 4> a{};
  std::array<std::array<double, 4>, 4> da{};
  for (int mu = 0; mu < 4; ++mu) {
    dpsi[mu] = partial_of(sample.psi, mu);
    a[mu] = sample.a_mu[mu].v;
    for (int nu = 0; nu < 4; ++nu) da[mu][nu] = sample.a_mu[nu].d[mu];
  }
  return pauli_from_parts(psi, dpsi, a, curl_spatial(da, params.h_ext), maxwell_tensor(da), params);
}

double pauli_density(const AnalyticFamily& family, const SimulationParams& params,
                     const Point4& point) {
  return pauli_terms(eval_analytic(family, point), params).total();
}

GgTerms gg_terms(const PointFields<Jet1>& f, const SimulationParams& params,
                 const GgCoefficients& coefficients) {
  Vec3d drho;
  Vec3d n;
  Mat3d frame;
  for (int a = 0; a < 3; ++a) {
    drho[a] = f.rho.d[a + 1];
    n[a] = f.n[a].v;
    for (int b = 0; b < 3; ++b) frame(a, b) = f.frame(a, b).v;
  }
  std::array<double, 4> j{};
  for (int mu = 0; mu < 4; ++mu) j[mu] = f.j[mu].v;
  std::array<Vec3d, 3> dn_cov;
  for (int k = 0; k < 3; ++k) {
    Vec3d dn;
    Vec3d x;
    for (int a = 0; a < 3; ++a) {
      dn[a] = f.n[a].d[k + 1];
      x[a] = f.x[k + 1][a].v;
    }
    dn_cov[k] = dn + cross(x, n);
  }
  return gg_from_parts(f.rho.v, drho, j, dn_cov, thooft_tensor(f), magnetic_field(f.a_mu, params),
                       frame, n, params, coefficients);
}

double gg_density(const AnalyticFamily& family, const SimulationParams& params, const Point4& point,
                  const GgCoefficients& coefficients) {
  return gg_terms(decompose_point(family, params, point).fields, params, coefficients).total();
}

ScalarField pauli_density(const PauliField& field, const SimulationParams& params) {
  const LatticeGrid& grid = field.grid();
  ScalarField out(grid, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Site s = grid.site(i);
    std::array<Spinor<double>, 4> dpsi{};
    for (int k = 0; k < 3; ++k) dpsi[k + 1] = central_derivative(field.psi, s, k);
    const auto da = lattice_potential_derivatives(field.a_mu, s);
    out[i] = pauli_from_parts(field.psi[i], dpsi, field.a_mu[i], curl_spatial(da, params.h_ext),
                              maxwell_tensor(da), params)
                 .total();
  }
  return out;
}

ScalarField gg_density(const SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                       const SimulationParams& params, const GgCoefficients& coefficients,
                       std::size_t* masked_sites) {
  if (!scf.has_connections) throw LatticeError("gg_density: connection fields not computed");
  const LatticeGrid& grid = scf.grid;
  ScalarField out(grid, 0.0);
  std::size_t masked = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (scf.masked(i)) {
      ++masked;
      continue;
    }
    const Site s = grid.site(i);
    Vec3d drho;
    std::array<Vec3d, 3> dn_cov;
    for (int k = 0; k < 3; ++k) {
      drho[k] = central_derivative(scf.rho, s, k);
      dn_cov[k] = central_derivative(scf.n, s, k) + cross(scf.x_mu[i][k + 1], scf.n[i]);
    }
    const auto da = lattice_potential_derivatives(a_mu, s);
    out[i] = gg_from_parts(scf.rho[i], drho, scf.j_mu[i], dn_cov, thooft_tensor(scf, s),
                           curl_spatial(da, params.h_ext), scf.m_frame[i], scf.n[i], params,
                           coefficients)
                 .total();
  }
  if (masked_sites != nullptr) *masked_sites = masked;
  return out;
}

double integrate(const ScalarField& density) {
  CompensatedSum acc;
  for (double v : density.values()) acc += v;
  return acc.value() * density.grid().volume_element();
}

DensityReport verify_identity(const AnalyticFamily& family, const SimulationParams& params,
                              const QuadratureSpec& quadrature) {
  params.validate();
  const GaussRule rule = gauss_legendre(quadrature.order);
  const SupportBox& box = family.support();
  const bool with_time = box.hi[0] > box.lo[0];
  const GgCoefficients derived = GgCoefficients::derived();
  const GgCoefficients printed = GgCoefficients::as_printed();

  // Nodes and weights per axis; a degenerate time axis is a single node of weight 1.
  std::array<std::vector<double>, 4> nodes;
  std::array<std::vector<double>, 4> weights;
  for (int mu = 0; mu < 4; ++mu) {
    if (mu == 0 && !with_time) {
      nodes[0] = {box.lo[0]};
      weights[0] = {1.0};
      continue;
    }
    const double half = 0.5 * (box.hi[mu] - box.lo[mu]);
    const double mid = 0.5 * (box.hi[mu] + box.lo[mu]);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      nodes[mu].push_back(mid + half * rule.nodes[q]);
      weights[mu].push_back(half * rule.weights[q]);
    }
  }

  DensityReport r;
  r.family = family.id();
  r.backend = "analytic";
  r.tolerance = quadrature.tolerance;
  CompensatedSum pauli_sum;
  CompensatedSum gg_sum;
  CompensatedSum printed_sum;
  for (std::size_t it = 0; it < nodes[0].size(); ++it) {
    for (std::size_t ix = 0; ix < nodes[1].size(); ++ix) {
      for (std::size_t iy = 0; iy < nodes[2].size(); ++iy) {
        for (std::size_t iz = 0; iz < nodes[3].size(); ++iz) {
          const Point4 p{nodes[0][it], nodes[1][ix], nodes[2][iy], nodes[3][iz]};
          const double w = weights[0][it] * weights[1][ix] * weights[2][iy] * weights[3][iz];
          ++r.points;
          PointDecomposition dec;
          try {
            dec = decompose_point(family, params, p);
          } catch (const std::domain_error&) {
            ++r.masked_points;
            continue;
          }
          const double lp = pauli_density(family, params, p);
          const GgTerms gt = gg_terms(dec.fields, params, derived);
          const double lg = gt.total();
          const double lg_printed =
              lg - gt.field_strength - gt.zeeman +
              gt.field_strength * (printed.field_strength / derived.field_strength) +
              gt.zeeman * (printed.zeeman / derived.zeeman);
          pauli_sum += w * lp;
          gg_sum += w * lg;
          printed_sum += w * lg_printed;
          const double diff = std::abs(lp - lg);
          if (diff > r.pointwise_max_diff) {
            r.pointwise_max_diff = diff;
            r.pointwise_max_location = p;
          }
        }
      }
    }
  }
  r.integrated_pauli = pauli_sum.value();
  r.integrated_gg = gg_sum.value();
  r.integrated_gg_as_printed = printed_sum.value();
  r.abs_diff = std::abs(r.integrated_pauli - r.integrated_gg);
  r.rel_diff = relative_difference(r.integrated_pauli, r.integrated_gg);
  r.rel_diff_as_printed = relative_difference(r.integrated_pauli, r.integrated_gg_as_printed);
  std::ostringstream q;
  q << "gauss-legendre order=" << quadrature.order << " dims=" << (with_time ? 4 : 3)
    << " points=" << r.points;
  r.quadrature = q.str();
  r.pass = r.masked_points == 0 && r.rel_diff < quadrature.tolerance;
  return r;
}

SampledFields sample_family(const AnalyticFamily& family, const LatticeGrid& grid, double t) {
  SampledFields out{PauliField(grid), UnitaryField(grid, Mat2<double>::identity())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3d x = grid.position(grid.site(i));
    const FieldSample<double> s = family.sample(Point4T<double>{t, x[0], x[1], x[2]});
    out.pauli.psi[i] = s.psi;
    out.pauli.a_mu[i] = s.a_mu;
    out.u[i] = s.u;
  }
  return out;
}

DensityReport verify_identity_lattice(const AnalyticFamily& family, const SimulationParams& params,
                                      const LatticeGrid& grid) {
  params.validate();
  if (family.time_dependent()) {
    throw std::invalid_argument("verify_identity_lattice: lattice backend is static");
  }
  const SampledFields fields = sample_family(family, grid);
  SpinChargeFields scf = decompose(fields.pauli, fields.u);
  connection_fields(scf, fields.pauli.a_mu, params);
  const ScalarField lp = pauli_density(fields.pauli, params);
  DensityReport r;
  r.family = family.id();
  r.backend = "lattice";
  r.points = grid.size();
  const ScalarField lg = gg_density(scf, fields.pauli.a_mu, params, GgCoefficients::derived(),
                                    &r.masked_points);
  const ScalarField lgp = gg_density(scf, fields.pauli.a_mu, params, GgCoefficients::as_printed());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double diff = std::abs(lp[i] - lg[i]);
    if (diff > r.pointwise_max_diff) {
      r.pointwise_max_diff = diff;
      const Vec3d x = grid.position(grid.site(i));
      r.pointwise_max_location = {0.0, x[0], x[1], x[2]};
    }
  }
  r.integrated_pauli = integrate(lp);
  r.integrated_gg = integrate(lg);
  r.integrated_gg_as_printed = integrate(lgp);
  r.abs_diff = std::abs(r.integrated_pauli - r.integrated_gg);
  r.rel_diff = relative_difference(r.integrated_pauli, r.integrated_gg);
  r.rel_diff_as_printed = relative_difference(r.integrated_pauli, r.integrated_gg_as_printed);
  std::ostringstream q;
  q << "lattice spacing=" << grid.spacing() << " sites=" << grid.size();
  r.quadrature = q.str();
  r.pass = false;  // no absolute tolerance for stencil results; see abs_diff scaling
  return r;
}

Spinor<double> spatial_rotate(const Spinor<double>& psi, const Vec3d& s0, double gamma0) {
  return su2_rotation(s0, gamma0) * psi;
}

PauliField gauge_maxwell(const PauliField& field, const ScalarField& beta, double charge) {
  if (!(beta.grid() == field.grid())) throw LatticeError("gauge_maxwell: grid mismatch");
  const LatticeGrid& grid = field.grid();
  PauliField out = field;
  const double inv = 1.0 / (charge * grid.spacing());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Site s = grid.site(i);
    const Cplx<double> w = expi(beta[i]);
    out.psi[i] = {w * field.psi[i][0], w * field.psi[i][1]};
    for (int k = 0; k < 3; ++k) {
      out.a_mu[i][k + 1] -= (beta.at(grid.shifted(s, k, 1)) - beta[i]) * inv;
    }
  }
  return out;
}

SpinChargeFields gauge_maxwell(const SpinChargeFields& scf, const ScalarField& beta) {
  if (!(beta.grid() == scf.grid)) throw LatticeError("gauge_maxwell: grid mismatch");
  SpinChargeFields out = scf;
  for (std::size_t i = 0; i < scf.grid.size(); ++i) {
    if (scf.masked(i)) continue;
    const Cplx<double> w = expi(beta[i]);
    out.phi[i] = {w * scf.phi[i][0], w * scf.phi[i][1]};
    for (int c = 0; c < 2; ++c) {
      const std::uint8_t bit = c == 0 ? kMaskPlus : kMaskMinus;
      if ((scf.mask[i] & bit) == 0) out.omega_pm[i][c] = branch_reduce(scf.omega_pm[i][c] + beta[i]);
    }
  }
  out.has_connections = false;
  return out;
}

SpinChargeFields gauge_internal(const SpinChargeFields& scf, const ScalarField& alpha) {
  if (!(alpha.grid() == scf.grid)) throw LatticeError("gauge_internal: grid mismatch");
  struct Local {
    Mat2<double> u;
    Spinor<double> phi;
    std::array<double, 2> omega;
  };
  auto apply = [](double a, Local l, std::uint8_t mask) {
    l.u = l.u * su2_axis_rotation(2, a);
    l.phi = {expi(-0.5 * a) * l.phi[0], expi(0.5 * a) * l.phi[1]};
    if ((mask & kMaskPlus) == 0) l.omega[0] = branch_reduce(l.omega[0] - 0.5 * a);
    if ((mask & kMaskMinus) == 0) l.omega[1] = branch_reduce(l.omega[1] + 0.5 * a);
    return l;
  };
  const LatticeGrid& grid = scf.grid;
  const Local vac = apply(alpha.vacuum(),
                          {scf.u.vacuum(), scf.phi.vacuum(), scf.omega_pm.vacuum()},
                          scf.mask.vacuum());
  SpinChargeFields out = scf;
  out.u = UnitaryField(grid, vac.u);
  out.phi = LatticeField<Spinor<double>>(grid, vac.phi);
  out.omega_pm = LatticeField<std::array<double, 2>>(grid, vac.omega);
  out.m_frame = LatticeField<Mat3d>(grid, spin_frame(vac.u));
  out.n = DirectorField(grid, (scf.mask.vacuum() & kMaskRho) != 0 ? scf.n.vacuum()
                                                                   : pauli_expectation(vac.phi));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Local l = apply(alpha[i], {scf.u[i], scf.phi[i], scf.omega_pm[i]}, scf.mask[i]);
    out.u[i] = l.u;
    out.phi[i] = l.phi;
    out.omega_pm[i] = l.omega;
    out.m_frame[i] = spin_frame(l.u);
    out.n[i] = scf.masked(i) ? scf.n[i] : pauli_expectation(l.phi);
  }
  out.has_connections = false;
  return out;
}

}  // namespace spincharge
