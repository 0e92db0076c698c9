#include "spincharge/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spincharge {

namespace {

double phase_of(const Cplx<double>& z) {
  const double p = std::atan2(z.im, z.re);
  return p <= -M_PI ? M_PI : p;
}

double abs(const Cplx<double>& z) { return std::hypot(z.re, z.im); }

double max_abs(const Mat2<double>& m) {
  double r = 0.0;
  for (const auto& z : m.e) r = std::max(r, abs(z));
  return r;
}

struct SiteDecomposition {
  double rho = 0.0;
  std::array<double, 2> rho_pm{};
  std::array<double, 2> omega_pm{};
  Spinor<double> phi{};
  Vec3d n{0.0, 0.0, 1.0};
  std::uint8_t mask = 0;
};

SiteDecomposition decompose_site(const Spinor<double>& psi, const Mat2<double>& u) {
  SiteDecomposition d;
  d.rho = std::sqrt(norm2(psi));
  if (d.rho == 0.0) {
    d.mask = kMaskRho | kMaskPlus | kMaskMinus;
    return d;
  }
  d.phi = scale(adjoint(u) * psi, 1.0 / d.rho);
  for (int c = 0; c < 2; ++c) {
    const double amp = abs(d.phi[c]);
    d.rho_pm[c] = amp * d.rho;
    if (amp == 0.0) {
      d.mask |= (c == 0 ? kMaskPlus : kMaskMinus);
      d.omega_pm[c] = 0.0;
    } else {
      d.omega_pm[c] = phase_of(d.phi[c]);
    }
  }
  d.n = pauli_expectation(d.phi);
  return d;
}

// Column 3 of M, i.e. the spin polarization direction s.
Vec3d third_column(const Mat3d& m) { return {m(0, 2), m(1, 2), m(2, 2)}; }

// (value, ∂_μ value) split of a second-order jet into first-order jets.
Jet1 lower_value(const Jet2& a) { return a.v; }

Cplx<Jet1> lower_value(const Cplx<Jet2>& z) { return {z.re.v, z.im.v}; }
Cplx<Jet1> lower_partial(const Cplx<Jet2>& z, int mu) { return {z.re.d[mu], z.im.d[mu]}; }

Mat2<Jet1> lower_value(const Mat2<Jet2>& m) {
  Mat2<Jet1> r;
  for (int i = 0; i < 4; ++i) r.e[i] = lower_value(m.e[i]);
  return r;
}
Mat2<Jet1> lower_partial(const Mat2<Jet2>& m, int mu) {
  Mat2<Jet1> r;
  for (int i = 0; i < 4; ++i) r.e[i] = lower_partial(m.e[i], mu);
  return r;
}
Spinor<Jet1> lower_value(const Spinor<Jet2>& s) { return {lower_value(s[0]), lower_value(s[1])}; }
Spinor<Jet1> lower_partial(const Spinor<Jet2>& s, int mu) {
  return {lower_partial(s[0], mu), lower_partial(s[1], mu)};
}

}  // namespace

UnitaryField construct_U_from_s(const DirectorField& s, SectionConvention convention,
                                SectionReport* report) {
  const SectionConvention other =
      convention == SectionConvention::north ? SectionConvention::south : SectionConvention::north;
  auto section_for = [&](const Vec3d& v) {
    return section_singular(v, convention) ? other : convention;
  };
  UnitaryField u(s.grid(), u_from_director_section(s.vacuum(), section_for(s.vacuum())));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const SectionConvention c = section_for(s[i]);
    if (c != convention && report != nullptr) report->switched_sites.push_back(i);
    u[i] = u_from_director_section(s[i], c);
  }
  return u;
}

LatticeField<Mat3d> spin_frame(const UnitaryField& u) {
  LatticeField<Mat3d> m(u.grid(), spin_frame(u.vacuum()));
  for (std::size_t i = 0; i < u.size(); ++i) m[i] = spin_frame(u[i]);
  return m;
}

SpinChargeFields decompose(const PauliField& psi, const UnitaryField& u) {
  const LatticeGrid& grid = psi.grid();
  if (!(u.grid() == grid)) throw LatticeError("decompose: U and psi live on different grids");

  SpinChargeFields f;
  f.grid = grid;
  const SiteDecomposition vac = decompose_site(psi.psi.vacuum(), u.vacuum());
  const Mat3d vac_frame = spin_frame(u.vacuum());
  f.rho = ScalarField(grid, vac.rho);
  f.rho_pm = LatticeField<std::array<double, 2>>(grid, vac.rho_pm);
  f.omega_pm = LatticeField<std::array<double, 2>>(grid, vac.omega_pm);
  f.u = u;
  f.phi = LatticeField<Spinor<double>>(grid, vac.phi);
  f.n = DirectorField(grid, vac.n);
  f.s = DirectorField(grid, third_column(vac_frame));
  f.m_frame = LatticeField<Mat3d>(grid, vac_frame);
  f.w_mu = LatticeField<std::array<Vec3d, 4>>(grid, {});
  f.j_mu = LatticeField<std::array<double, 4>>(grid, {});
  f.x_mu = LatticeField<std::array<Vec3d, 4>>(grid, {});
  f.mask = LatticeField<std::uint8_t>(grid, vac.mask);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const SiteDecomposition d = decompose_site(psi.psi[i], u[i]);
    f.rho[i] = d.rho;
    f.rho_pm[i] = d.rho_pm;
    f.omega_pm[i] = d.omega_pm;
    f.phi[i] = d.phi;
    f.n[i] = d.n;
    f.mask[i] = d.mask;
    f.m_frame[i] = spin_frame(u[i]);
    f.s[i] = third_column(f.m_frame[i]);
  }
  return f;
}

LatticeField<Spinor<double>> recompose(const SpinChargeFields& scf) {
  auto site = [](const Mat2<double>& u, const std::array<double, 2>& rho_pm,
                 const std::array<double, 2>& omega_pm) {
    const Spinor<double> amp{scale(expi(omega_pm[0]), rho_pm[0]),
                             scale(expi(omega_pm[1]), rho_pm[1])};
    return u * amp;
  };
  LatticeField<Spinor<double>> psi(
      scf.grid, site(scf.u.vacuum(), scf.rho_pm.vacuum(), scf.omega_pm.vacuum()));
  for (std::size_t i = 0; i < scf.grid.size(); ++i) {
    psi[i] = scf.masked(i) ? Spinor<double>{} : site(scf.u[i], scf.rho_pm[i], scf.omega_pm[i]);
  }
  return psi;
}

void connection_fields(SpinChargeFields& scf, const LatticeField<std::array<double, 4>>& a_mu,
                       const SimulationParams& params) {
  const LatticeGrid& grid = scf.grid;
  double herm = 0.0;
  double imag = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::array<Vec3d, 4> w{};
    std::array<double, 4> j{};
    std::array<Vec3d, 4> x{};
    j[0] = -params.e * a_mu[i][0];
    if (!scf.masked(i)) {
      const Site site = grid.site(i);
      const Mat2<double> ud = adjoint(scf.u[i]);
      for (int k = 0; k < 3; ++k) {
        const int mu = k + 1;
        const Mat2<double> du = central_derivative(scf.u, site, k);
        Mat2<double> kmat = ud * du;
        for (auto& z : kmat.e) z = times_i(z);
        herm = std::max(herm, max_abs(kmat - adjoint(kmat)));
        w[mu] = pauli_components(kmat);

        const Spinor<double> dphi = central_derivative(scf.phi, site, k);
        const Cplx<double> c = times_i(inner(scf.phi[i], dphi));
        imag = std::max(imag, std::abs(c.im));
        j[mu] = -params.e * a_mu[i][mu] + c.re + 0.5 * dot(scf.n[i], w[mu]);
      }
      for (int mu = 0; mu < 4; ++mu) x[mu] = w[mu] - (2.0 * j[mu]) * scf.n[i];
    }
    scf.w_mu[i] = w;
    scf.j_mu[i] = j;
    scf.x_mu[i] = x;
  }
  scf.hermiticity_residual = herm;
  scf.current_imaginary_residual = imag;
  scf.has_connections = true;
}

InvariantReport check_invariants(const SpinChargeFields& scf) {
  InvariantReport r;
  for (std::size_t i = 0; i < scf.grid.size(); ++i) {
    const Mat2<double>& u = scf.u[i];
    r.unitarity = std::max(r.unitarity, max_abs(adjoint(u) * u - Mat2<double>::identity()));
    const Cplx<double> d = det(u);
    r.determinant = std::max(r.determinant, abs(d - Cplx<double>{1.0, 0.0}));

    const Mat3d& m = scf.m_frame[i];
    const Mat3d mtm = transpose(m) * m;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        r.frame_orthogonality =
            std::max(r.frame_orthogonality, std::abs(mtm(a, b) - (a == b ? 1.0 : 0.0)));
      }
    }
    r.frame_orthogonality = std::max(r.frame_orthogonality, std::abs(det(m) - 1.0));
    r.frame_column = std::max(r.frame_column, norm(scf.s[i] - third_column(m)));
    r.director_norm = std::max(r.director_norm, std::abs(norm(scf.s[i]) - 1.0));

    if (scf.masked(i)) continue;
    const double rho2 = scf.rho[i] * scf.rho[i];
    const auto& pm = scf.rho_pm[i];
    r.rho_split = std::max(r.rho_split, std::abs(rho2 - pm[0] * pm[0] - pm[1] * pm[1]) / rho2);
    r.phi_norm = std::max(r.phi_norm, std::abs(norm2(scf.phi[i]) - 1.0));
    r.director_norm = std::max(r.director_norm, std::abs(norm(scf.n[i]) - 1.0));
    if (scf.has_connections) {
      for (int mu = 0; mu < 4; ++mu) {
        const double lhs = dot(scf.n[i], scf.x_mu[i][mu]);
        const double rhs = dot(scf.n[i], scf.w_mu[i][mu]) - 2.0 * scf.j_mu[i][mu];
        r.nx_identity = std::max(r.nx_identity, std::abs(lhs - rhs));
      }
    }
  }
  return r;
}

PointDecomposition decompose_point(const AnalyticFamily& family, const SimulationParams& params,
                                   const Point4& point) {
  Point4T<Jet2> x;
  for (int mu = 0; mu < 4; ++mu) {
    x[mu].v = variable(point[mu], mu);
    x[mu].d[mu] = Jet1(1.0);
  }
  const FieldSample<Jet2> s = family.sample(x);

  const Jet2 rho2 = norm2(s.psi);
  if (primal(rho2) == 0.0) throw std::domain_error("decompose_point: rho vanishes (masked point)");
  const Jet2 rho = sqrt(rho2);
  const Spinor<Jet2> phi = scale(adjoint(s.u) * s.psi, reciprocal(rho));

  PointDecomposition out;
  PointFields<Jet1>& f = out.fields;
  f.rho = lower_value(rho);
  f.phi = lower_value(phi);
  f.u = lower_value(s.u);
  f.n = pauli_expectation(f.phi);
  f.frame = spin_frame(f.u);
  for (int mu = 0; mu < 4; ++mu) f.a_mu[mu] = lower_value(s.a_mu[mu]);

  const Mat2<Jet1> ud = adjoint(f.u);
  for (int mu = 0; mu < 4; ++mu) {
    Mat2<Jet1> k = ud * lower_partial(s.u, mu);
    for (auto& z : k.e) z = times_i(z);
    const Mat2<Jet1> anti = k - adjoint(k);
    for (const auto& z : anti.e) {
      out.hermiticity_residual =
          std::max(out.hermiticity_residual, std::hypot(primal(z.re), primal(z.im)));
    }
    f.w[mu] = pauli_components(k);

    const Cplx<Jet1> c = times_i(inner(f.phi, lower_partial(phi, mu)));
    out.current_imaginary_residual =
        std::max(out.current_imaginary_residual, std::abs(primal(c.im)));
    f.j[mu] = c.re - f.a_mu[mu] * params.e + dot(f.n, f.w[mu]) * 0.5;
    f.x[mu] = f.w[mu] - f.n * (f.j[mu] * 2.0);
  }
  return out;
}

Vec3d magnetic_field(const std::array<Jet1, 4>& a_mu, const SimulationParams& params) {
  // H_i = ε_ijk ∂_j A_k with spatial index i ↔ μ = i + 1.
  Vec3d h;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    h[i] = a_mu[k + 1].d[j + 1] - a_mu[j + 1].d[k + 1] + params.h_ext[i];
  }
  return h;
}

}  // namespace spincharge
