#include "spincharge/faddeev.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "spincharge/summation.hpp"
#include "spincharge/topology.hpp"

namespace spincharge {

namespace {

constexpr std::size_t kGhost = std::numeric_limits<std::size_t>::max();

// Visits every forward-difference base site. On vacuum-padded grids the base
// range includes the ghost layer at -1 so links into the grid are counted.
template <class Fn>
void for_each_base(const LatticeGrid& g, Fn fn) {
  const int lo = g.boundary() == Boundary::vacuum_padded ? -1 : 0;
  for (int x = lo; x < g.dim(0); ++x)
    for (int y = lo; y < g.dim(1); ++y)
      for (int z = lo; z < g.dim(2); ++z) fn(Site{x, y, z});
}

std::size_t index_or_ghost(const LatticeGrid& g, const Site& s) {
  const Site w = g.wrap(s);
  return g.contains(w) ? g.index(w) : kGhost;
}

struct Coefficients {
  double rho_grad;  // a/2m
  double e2;        // a/8m (times ρ²)
  double e4;        // 2/(16 e² a) per plaquette, ordered pairs folded into i<j
  double zeeman;    // g e a³/4m (times ρ²)
};

// Oriented area of the plaquette n0, n1, n2, n3 on the sphere (two triangles).
double plaquette_area(const Vec3d& n0, const Vec3d& n1, const Vec3d& n2, const Vec3d& n3) {
  auto tri = [](const Vec3d& a, const Vec3d& b, const Vec3d& c) {
    return 2.0 * std::atan2(triple(a, b, c), 1.0 + dot(a, b) + dot(b, c) + dot(c, a));
  };
  return tri(n0, n1, n2) + tri(n0, n2, n3);
}

// Adds w·∂Ω/∂(a, b, c) for Ω = 2 atan2(T, D) of one triangle.
void triangle_area_gradient(const Vec3d& a, const Vec3d& b, const Vec3d& c, double w,
                            Vec3d& ga, Vec3d& gb, Vec3d& gc) {
  const double t = triple(a, b, c);
  const double d = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  const double q = t * t + d * d;
  if (q < 1e-300) return;
  const double f = 2.0 * w / q;
  ga = ga + (cross(b, c) * d - (b + c) * t) * f;
  gb = gb + (cross(c, a) * d - (c + a) * t) * f;
  gc = gc + (cross(a, b) * d - (a + b) * t) * f;
}

// Squared geodesic angle θ² = (2 asin(|d|/2))² for the link difference d = n1 - n0.
double link_angle2(const Vec3d& d) {
  const double c = std::min(norm(d), 2.0);
  const double th = 2.0 * std::asin(0.5 * c);
  return th * th;
}

// ∂θ²/∂d = (2θ / (c sqrt(1 - c²/4))) d; tends to 2d as c → 0.
Vec3d link_angle2_gradient(const Vec3d& d) {
  const double c = norm(d);
  if (c < 1e-6) return d * (2.0 + c * c / 3.0);
  const double cc = std::min(c, 2.0 - 1e-12);
  const double th = 2.0 * std::asin(0.5 * cc);
  return d * (2.0 * th / (cc * std::sqrt(1.0 - 0.25 * cc * cc)));
}

Coefficients coefficients(const FaddeevConfig& c) {
  const double a = c.n.grid().spacing();
  const SimulationParams& p = c.params;
  return {a / (2.0 * p.m), a / (8.0 * p.m), 2.0 / (16.0 * p.e * p.e * a),
          p.g * p.e * a * a * a / (4.0 * p.m)};
}

}  // namespace

FaddeevConfig FaddeevConfig::with_constant_rho(DirectorField n, double rho, SimulationParams params) {
  ScalarField r(n.grid(), rho);
  return {std::move(n), std::move(r), params};
}

FaddeevEnergy faddeev_energy(const FaddeevConfig& c) {
  const LatticeGrid& g = c.n.grid();
  const Coefficients k = coefficients(c);
  CompensatedSum rho_sum, e2_sum, e4_sum, z_sum;
  for_each_base(g, [&](const Site& s) {
    const Vec3d& n0 = c.n.at(s);
    const double r0 = c.rho.at(s);
    for (int ax = 0; ax < 3; ++ax) {
      const Site t = g.shifted(s, ax, 1);
      const double dr = c.rho.at(t) - r0;
      rho_sum += k.rho_grad * dr * dr;
      e2_sum += k.e2 * r0 * r0 * link_angle2(c.n.at(t) - n0);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const Site si = g.shifted(s, i, 1);
        const double f = plaquette_area(n0, c.n.at(si), c.n.at(g.shifted(si, j, 1)),
                                        c.n.at(g.shifted(s, j, 1)));
        e4_sum += k.e4 * f * f;
      }
    }
    if (g.contains(s)) z_sum += k.zeeman * r0 * r0 * dot(c.params.h_ext, n0);
  });
  FaddeevEnergy e;
  e.rho = rho_sum.value();
  e.e2 = e2_sum.value();
  e.e4 = e4_sum.value();
  e.zeeman = z_sum.value();
  e.total = e.rho + e.e2 + e.e4 + e.zeeman;
  return e;
}

Vec3Field faddeev_gradient(const FaddeevConfig& c) {
  const LatticeGrid& g = c.n.grid();
  const Coefficients k = coefficients(c);
  Vec3Field grad(g, Vec3d{0.0, 0.0, 0.0});
  auto add = [&](std::size_t idx, const Vec3d& v) {
    if (idx != kGhost) grad[idx] = grad[idx] + v;
  };
  for_each_base(g, [&](const Site& s) {
    const std::size_t i0 = index_or_ghost(g, s);
    const Vec3d& n0 = c.n.at(s);
    const double r0 = c.rho.at(s);
    for (int ax = 0; ax < 3; ++ax) {
      const Site t = g.shifted(s, ax, 1);
      const Vec3d d = link_angle2_gradient(c.n.at(t) - n0) * (k.e2 * r0 * r0);
      add(index_or_ghost(g, t), d);
      add(i0, -d);
    }
    for (int i = 0; i < 3; ++i) {
      for (int j = i + 1; j < 3; ++j) {
        const Site s1 = g.shifted(s, i, 1);
        const Site s2 = g.shifted(s1, j, 1);
        const Site s3 = g.shifted(s, j, 1);
        const Vec3d& n1 = c.n.at(s1);
        const Vec3d& n2 = c.n.at(s2);
        const Vec3d& n3 = c.n.at(s3);
        const double w = 2.0 * k.e4 * plaquette_area(n0, n1, n2, n3);
        std::array<Vec3d, 4> gq{};
        triangle_area_gradient(n0, n1, n2, w, gq[0], gq[1], gq[2]);
        triangle_area_gradient(n0, n2, n3, w, gq[0], gq[2], gq[3]);
        add(i0, gq[0]);
        add(index_or_ghost(g, s1), gq[1]);
        add(index_or_ghost(g, s2), gq[2]);
        add(index_or_ghost(g, s3), gq[3]);
      }
    }
    if (i0 != kGhost) add(i0, c.params.h_ext * (k.zeeman * r0 * r0));
  });
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3d& n = c.n[i];
    grad[i] = grad[i] - n * dot(grad[i], n);
  }
  return grad;
}

ScalarField faddeev_rho_gradient(const FaddeevConfig& c) {
  const LatticeGrid& g = c.n.grid();
  const Coefficients k = coefficients(c);
  ScalarField grad(g, 0.0);
  auto add = [&](std::size_t idx, double v) {
    if (idx != kGhost) grad[idx] += v;
  };
  for_each_base(g, [&](const Site& s) {
    const std::size_t i0 = index_or_ghost(g, s);
    const Vec3d& n0 = c.n.at(s);
    const double r0 = c.rho.at(s);
    double stiff = 0.0;
    for (int ax = 0; ax < 3; ++ax) {
      const Site t = g.shifted(s, ax, 1);
      const double dr = c.rho.at(t) - r0;
      add(index_or_ghost(g, t), 2.0 * k.rho_grad * dr);
      add(i0, -2.0 * k.rho_grad * dr);
      stiff += link_angle2(c.n.at(t) - n0);
    }
    add(i0, 2.0 * k.e2 * r0 * stiff);
    if (i0 != kGhost) add(i0, 2.0 * k.zeeman * r0 * dot(c.params.h_ext, n0));
  });
  return grad;
}

double gradient_norm(const Vec3Field& gradient) {
  CompensatedSum acc;
  for (const Vec3d& v : gradient.values()) acc += dot(v, v);
  return std::sqrt(acc.value() / gradient.grid().volume_element());
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged:
      return "converged";
    case Termination::max_steps:
      return "max_steps";
    case Termination::charge_jump:
      return "charge_jump";
    case Termination::stalled:
      return "stalled";
  }
  return "unknown";
}

namespace {

FaddeevConfig step_config(const FaddeevConfig& c, const Vec3Field& grad, const ScalarField* rho_grad,
                          double tau) {
  const double inv_vol = 1.0 / c.n.grid().volume_element();
  FaddeevConfig out = c;
  for (std::size_t i = 0; i < c.n.size(); ++i) {
    out.n[i] = normalized(c.n[i] - grad[i] * (tau * inv_vol));
  }
  if (rho_grad != nullptr) {
    for (std::size_t i = 0; i < c.rho.size(); ++i) {
      out.rho[i] = std::max(0.0, c.rho[i] - (*rho_grad)[i] * (tau * inv_vol));
    }
  }
  return out;
}

// nullopt when the field no longer admits a periodic potential (a plaquette
// flux jumped by 4π), which is a change of topology.
std::optional<long> checked_hopf(const DirectorField& n) {
  try {
    return hopf_charge(n).rounded;
  } catch (const TopologyError&) {
    return std::nullopt;
  }
}

}  // namespace

RelaxationResult relax(FaddeevConfig initial, const RelaxSchedule& schedule,
                       const RelaxObserver& observer) {
  initial.params.validate();
  if (initial.n.max_norm_defect() > 1e-12) initial.n.normalize();

  RelaxationResult r;
  FaddeevConfig cur = std::move(initial);
  FaddeevEnergy energy = faddeev_energy(cur);
  Vec3Field grad = faddeev_gradient(cur);
  ScalarField rho_grad;
  if (schedule.relax_rho) rho_grad = faddeev_rho_gradient(cur);
  double gnorm = gradient_norm(grad);
  const long charge0 = hopf_charge(cur.n).rounded;

  r.energy_trace.push_back(energy.total);
  r.hopf_trace.push_back(charge0);
  r.trace.push_back({0, energy.total, energy.e2, energy.e4, gnorm, 0.0, charge0});

  double tau = schedule.initial_step;
  r.termination = Termination::max_steps;
  if (gnorm < schedule.tolerance) r.termination = Termination::converged;

  while (r.termination == Termination::max_steps && r.accepted_steps < schedule.max_steps) {
    // Backtrack until the energy strictly decreases.
    FaddeevConfig trial;
    FaddeevEnergy trial_energy;
    bool accepted = false;
    double t = tau;
    for (int b = 0; b <= schedule.max_backtracks; ++b) {
      trial = step_config(cur, grad, schedule.relax_rho ? &rho_grad : nullptr, t);
      trial_energy = faddeev_energy(trial);
      if (trial_energy.total < energy.total) {
        accepted = true;
        break;
      }
      ++r.rejected_trials;
      t *= 0.5;
    }
    if (!accepted) {
      r.termination = Termination::stalled;
      break;
    }

    const Vec3Field new_grad = faddeev_gradient(trial);
    ScalarField new_rho_grad;
    if (schedule.relax_rho) new_rho_grad = faddeev_rho_gradient(trial);

    // Barzilai-Borwein trial step for the next iteration: τ = <s,s>/<s,y>
    // with s the change of n and y the change of the functional derivative.
    double next_tau = t;
    if (schedule.barzilai_borwein) {
      const double inv_vol = 1.0 / cur.n.grid().volume_element();
      CompensatedSum ss, sy;
      for (std::size_t i = 0; i < cur.n.size(); ++i) {
        const Vec3d s = trial.n[i] - cur.n[i];
        const Vec3d y = (new_grad[i] - grad[i]) * inv_vol;
        ss += dot(s, s);
        sy += dot(s, y);
      }
      if (sy.value() > 0.0) next_tau = ss.value() / sy.value();
      next_tau = std::clamp(next_tau, 1e-3 * t, 1e3 * t);
    } else {
      next_tau = std::min(2.0 * t, schedule.initial_step);
    }

    cur = std::move(trial);
    energy = trial_energy;
    grad = new_grad;
    rho_grad = std::move(new_rho_grad);
    gnorm = gradient_norm(grad);
    tau = next_tau;
    ++r.accepted_steps;

    TraceRecord rec{r.accepted_steps, energy.total, energy.e2, energy.e4, gnorm, t, std::nullopt};
    if (schedule.hopf_every > 0 && r.accepted_steps % schedule.hopf_every == 0) {
      const std::optional<long> q = checked_hopf(cur.n);
      rec.hopf = q;
      if (q) r.hopf_trace.push_back(*q);
      if (q != charge0) r.termination = Termination::charge_jump;
    }
    r.energy_trace.push_back(energy.total);
    r.trace.push_back(rec);
    if (observer) observer(rec, cur);
    if (r.termination == Termination::max_steps && gnorm < schedule.tolerance) {
      r.termination = Termination::converged;
    }
  }

  r.final_energy = energy;
  r.final_gradient_norm = gnorm;
  r.virial_ratio = energy.e4 != 0.0 ? energy.e2 / energy.e4 : 0.0;
  r.final_config = std::move(cur);
  return r;
}

DirectorField toroidal_ansatz(int p, int q, double scale, const LatticeGrid& grid) {
  if (p == 0 || q == 0) throw std::invalid_argument("toroidal_ansatz: p and q must be nonzero");
  if (!(scale > 0.0)) throw std::invalid_argument("toroidal_ansatz: scale must be positive");
  using cd = std::complex<double>;
  auto ipow = [](cd z, int k) {
    cd r(1.0, 0.0);
    const cd base = k >= 0 ? z : 1.0 / z;
    for (int i = 0; i < std::abs(k); ++i) r *= base;
    return r;
  };
  DirectorField n(grid, Vec3d{0.0, 0.0, 1.0});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3d x = grid.position(grid.site(i));
    const double r = norm(x);
    if (r >= scale) {
      n[i] = {0.0, 0.0, 1.0};
      continue;
    }
    const double f = M_PI * (1.0 - r / scale) * (1.0 - r / scale);
    const double sf = std::sin(f);
    const cd z1 = r > 0.0 ? cd(x[0], x[1]) / r * sf : cd(0.0, 0.0);
    const cd z0 = r > 0.0 ? cd(std::cos(f), -x[2] / r * sf) : cd(std::cos(f), 0.0);
    // n = Hopf projection of (Z₁^p, Z₀^q) ∝ (1, W); avoids dividing by Z₀.
    const cd u = ipow(z0, q);
    const cd v = ipow(z1, p);
    const double uu = std::norm(u);
    const double vv = std::norm(v);
    const cd cross_term = std::conj(u) * v;
    const double den = uu + vv;
    n[i] = Vec3d{2.0 * cross_term.real() / den, 2.0 * cross_term.imag() / den, (uu - vv) / den};
    n[i] = normalized(n[i]);
  }
  return n;
}

DirectorField mirror_z(const DirectorField& n) {
  const LatticeGrid& g = n.grid();
  DirectorField out(g, n.vacuum());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Site s = g.site(i);
    s[2] = g.dim(2) - 1 - s[2];
    out[i] = n.at(s);
  }
  return out;
}

}  // namespace spincharge
