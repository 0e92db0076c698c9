#include "spincharge/topology.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <tuple>
#include <unordered_map>

#include "spincharge/summation.hpp"

namespace spincharge {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kFourPi = 4.0 * kPi;

Tensor4 thooft_from_parts(const Vec3d& n, const std::array<Vec3d, 4>& x,
                          const std::array<Vec3d, 4>& dn,
                          const std::array<std::array<Vec3d, 4>, 4>& dx) {
  // dx[mu][nu] = ∂_μ X_ν, dn[mu] = ∂_μ n
  std::array<Vec3d, 4> cov;
  for (int mu = 0; mu < 4; ++mu) cov[mu] = dn[mu] + cross(x[mu], n);
  Tensor4 f{};
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = mu + 1; nu < 4; ++nu) {
      const Vec3d g = dx[mu][nu] - dx[nu][mu] + cross(x[mu], x[nu]);
      const double v = dot(g, n) - triple(n, cov[mu], cov[nu]);
      f[mu][nu] = v;
      f[nu][mu] = -v;
    }
  }
  return f;
}

Site offset(Site s, int axis, int steps) {
  s[axis] += steps;
  return s;
}

}  // namespace

Tensor4 thooft_tensor(const Vec3<Jet1>& n, const std::array<Vec3<Jet1>, 4>& x) {
  Vec3d nv;
  std::array<Vec3d, 4> xv;
  std::array<Vec3d, 4> dn;
  std::array<std::array<Vec3d, 4>, 4> dx;
  for (int a = 0; a < 3; ++a) {
    nv[a] = n[a].v;
    for (int mu = 0; mu < 4; ++mu) {
      dn[mu][a] = n[a].d[mu];
      xv[mu][a] = x[mu][a].v;
      for (int nu = 0; nu < 4; ++nu) dx[mu][nu][a] = x[nu][a].d[mu];
    }
  }
  return thooft_from_parts(nv, xv, dn, dx);
}

Tensor4 thooft_tensor(const PointFields<Jet1>& fields) { return thooft_tensor(fields.n, fields.x); }

Tensor4 thooft_tensor(const DirectorField& n, const LatticeField<std::array<Vec3d, 4>>& x,
                      const Site& site) {
  const LatticeGrid& g = n.grid();
  const double inv = 0.5 / g.spacing();
  std::array<Vec3d, 4> dn{};
  std::array<std::array<Vec3d, 4>, 4> dx{};
  for (int k = 0; k < 3; ++k) {
    const Site up = g.shifted(site, k, 1);
    const Site down = g.shifted(site, k, -1);
    dn[k + 1] = (n.at(up) - n.at(down)) * inv;
    for (int nu = 0; nu < 4; ++nu) dx[k + 1][nu] = (x.at(up)[nu] - x.at(down)[nu]) * inv;
  }
  return thooft_from_parts(n.at(site), x.at(site), dn, dx);
}

Tensor4 thooft_tensor(const SpinChargeFields& scf, const Site& site) {
  if (!scf.has_connections) throw TopologyError("thooft_tensor: connection fields not computed");
  if (scf.masked(scf.grid.index(site))) throw TopologyError("thooft_tensor: masked site");
  return thooft_tensor(scf.n, scf.x_mu, site);
}

double solid_angle(const Vec3d& a, const Vec3d& b, const Vec3d& c, bool* degenerate) {
  const double num = triple(a, b, c);
  const double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  if (degenerate != nullptr && std::abs(num) < 1e-12 && den < 1e-12) *degenerate = true;
  return 2.0 * std::atan2(num, den);
}

double plaquette_solid_angle(const DirectorField& n, const Site& x, int k, bool* degenerate) {
  const int i = (k + 1) % 3;
  const int j = (k + 2) % 3;
  const Vec3d& n1 = n.at(x);
  const Vec3d& n2 = n.at(offset(x, i, 1));
  const Vec3d& n3 = n.at(offset(offset(x, i, 1), j, 1));
  const Vec3d& n4 = n.at(offset(x, j, 1));
  return solid_angle(n1, n2, n3, degenerate) + solid_angle(n1, n3, n4, degenerate);
}

LatticeField<Vec3d> plaquette_flux_density(const DirectorField& n) {
  const LatticeGrid& g = n.grid();
  const double inv_area = 1.0 / (g.spacing() * g.spacing());
  LatticeField<Vec3d> b(g, Vec3d{0.0, 0.0, 0.0});
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Site s = g.site(idx);
    for (int k = 0; k < 3; ++k) b[idx][k] = plaquette_solid_angle(n, s, k) * inv_area;
  }
  return b;
}

// ---------------------------------------------------------------------------
// Spectral Hopf charge

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

DirectorField periodic_embedding(const DirectorField& n, int padding) {
  const LatticeGrid& g = n.grid();
  if (g.boundary() == Boundary::periodic) return n;
  const int shift = 1 + padding;
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) dims[a] = g.dim(a) + 2 * shift;
  DirectorField out(LatticeGrid(dims, g.spacing(), Boundary::periodic), n.vacuum());
  for (auto& v : out.values()) v = n.vacuum();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Site s = g.site(i);
    for (int a = 0; a < 3; ++a) s[a] += shift;
    out.at(s) = n[i];
  }
  return out;
}

}  // namespace

HopfResult hopf_charge(const DirectorField& n, const HopfOptions& options) {
  const DirectorField box = periodic_embedding(n, std::max(0, options.padding));
  const LatticeGrid& g = box.grid();
  const int n0 = g.dim(0);
  const int n1 = g.dim(1);
  const int n2 = g.dim(2);
  const double a = g.spacing();
  HopfResult result;
  result.box = g.dims();

  // Plaquette fluxes (solid angles, not yet divided by a²).
  std::vector<Vec3d> flux(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Site s = g.site(i);
    for (int k = 0; k < 3; ++k) flux[i][k] = plaquette_solid_angle(box, s, k);
  }

  // Net flux through every coordinate plane, and monopole cubes.
  for (int k = 0; k < 3; ++k) {
    std::vector<CompensatedSum> planes(g.dim(k));
    for (std::size_t i = 0; i < g.size(); ++i) planes[g.site(i)[k]] += flux[i][k];
    for (const auto& p : planes) result.max_plane_flux = std::max(result.max_plane_flux, std::abs(p.value()));
  }
  if (result.max_plane_flux > kTwoPi) {
    throw TopologyError("hopf_charge: net flux through a periodic plane; no periodic potential");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Site s = g.site(i);
    double div = 0.0;
    for (int k = 0; k < 3; ++k) div += flux[g.index(g.shifted(s, k, 1))][k] - flux[i][k];
    if (std::abs(div) > kTwoPi) throw TopologyError("hopf_charge: monopole present");
  }

  const std::size_t nreal = g.size();
  const std::size_t ncomplex = static_cast<std::size_t>(n0) * n1 * (n2 / 2 + 1);
  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * nreal)));
  std::array<std::unique_ptr<fftw_complex, FftwFree>, 3> bhat;
  for (auto& p : bhat) {
    p.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * ncomplex)));
  }
  for (int k = 0; k < 3; ++k) {
    fftw_plan plan = fftw_plan_dft_r2c_3d(n0, n1, n2, in.get(), bhat[k].get(), FFTW_ESTIMATE);
    for (std::size_t i = 0; i < nreal; ++i) in.get()[i] = flux[i][k] / (a * a);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  using cd = std::complex<double>;
  const std::array<int, 3> dims{n0, n1, n2};
  CompensatedSum acc;
  for (int m0 = 0; m0 < n0; ++m0) {
    for (int m1 = 0; m1 < n1; ++m1) {
      for (int m2 = 0; m2 <= n2 / 2; ++m2) {
        const std::array<int, 3> m{m0, m1, m2};
        if (m0 == 0 && m1 == 0 && m2 == 0) continue;
        const std::size_t idx = (static_cast<std::size_t>(m0) * n1 + m1) * (n2 / 2 + 1) + m2;
        std::array<double, 3> kv{};
        std::array<cd, 3> d{};
        std::array<cd, 3> b{};
        double d2 = 0.0;
        for (int j = 0; j < 3; ++j) {
          // Centred wave numbers; the half-site shift below is not periodic in k.
          const int mc = 2 * m[j] > dims[j] ? m[j] - dims[j] : m[j];
          kv[j] = kTwoPi * mc / (dims[j] * a);
          d[j] = (std::exp(cd(0.0, kv[j] * a)) - 1.0) / a;
          d2 += std::norm(d[j]);
          b[j] = cd(bhat[j].get()[idx][0], bhat[j].get()[idx][1]);
        }
        // Ĉ = -(D* × B̂)/|D|²
        std::array<cd, 3> c{};
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3;
          const int k = (i + 2) % 3;
          c[i] = -(std::conj(d[j]) * b[k] - std::conj(d[k]) * b[j]) / d2;
        }
        // C_i sits at x + e_i/2, B_i at x + (e_j + e_k)/2; shift B onto C.
        double term = 0.0;
        for (int i = 0; i < 3; ++i) {
          const int j = (i + 1) % 3;
          const int k = (i + 2) % 3;
          const double shift = 0.5 * a * (kv[i] - kv[j] - kv[k]);
          term += std::real(std::conj(c[i]) * b[i] * std::exp(cd(0.0, shift)));
        }
        const bool self_conjugate = m2 == 0 || (n2 % 2 == 0 && m2 == n2 / 2);
        acc += self_conjugate ? term : 2.0 * term;
      }
    }
  }
  const double volume_factor = a * a * a / static_cast<double>(nreal);
  result.raw = acc.value() * volume_factor / (16.0 * kPi * kPi);
  result.rounded = std::lround(result.raw);
  return result;
}

// ---------------------------------------------------------------------------
// Preimage linking

namespace {

using FaceKey = std::array<std::int64_t, 3>;

struct Segment {
  Vec3d start;
  Vec3d end;
  FaceKey start_key;
  FaceKey end_key;
};

struct Vertex {
  std::int64_t id;
  Vec3d pos;  // lattice coordinates
  Vec3d n;
};

// Face crossing: point on triangle where (f_a, f_b) = 0.
bool face_crossing(const std::array<const Vertex*, 3>& tri, const Vec3d& e1, const Vec3d& e2,
                   const Vec3d& value, Vec3d* point, double* g) {
  const Vertex& A = *tri[0];
  const Vertex& B = *tri[1];
  const Vertex& C = *tri[2];
  const double fa0 = dot(A.n, e1), fb0 = dot(A.n, e2);
  const double u0 = dot(B.n, e1) - fa0, u1 = dot(B.n, e2) - fb0;
  const double w0 = dot(C.n, e1) - fa0, w1 = dot(C.n, e2) - fb0;
  const double det = u0 * w1 - u1 * w0;
  if (det == 0.0) return false;
  const double s = (-fa0 * w1 + fb0 * w0) / det;
  const double t = (-u0 * fb0 + u1 * fa0) / det;
  if (s < 0.0 || t < 0.0 || s + t > 1.0) return false;
  *point = A.pos + (B.pos - A.pos) * s + (C.pos - A.pos) * t;
  const double ga = dot(A.n, value);
  *g = ga + (dot(B.n, value) - ga) * s + (dot(C.n, value) - ga) * t;
  return true;
}

Vec3d solve3(const std::array<Vec3d, 3>& rows, const Vec3d& rhs) {
  // rows[r] · x = rhs[r]
  Mat3d m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = rows[r][c];
  const double d = det(m);
  Vec3d x;
  for (int c = 0; c < 3; ++c) {
    Mat3d mc = m;
    for (int r = 0; r < 3; ++r) mc(r, c) = rhs[r];
    x[c] = det(mc) / d;
  }
  return x;
}

}  // namespace

std::vector<Polyline> preimage_curves(const DirectorField& n, const Vec3d& value_in,
                                      std::string* failure, std::size_t* segment_count) {
  const Vec3d value = normalized(value_in);
  // Orthonormal (e1, e2, value) right-handed.
  const Vec3d helper = std::abs(value[0]) < 0.9 ? Vec3d{1.0, 0.0, 0.0} : Vec3d{0.0, 1.0, 0.0};
  const Vec3d e1 = normalized(helper - value * dot(helper, value));
  const Vec3d e2 = cross(value, e1);

  const LatticeGrid& g = n.grid();
  const bool padded = g.boundary() == Boundary::vacuum_padded;
  const int lo = padded ? -1 : 0;
  std::array<int, 3> hi{};
  for (int a = 0; a < 3; ++a) hi[a] = g.dim(a) - (padded ? 0 : 1);
  // Vertex ids over the (possibly ghost-extended) box [lo, hi].
  std::array<std::int64_t, 3> span{};
  for (int a = 0; a < 3; ++a) span[a] = hi[a] - lo + 1;
  auto vertex = [&](const Site& s) {
    Vertex v;
    v.id = ((static_cast<std::int64_t>(s[0] - lo) * span[1]) + (s[1] - lo)) * span[2] + (s[2] - lo);
    v.pos = {static_cast<double>(s[0]), static_cast<double>(s[1]), static_cast<double>(s[2])};
    v.n = n.at(s);
    return v;
  };

  static const std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<Segment> segments;
  std::string fail;
  for (int x = lo; x < hi[0]; ++x) {
    for (int y = lo; y < hi[1]; ++y) {
      for (int z = lo; z < hi[2]; ++z) {
        const Site base{x, y, z};
        for (const auto& p : perms) {
          std::array<Vertex, 4> tet;
          Site c = base;
          tet[0] = vertex(c);
          for (int q = 0; q < 3; ++q) {
            c[p[q]] += 1;
            tet[q + 1] = vertex(c);
          }
          // f_a and f_b must change sign within the tetrahedron.
          bool sa_pos = false, sa_neg = false, sb_pos = false, sb_neg = false;
          for (const Vertex& v : tet) {
            const double fa = dot(v.n, e1), fb = dot(v.n, e2);
            sa_pos |= fa >= 0.0;
            sa_neg |= fa <= 0.0;
            sb_pos |= fb >= 0.0;
            sb_neg |= fb <= 0.0;
          }
          if (!(sa_pos && sa_neg && sb_pos && sb_neg)) continue;

          std::vector<std::pair<Vec3d, FaceKey>> hits;
          std::vector<double> gs;
          for (int omit = 0; omit < 4; ++omit) {
            std::array<const Vertex*, 3> tri{};
            int t = 0;
            for (int q = 0; q < 4; ++q) {
              if (q != omit) tri[t++] = &tet[q];
            }
            std::sort(tri.begin(), tri.end(),
                      [](const Vertex* l, const Vertex* r) { return l->id < r->id; });
            Vec3d pt;
            double gv = 0.0;
            if (face_crossing(tri, e1, e2, value, &pt, &gv)) {
              hits.push_back({pt, FaceKey{tri[0]->id, tri[1]->id, tri[2]->id}});
              gs.push_back(gv);
            }
          }
          if (hits.empty()) continue;
          if (hits.size() != 2) {
            if (fail.empty()) fail = "degenerate tetrahedron crossing";
            continue;
          }
          if ((gs[0] > 0.0) != (gs[1] > 0.0)) {
            if (fail.empty()) fail = "preimage sign ambiguous within a tetrahedron";
            continue;
          }
          if (gs[0] <= 0.0) continue;  // preimage of -value

          // Orientation along ∇f_a × ∇f_b.
          std::array<Vec3d, 3> edges;
          Vec3d dfa;
          Vec3d dfb;
          for (int q = 0; q < 3; ++q) {
            edges[q] = tet[q + 1].pos - tet[0].pos;
            dfa[q] = dot(tet[q + 1].n, e1) - dot(tet[0].n, e1);
            dfb[q] = dot(tet[q + 1].n, e2) - dot(tet[0].n, e2);
          }
          const Vec3d ga = solve3(edges, dfa);
          const Vec3d gb = solve3(edges, dfb);
          const Vec3d tangent = cross(ga, gb);
          Segment seg{hits[0].first, hits[1].first, hits[0].second, hits[1].second};
          if (dot(seg.end - seg.start, tangent) < 0.0) {
            std::swap(seg.start, seg.end);
            std::swap(seg.start_key, seg.end_key);
          }
          segments.push_back(seg);
        }
      }
    }
  }
  if (segment_count != nullptr) *segment_count = segments.size();

  std::map<FaceKey, std::size_t> by_start;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!by_start.emplace(segments[i].start_key, i).second && fail.empty()) {
      fail = "preimage curve branches";
    }
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<Polyline> curves;
  for (std::size_t first = 0; first < segments.size(); ++first) {
    if (used[first]) continue;
    Polyline curve;
    std::size_t cur = first;
    bool closed = false;
    while (true) {
      used[cur] = true;
      curve.push_back(segments[cur].start);
      const auto it = by_start.find(segments[cur].end_key);
      if (it == by_start.end()) break;
      if (it->second == first) {
        closed = true;
        break;
      }
      if (used[it->second]) break;
      cur = it->second;
    }
    if (!closed && fail.empty()) fail = "preimage curve does not close (lattice too coarse?)";
    curves.push_back(std::move(curve));
  }
  if (failure != nullptr) *failure = fail;
  return curves;
}

double gauss_linking(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
  auto unit_cross = [](const Vec3d& p, const Vec3d& q, bool* ok) {
    const Vec3d c = cross(p, q);
    const double l = norm(c);
    if (l == 0.0) {
      *ok = false;
      return c;
    }
    return c * (1.0 / l);
  };
  auto clamp_asin = [](double x) { return std::asin(std::clamp(x, -1.0, 1.0)); };
  CompensatedSum acc;
  for (const Polyline& ca : a) {
    for (std::size_t i = 0; i < ca.size(); ++i) {
      const Vec3d& r1 = ca[i];
      const Vec3d& r2 = ca[(i + 1) % ca.size()];
      for (const Polyline& cb : b) {
        for (std::size_t j = 0; j < cb.size(); ++j) {
          const Vec3d& r3 = cb[j];
          const Vec3d& r4 = cb[(j + 1) % cb.size()];
          const Vec3d r13 = r3 - r1, r14 = r4 - r1, r23 = r3 - r2, r24 = r4 - r2;
          bool ok = true;
          const Vec3d n1 = unit_cross(r13, r14, &ok);
          const Vec3d n2 = unit_cross(r14, r24, &ok);
          const Vec3d n3 = unit_cross(r24, r23, &ok);
          const Vec3d n4 = unit_cross(r23, r13, &ok);
          if (!ok) continue;
          const double omega = clamp_asin(dot(n1, n2)) + clamp_asin(dot(n2, n3)) +
                               clamp_asin(dot(n3, n4)) + clamp_asin(dot(n4, n1));
          const double sign = dot(cross(r4 - r3, r2 - r1), r13);
          if (sign == 0.0) continue;
          acc += sign > 0.0 ? omega : -omega;
        }
      }
    }
  }
  return acc.value() / kFourPi;
}

LinkingResult hopf_charge_oracle(const DirectorField& n) {
  // Generic (non-axial) regular values avoid accidental lattice symmetries.
  const Vec3d a = normalized(Vec3d{1.0, 0.0123, -0.0071});
  return hopf_charge_oracle(n, a, -a);
}

LinkingResult hopf_charge_oracle(const DirectorField& n, const Vec3d& value_a,
                                 const Vec3d& value_b) {
  LinkingResult r;
  std::string fa;
  std::string fb;
  const auto ca = preimage_curves(n, value_a, &fa, &r.segments_a);
  const auto cb = preimage_curves(n, value_b, &fb, &r.segments_b);
  r.curves_a = ca.size();
  r.curves_b = cb.size();
  if (!fa.empty() || !fb.empty()) {
    r.failure = !fa.empty() ? fa : fb;
    return r;
  }
  r.raw = gauss_linking(ca, cb);
  r.linking = std::lround(r.raw);
  if (std::abs(r.raw - static_cast<double>(r.linking)) > 1e-6) {
    r.failure = "non-integer linking number";
    return r;
  }
  r.ok = true;
  return r;
}

// ---------------------------------------------------------------------------
// Vortices

double branch_reduce(double dphi) {
  double r = std::remainder(dphi, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

namespace {

bool plaquette_in_range(const LatticeGrid& g, const Site& s, int i, int j) {
  if (g.boundary() == Boundary::periodic) return true;
  return s[i] + 1 < g.dim(i) && s[j] + 1 < g.dim(j);
}

std::array<Site, 4> plaquette_corners(const LatticeGrid& g, const Site& s, int k) {
  const int i = (k + 1) % 3;
  const int j = (k + 2) % 3;
  return {s, g.shifted(s, i, 1), g.shifted(g.shifted(s, i, 1), j, 1), g.shifted(s, j, 1)};
}

template <class PhaseAt, class Undefined>
VortexScan scan_plaquettes(const LatticeGrid& g, VortexComponent component, int only_normal,
                           PhaseAt phase_at, Undefined undefined) {
  VortexScan scan;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Site s = g.site(idx);
    for (int k = 0; k < 3; ++k) {
      if (only_normal >= 0 && k != only_normal) continue;
      if (!plaquette_in_range(g, s, (k + 1) % 3, (k + 2) % 3)) continue;
      ++scan.examined;
      const auto corners = plaquette_corners(g, s, k);
      bool skip = false;
      for (const Site& c : corners) skip |= undefined(c);
      if (skip) {
        ++scan.skipped;
        continue;
      }
      double sum = 0.0;
      for (int q = 0; q < 4; ++q) {
        sum += branch_reduce(phase_at(corners[(q + 1) % 4]) - phase_at(corners[q]));
      }
      const int w = static_cast<int>(std::lround(sum / kTwoPi));
      if (w != 0) scan.vortices.push_back({idx, k, component, w});
    }
  }
  return scan;
}

}  // namespace

VortexScan detect_phase_vortices(const ScalarField& phase, VortexComponent component,
                                 const LatticeField<std::uint8_t>* mask, std::uint8_t mask_bit) {
  return scan_plaquettes(
      phase.grid(), component, -1, [&](const Site& c) { return phase.at(c); },
      [&](const Site& c) { return mask != nullptr && (mask->at(c) & mask_bit) != 0; });
}

VortexScan detect_phase_vortices(const SpinChargeFields& scf) {
  VortexScan out;
  for (int c = 0; c < 2; ++c) {
    ScalarField phase(scf.grid, scf.omega_pm.vacuum()[c]);
    for (std::size_t i = 0; i < scf.grid.size(); ++i) phase[i] = scf.omega_pm[i][c];
    const VortexScan s =
        detect_phase_vortices(phase, c == 0 ? VortexComponent::plus : VortexComponent::minus,
                              &scf.mask, c == 0 ? kMaskPlus : kMaskMinus);
    out.vortices.insert(out.vortices.end(), s.vortices.begin(), s.vortices.end());
    out.skipped += s.skipped;
    out.examined += s.examined;
  }
  return out;
}

VortexScan detect_spin_vortices(const DirectorField& s, int normal_axis) {
  return scan_plaquettes(
      s.grid(), VortexComponent::spin, normal_axis,
      [&](const Site& c) {
        const Vec3d& v = s.at(c);
        return std::atan2(v[1], v[0]);
      },
      [&](const Site& c) {
        const Vec3d& v = s.at(c);
        return std::hypot(v[0], v[1]) < 1e-8;
      });
}

int contour_winding(const ScalarField& phase, int normal_axis, std::array<int, 2> lo,
                    std::array<int, 2> hi, int level) {
  const int i = (normal_axis + 1) % 3;
  const int j = (normal_axis + 2) % 3;
  std::vector<Site> path;
  auto at = [&](int u, int v) {
    Site s{};
    s[normal_axis] = level;
    s[i] = u;
    s[j] = v;
    return s;
  };
  for (int u = lo[0]; u < hi[0]; ++u) path.push_back(at(u, lo[1]));
  for (int v = lo[1]; v < hi[1]; ++v) path.push_back(at(hi[0], v));
  for (int u = hi[0]; u > lo[0]; --u) path.push_back(at(u, hi[1]));
  for (int v = hi[1]; v > lo[1]; --v) path.push_back(at(lo[0], v));
  double sum = 0.0;
  for (std::size_t q = 0; q < path.size(); ++q) {
    sum += branch_reduce(phase.at(path[(q + 1) % path.size()]) - phase.at(path[q]));
  }
  return static_cast<int>(std::lround(sum / kTwoPi));
}

long vortex_boundary_defect(const VortexScan& scan, const LatticeGrid& g) {
  std::vector<std::array<int, 3>> w(g.size(), std::array<int, 3>{0, 0, 0});
  for (const auto& v : scan.vortices) w[v.site][v.normal] += v.winding;
  auto winding = [&](const Site& s, int k) {
    const Site t = g.wrap(s);
    return g.contains(t) ? w[g.index(t)][k] : 0;
  };
  long defect = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const Site s = g.site(idx);
    if (g.boundary() == Boundary::vacuum_padded) {
      bool inside = true;
      for (int a = 0; a < 3; ++a) inside &= s[a] + 1 < g.dim(a);
      if (!inside) continue;
    }
    long div = 0;
    for (int k = 0; k < 3; ++k) div += winding(g.shifted(s, k, 1), k) - winding(s, k);
    defect += std::labs(div);
  }
  return defect;
}

// ---------------------------------------------------------------------------
// Monopoles

MonopoleScan detect_monopoles(const DirectorField& n) {
  const LatticeGrid& g = n.grid();
  const bool padded = g.boundary() == Boundary::vacuum_padded;
  const int lo = padded ? -1 : 0;
  MonopoleScan scan;
  for (int x = lo; x < g.dim(0); ++x) {
    for (int y = lo; y < g.dim(1); ++y) {
      for (int z = lo; z < g.dim(2); ++z) {
        const Site s{x, y, z};
        double flux = 0.0;
        for (int k = 0; k < 3; ++k) {
          bool d1 = false;
          bool d2 = false;
          flux += plaquette_solid_angle(n, offset(s, k, 1), k, &d1) -
                  plaquette_solid_angle(n, s, k, &d2);
          scan.degenerate_faces += static_cast<std::size_t>(d1) + static_cast<std::size_t>(d2);
        }
        const int q = static_cast<int>(std::lround(flux / kFourPi));
        if (q != 0) {
          scan.monopoles.push_back({s, q, flux});
          scan.total_charge += q;
        }
      }
    }
  }
  return scan;
}

double box_surface_flux(const DirectorField& n, const Site& lo, const Site& hi) {
  CompensatedSum acc;
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3;
    const int j = (k + 2) % 3;
    for (int u = lo[i]; u < hi[i]; ++u) {
      for (int v = lo[j]; v < hi[j]; ++v) {
        Site top{};
        top[k] = hi[k];
        top[i] = u;
        top[j] = v;
        Site bottom = top;
        bottom[k] = lo[k];
        acc += plaquette_solid_angle(n, top, k);
        acc += -plaquette_solid_angle(n, bottom, k);
      }
    }
  }
  return acc.value();
}

DefectReport detect_defects(const SpinChargeFields& scf) {
  DefectReport r;
  const VortexScan v = detect_phase_vortices(scf);
  r.vortex_plaquettes = v.vortices;
  r.skipped_plaquettes = v.skipped;
  const MonopoleScan m = detect_monopoles(scf.n);
  r.monopole_cubes = m.monopoles;
  r.degenerate_faces = m.degenerate_faces;
  try {
    const HopfResult h = hopf_charge(scf.n);
    r.raw_hopf = h.raw;
    r.hopf_charge = h.rounded;
    r.hopf_valid = std::abs(h.raw - static_cast<double>(h.rounded)) < 0.5;
  } catch (const TopologyError& e) {
    r.hopf_failure = e.what();
  }
  return r;
}

}  // namespace spincharge
