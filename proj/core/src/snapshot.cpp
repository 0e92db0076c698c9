#include "spincharge/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace spincharge {

namespace {

constexpr char kMagic[4] = {'S', 'C', 'F', '1'};
constexpr char kPsiRe[8] = {'P', 'S', 'I', '_', 'R', 'E', '_', '_'};
constexpr char kPsiIm[8] = {'P', 'S', 'I', '_', 'I', 'M', '_', '_'};
constexpr char kAmu[8] = {'A', '_', 'M', 'U', '_', '_', '_', '_'};
constexpr char kDir[8] = {'D', 'I', 'R', '_', '_', '_', '_', '_'};

template <class T>
void put(std::ostream& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(bytes, sizeof(T));
}

template <class T>
T get(std::istream& in) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw SnapshotError("snapshot: unexpected end of data");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

void put_block(std::ostream& out, const char (&tag)[8], const std::vector<double>& data) {
  out.write(tag, 8);
  for (double v : data) put(out, v);
}

std::vector<double> get_block(std::istream& in, std::size_t count) {
  std::vector<double> data(count);
  for (double& v : data) v = get<double>(in);
  return data;
}

constexpr const char* kDecompositionTags[] = {"RHO_____", "RHO_PM__", "OMEGA_PM", "U_MAT___",
                                              "N_DIR___", "S_DIR___", "W_MU____", "J_MU____"};
constexpr std::size_t kDecompositionWidth[] = {1, 2, 2, 8, 3, 3, 12, 4};

void put_header(std::ostream& out, const LatticeGrid& g) {
  out.write(kMagic, 4);
  for (int k = 0; k < 3; ++k) put(out, static_cast<std::uint32_t>(g.dim(k)));
  put(out, g.spacing());
  put(out, static_cast<std::uint8_t>(g.boundary()));
}

LatticeGrid get_header(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw SnapshotError("snapshot: bad magic (expected SCF1)");
  }
  std::array<int, 3> dims{};
  for (int k = 0; k < 3; ++k) {
    const std::uint32_t d = get<std::uint32_t>(in);
    if (d == 0 || d > (1u << 16)) throw SnapshotError("snapshot: implausible dimension");
    dims[k] = static_cast<int>(d);
  }
  const double spacing = get<double>(in);
  const std::uint8_t boundary = get<std::uint8_t>(in);
  if (boundary > 1) throw SnapshotError("snapshot: unknown boundary flag");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw SnapshotError("snapshot: bad spacing");
  try {
    return make_lattice(dims, spacing, static_cast<Boundary>(boundary));
  } catch (const LatticeError& e) {
    throw SnapshotError(std::string("snapshot: ") + e.what());
  }
}

int block_rank(const std::string& tag) {
  if (tag == std::string(kPsiRe, 8)) return 0;
  if (tag == std::string(kPsiIm, 8)) return 1;
  if (tag == std::string(kAmu, 8)) return 2;
  if (tag == std::string(kDir, 8)) return 3;
  return -1;
}

}  // namespace

PauliField Snapshot::pauli() const {
  if (!psi) throw SnapshotError("snapshot: no PSI blocks");
  PauliField f(grid);
  f.psi = *psi;
  if (a_mu) f.a_mu = *a_mu;
  return f;
}

UnitaryField Snapshot::frame() const {
  if (!dir) return UnitaryField(grid, Mat2<double>::identity());
  return construct_U_from_s(*dir);
}

void write_snapshot(std::ostream& out, const Snapshot& snap) {
  const LatticeGrid& g = snap.grid;
  put_header(out, g);

  const std::size_t n = g.size();
  if (snap.psi) {
    if (!(snap.psi->grid() == g)) throw SnapshotError("snapshot: ψ grid differs from header grid");
    std::vector<double> re, im;
    re.reserve(2 * n);
    im.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < 2; ++c) {
        re.push_back((*snap.psi)[i][c].re);
        im.push_back((*snap.psi)[i][c].im);
      }
    }
    put_block(out, kPsiRe, re);
    put_block(out, kPsiIm, im);
  }
  if (snap.a_mu) {
    if (!(snap.a_mu->grid() == g)) throw SnapshotError("snapshot: A grid differs from header grid");
    std::vector<double> a;
    a.reserve(4 * n);
    for (std::size_t i = 0; i < n; ++i) a.insert(a.end(), (*snap.a_mu)[i].begin(), (*snap.a_mu)[i].end());
    put_block(out, kAmu, a);
  }
  if (snap.dir) {
    if (!(snap.dir->grid() == g)) throw SnapshotError("snapshot: DIR grid differs from header grid");
    std::vector<double> d;
    d.reserve(3 * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (int k = 0; k < 3; ++k) d.push_back((*snap.dir)[i][k]);
    }
    put_block(out, kDir, d);
  }
  if (!out) throw SnapshotError("snapshot: write failed");
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("snapshot: cannot open " + path + " for writing");
  write_snapshot(out, snap);
}

Snapshot read_snapshot(std::istream& in) {
  Snapshot snap;
  snap.grid = get_header(in);
  const LatticeGrid& g = snap.grid;
  const std::size_t n = g.size();

  int last = -1;
  std::vector<double> re;
  while (true) {
    char tag[8];
    in.read(tag, 8);
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != 8) throw SnapshotError("snapshot: truncated block tag");
    const std::string t(tag, 8);
    const int rank = block_rank(t);
    if (rank < 0) throw SnapshotError("snapshot: unknown block tag '" + t + "'");
    if (rank <= last) throw SnapshotError("snapshot: block '" + t + "' out of order or repeated");
    if (rank == 1 && last != 0) throw SnapshotError("snapshot: PSI_IM__ without PSI_RE__");
    if (rank != 1 && last == 0) throw SnapshotError("snapshot: PSI_RE__ without PSI_IM__");
    last = rank;

    switch (rank) {
      case 0:
        re = get_block(in, 2 * n);
        break;
      case 1: {
        const std::vector<double> im = get_block(in, 2 * n);
        LatticeField<Spinor<double>> psi(g, Spinor<double>{});
        for (std::size_t i = 0; i < n; ++i) {
          psi[i] = {Cplx<double>{re[2 * i], im[2 * i]}, Cplx<double>{re[2 * i + 1], im[2 * i + 1]}};
        }
        snap.psi = std::move(psi);
        break;
      }
      case 2: {
        const std::vector<double> a = get_block(in, 4 * n);
        LatticeField<std::array<double, 4>> f(g, std::array<double, 4>{});
        for (std::size_t i = 0; i < n; ++i) f[i] = {a[4 * i], a[4 * i + 1], a[4 * i + 2], a[4 * i + 3]};
        snap.a_mu = std::move(f);
        break;
      }
      case 3: {
        const std::vector<double> d = get_block(in, 3 * n);
        DirectorField f(g);
        for (std::size_t i = 0; i < n; ++i) f[i] = {d[3 * i], d[3 * i + 1], d[3 * i + 2]};
        snap.dir = std::move(f);
        break;
      }
    }
  }
  if (last == 0) throw SnapshotError("snapshot: PSI_RE__ without PSI_IM__");
  return snap;
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("snapshot: cannot open " + path);
  return read_snapshot(in);
}

void write_decomposition(std::ostream& out, const SpinChargeFields& scf) {
  const LatticeGrid& g = scf.grid;
  const std::size_t n = g.size();
  put_header(out, g);
  const int blocks = scf.has_connections ? 8 : 6;
  for (int b = 0; b < blocks; ++b) {
    out.write(kDecompositionTags[b], 8);
    for (std::size_t i = 0; i < n; ++i) {
      switch (b) {
        case 0: put(out, scf.rho[i]); break;
        case 1: for (double v : scf.rho_pm[i]) put(out, v); break;
        case 2: for (double v : scf.omega_pm[i]) put(out, v); break;
        case 3:
          for (const Cplx<double>& z : scf.u[i].e) {
            put(out, z.re);
            put(out, z.im);
          }
          break;
        case 4: for (int k = 0; k < 3; ++k) put(out, scf.n[i][k]); break;
        case 5: for (int k = 0; k < 3; ++k) put(out, scf.s[i][k]); break;
        case 6:
          for (const Vec3d& w : scf.w_mu[i])
            for (int k = 0; k < 3; ++k) put(out, w[k]);
          break;
        case 7: for (double v : scf.j_mu[i]) put(out, v); break;
      }
    }
  }
  if (!out) throw SnapshotError("snapshot: write failed");
}

void write_decomposition(const std::string& path, const SpinChargeFields& scf) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SnapshotError("snapshot: cannot open " + path + " for writing");
  write_decomposition(out, scf);
}

SpinChargeFields read_decomposition(std::istream& in) {
  const LatticeGrid g = get_header(in);
  const std::size_t n = g.size();
  // start from the decomposition of the default field for vacuum values
  SpinChargeFields f = decompose(PauliField(g), UnitaryField(g, Mat2<double>::identity()));

  int read = 0;
  while (read < 8) {
    char tag[8];
    in.read(tag, 8);
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != 8) throw SnapshotError("snapshot: truncated block tag");
    const std::string t(tag, 8);
    if (t != kDecompositionTags[read]) {
      throw SnapshotError("snapshot: expected block '" + std::string(kDecompositionTags[read]) + "', found '" + t + "'");
    }
    const std::vector<double> d = get_block(in, kDecompositionWidth[read] * n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* v = d.data() + kDecompositionWidth[read] * i;
      switch (read) {
        case 0: f.rho[i] = v[0]; break;
        case 1: f.rho_pm[i] = {v[0], v[1]}; break;
        case 2: f.omega_pm[i] = {v[0], v[1]}; break;
        case 3:
          for (int e = 0; e < 4; ++e) f.u[i].e[e] = {v[2 * e], v[2 * e + 1]};
          break;
        case 4: f.n[i] = {v[0], v[1], v[2]}; break;
        case 5: f.s[i] = {v[0], v[1], v[2]}; break;
        case 6:
          for (int mu = 0; mu < 4; ++mu) f.w_mu[i][mu] = {v[3 * mu], v[3 * mu + 1], v[3 * mu + 2]};
          break;
        case 7: f.j_mu[i] = {v[0], v[1], v[2], v[3]}; break;
      }
    }
    ++read;
  }
  if (read != 6 && read != 8) throw SnapshotError("snapshot: incomplete decomposition");
  if (in.peek() != std::char_traits<char>::eof()) throw SnapshotError("snapshot: trailing data after decomposition");

  for (std::size_t i = 0; i < n; ++i) {
    f.m_frame[i] = spin_frame(f.u[i]);
    std::uint8_t mask = 0;
    if (f.rho[i] == 0.0) mask = kMaskRho | kMaskPlus | kMaskMinus;
    if (f.rho_pm[i][0] == 0.0) mask |= kMaskPlus;
    if (f.rho_pm[i][1] == 0.0) mask |= kMaskMinus;
    f.mask[i] = mask;
    f.phi[i] = (mask & kMaskRho) ? Spinor<double>{}
                                 : Spinor<double>{scale(expi(f.omega_pm[i][0]), f.rho_pm[i][0] / f.rho[i]),
                                                  scale(expi(f.omega_pm[i][1]), f.rho_pm[i][1] / f.rho[i])};
  }
  if (read == 8) {
    f.has_connections = true;
    for (std::size_t i = 0; i < n; ++i)
      for (int mu = 0; mu < 4; ++mu) f.x_mu[i][mu] = f.w_mu[i][mu] - f.n[i] * (2.0 * f.j_mu[i][mu]);
  }
  return f;
}

SpinChargeFields read_decomposition(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("snapshot: cannot open " + path);
  return read_decomposition(in);
}

LatticeField<Spinor<double>> spinor_from_director(const DirectorField& n, const ScalarField& rho) {
  LatticeField<Spinor<double>> psi(n.grid(), Spinor<double>{});
  for (std::size_t i = 0; i < n.size(); ++i) {
    const Vec3d& v = n[i];
    const double c = std::sqrt(std::max(0.0, 0.5 * (1.0 + v[2])));
    const double perp = std::hypot(v[0], v[1]);
    const double s = std::sqrt(std::max(0.0, 0.5 * (1.0 - v[2])));
    const Cplx<double> e = perp > 0.0 ? Cplx<double>{v[0] / perp, v[1] / perp} : Cplx<double>{1.0, 0.0};
    const double r = rho[i];
    psi[i] = {Cplx<double>{r * c, 0.0}, Cplx<double>{r * s * e.re, r * s * e.im}};
  }
  return psi;
}

}  // namespace spincharge
