#pragma once

#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "stbem/error.hpp"
#include "stbem/geometry.hpp"
#include "stbem/indexsets.hpp"

namespace stbem {

using Vector = Eigen::VectorXd;

/// Everything about a discretisation except the level pairs.
struct Discretisation {
  BoundaryCurve curve = BoundaryCurve::circle(1.0);
  int px = 0;
  int pt = 0;
  double T = 4.0;
  int M0 = 4;

  void validate() const {
    require(px == 0 || px == 1, "spatial degree must be 0 or 1");
    require(pt == 0 || pt == 1, "temporal degree must be 0 or 1");
    require(T > 0.0, "time horizon must be positive");
    require(M0 >= 1, "base element count must be at least 1");
  }
};

/// Tensor product of a boundary mesh at level lx and a uniform time grid at
/// level lt with one base cell. Global index of (cell n, time dof q,
/// panel i, space dof p) is n*bs + q*nsx + i*(px+1) + p.
struct FullGrid {
  Discretisation disc;
  int lx = 0;
  int lt = 0;

  FullGrid() = default;
  FullGrid(const Discretisation& d, int lx_, int lt_) : disc(d), lx(lx_), lt(lt_) {
    disc.validate();
    require(lx >= 0 && lt >= 0 && lx < 20 && lt < 24, "grid levels out of range");
  }
  FullGrid(const Discretisation& d, LevelPair p) : FullGrid(d, p.lx, p.lt) {}

  LevelPair levels() const { return {lx, lt}; }
  int panels() const { return disc.M0 << lx; }
  int cells() const { return 1 << lt; }
  int nsx() const { return panels() * (disc.px + 1); }
  int block_size() const { return nsx() * (disc.pt + 1); }
  long dofs() const { return static_cast<long>(block_size()) * cells(); }
  double h() const { return disc.T / cells(); }
  double H() const { return 1.0 / panels(); }
  BoundaryMesh boundary_mesh() const { return mesh(disc.curve, lx, disc.M0); }

  long index(int n, int q, int i, int p) const {
    return static_cast<long>(n) * block_size() + static_cast<long>(q) * nsx() + i * (disc.px + 1) + p;
  }
};

/// Sizes of the hierarchical increments: level 0 carries the base, level l >= 1
/// doubles the previous level's count.
inline long increment_size(int base, int level, int degree) {
  return static_cast<long>(base) * (level == 0 ? 1L : (1L << (level - 1))) * (degree + 1);
}

struct DiscreteSpace {
  Discretisation disc;
  IndexSet set;

  DiscreteSpace(const Discretisation& d, IndexSet s) : disc(d), set(std::move(s)) {
    disc.validate();
    require(set.size() > 0, "discrete space needs a nonempty index set");
    require(set.is_downset(), "index set of a discrete space must be a downset");
  }

  long block_size(const LevelPair& p) const {
    return increment_size(disc.M0, p.lx, disc.px) * increment_size(1, p.lt, disc.pt);
  }

  /// Smallest full grid containing the space.
  FullGrid bounding_grid() const { return FullGrid(disc, set.max_lx(), set.max_lt()); }

  bool is_full_tensor() const {
    return set.size() == static_cast<std::size_t>((set.max_lx() + 1) * (set.max_lt() + 1));
  }
};

inline long dof_count(const DiscreteSpace& space) {
  long n = 0;
  for (const auto& p : space.set.indices()) n += space.block_size(p);
  return n;
}

inline DiscreteSpace full_space(const FullGrid& g) {
  std::set<LevelPair> idx;
  for (int x = 0; x <= g.lx; ++x)
    for (int t = 0; t <= g.lt; ++t) idx.insert({x, t});
  return DiscreteSpace(g.disc, IndexSet(std::move(idx), IndexSet::Kind::full_tensor));
}

// ---------------------------------------------------------------------------
// Haar transforms (piecewise constants only)

/// Orthonormal Haar analysis of n0 * 2^L values. Output layout:
/// [scaling (n0) | level 1 details (n0) | level 2 (2 n0) | ... | level L].
inline void haar_forward(const double* in, double* out, int n0, int L, std::vector<double>& work) {
  const long n = static_cast<long>(n0) << L;
  work.assign(in, in + n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int lev = L; lev >= 1; --lev) {
    const long half = static_cast<long>(n0) << (lev - 1);
    for (long k = 0; k < half; ++k) {
      const double a = work[2 * k], b = work[2 * k + 1];
      out[half + k] = (a - b) * s;
      work[k] = (a + b) * s;
    }
  }
  for (long k = 0; k < n0; ++k) out[k] = work[k];
}

inline void haar_inverse(const double* in, double* out, int n0, int L, std::vector<double>& work) {
  const long n = static_cast<long>(n0) << L;
  work.assign(n, 0.0);
  for (long k = 0; k < n0; ++k) work[k] = in[k];
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<double> next(n);
  for (int lev = 1; lev <= L; ++lev) {
    const long half = static_cast<long>(n0) << (lev - 1);
    for (long k = 0; k < half; ++k) {
      const double c = work[k], d = in[half + k];
      next[2 * k] = (c + d) * s;
      next[2 * k + 1] = (c - d) * s;
    }
    std::copy(next.begin(), next.begin() + 2 * half, work.begin());
  }
  std::copy(work.begin(), work.begin() + n, out);
}

/// Offset of the level-l increment inside the 1D hierarchical layout.
inline long increment_offset(int base, int level) {
  return level == 0 ? 0L : static_cast<long>(base) << (level - 1);
}

/// Tensor Haar transform of a p = 0 full-grid vector (time-major layout
/// n * M + i), returned in the same grid layout with both axes hierarchical.
inline Vector haar_tensor_forward(const FullGrid& g, const Vector& c) {
  require(g.disc.px == 0 && g.disc.pt == 0, "Haar transform needs piecewise constants");
  const int M = g.panels(), nt = g.cells();
  Vector tmp(c.size()), out(c.size());
  std::vector<double> work, col(nt), colh(nt);
  for (int n = 0; n < nt; ++n) haar_forward(c.data() + static_cast<long>(n) * M, tmp.data() + static_cast<long>(n) * M, g.disc.M0, g.lx, work);
  for (int i = 0; i < M; ++i) {
    for (int n = 0; n < nt; ++n) col[n] = tmp[static_cast<long>(n) * M + i];
    haar_forward(col.data(), colh.data(), 1, g.lt, work);
    for (int n = 0; n < nt; ++n) out[static_cast<long>(n) * M + i] = colh[n];
  }
  return out;
}

inline Vector haar_tensor_inverse(const FullGrid& g, const Vector& d) {
  require(g.disc.px == 0 && g.disc.pt == 0, "Haar transform needs piecewise constants");
  const int M = g.panels(), nt = g.cells();
  Vector tmp(d.size()), out(d.size());
  std::vector<double> work, col(nt), colh(nt);
  for (int i = 0; i < M; ++i) {
    for (int n = 0; n < nt; ++n) colh[n] = d[static_cast<long>(n) * M + i];
    haar_inverse(colh.data(), col.data(), 1, g.lt, work);
    for (int n = 0; n < nt; ++n) tmp[static_cast<long>(n) * M + i] = col[n];
  }
  for (int n = 0; n < nt; ++n) haar_inverse(tmp.data() + static_cast<long>(n) * M, out.data() + static_cast<long>(n) * M, g.disc.M0, g.lx, work);
  return out;
}

/// L^2 mass of one space-time cell in the parameter-scaled measure; the
/// hierarchical coefficients are sqrt(w) Q c so that sum d^2 = w sum c^2.
inline double cell_weight(const FullGrid& g) { return g.disc.curve.length() * g.H() * g.h(); }

// ---------------------------------------------------------------------------
// Densities

struct Density {
  enum class Representation { nodal, hierarchical };

  DiscreteSpace space;
  Vector coefficients;
  Representation representation = Representation::nodal;

  Density(DiscreteSpace s, Vector c, Representation r) : space(std::move(s)), coefficients(std::move(c)), representation(r) {
    require(coefficients.size() == dof_count(space), "density length does not match the space");
    require(r == Representation::hierarchical || space.is_full_tensor(),
            "nodal densities live on full tensor spaces");
  }

  static Density nodal(const FullGrid& g, Vector c) { return Density(full_space(g), std::move(c), Representation::nodal); }
};

/// Visits the hierarchical blocks of a space in storage order: lexicographic
/// (lx, lt), entries time-major inside each block.
template <class F>
void for_each_block(const DiscreteSpace& s, F&& f) {
  long offset = 0;
  for (const auto& p : s.set.indices()) {
    f(p, offset);
    offset += s.block_size(p);
  }
}

/// Copies block-ordered hierarchical coefficients into the grid layout of
/// grid g (which must contain the space), zero elsewhere.
inline Vector blocks_to_grid(const DiscreteSpace& s, const Vector& blocks, const FullGrid& g) {
  require(s.disc.px == 0 && s.disc.pt == 0, "hierarchical representation needs piecewise constants");
  require(s.set.max_lx() <= g.lx && s.set.max_lt() <= g.lt, "grid does not contain the space");
  const int M = g.panels();
  Vector out = Vector::Zero(g.dofs());
  for_each_block(s, [&](const LevelPair& p, long off) {
    const long sx = increment_size(s.disc.M0, p.lx, 0), st = increment_size(1, p.lt, 0);
    const long ox = increment_offset(s.disc.M0, p.lx), ot = increment_offset(1, p.lt);
    for (long it = 0; it < st; ++it)
      for (long ix = 0; ix < sx; ++ix) out[(ot + it) * M + ox + ix] = blocks[off + it * sx + ix];
  });
  return out;
}

inline Vector grid_to_blocks(const DiscreteSpace& s, const Vector& grid, const FullGrid& g) {
  require(s.disc.px == 0 && s.disc.pt == 0, "hierarchical representation needs piecewise constants");
  const int M = g.panels();
  Vector out(dof_count(s));
  for_each_block(s, [&](const LevelPair& p, long off) {
    const long sx = increment_size(s.disc.M0, p.lx, 0), st = increment_size(1, p.lt, 0);
    const long ox = increment_offset(s.disc.M0, p.lx), ot = increment_offset(1, p.lt);
    for (long it = 0; it < st; ++it)
      for (long ix = 0; ix < sx; ++ix) out[off + it * sx + ix] = grid[(ot + it) * M + ox + ix];
  });
  return out;
}

inline Density to_hierarchical(const Density& d) {
  if (d.representation == Density::Representation::hierarchical) return d;
  const DiscreteSpace& s = d.space;
  require(s.disc.px == 0 && s.disc.pt == 0, "hierarchical representation needs piecewise constants");
  const FullGrid g = s.bounding_grid();
  const Vector grid = haar_tensor_forward(g, d.coefficients) * std::sqrt(cell_weight(g));
  return Density(s, grid_to_blocks(s, grid, g), Density::Representation::hierarchical);
}

/// Nodal values on the bounding full grid of the density's space.
inline Density to_nodal(const Density& d) {
  if (d.representation == Density::Representation::nodal) return d;
  const FullGrid g = d.space.bounding_grid();
  const Vector grid = blocks_to_grid(d.space, d.coefficients, g);
  return Density::nodal(g, haar_tensor_inverse(g, grid) / std::sqrt(cell_weight(g)));
}

/// Nodal density of grid g represented exactly on the finer grid f.
inline Vector prolong(const FullGrid& g, const Vector& c, const FullGrid& f) {
  require(f.lx >= g.lx && f.lt >= g.lt, "prolongation target must be finer (non-nested spaces)");
  require(f.disc.px == g.disc.px && f.disc.pt == g.disc.pt && f.disc.M0 == g.disc.M0,
          "prolongation between incompatible discretisations");
  const int px = g.disc.px, pt = g.disc.pt;
  const int rx = 1 << (f.lx - g.lx), rt = 1 << (f.lt - g.lt);
  Vector out(f.dofs());
  // Legendre P1 on a parent restricted to child c of r: a + b*xi_parent with
  // xi_parent = (2c + 1 - r + xi_child) / r.
  for (int n = 0; n < f.cells(); ++n) {
    const int N = n / rt, cn = n % rt;
    for (int i = 0; i < f.panels(); ++i) {
      const int I = i / rx, ci = i % rx;
      double coarse[2][2] = {{0, 0}, {0, 0}};
      for (int q = 0; q <= pt; ++q)
        for (int p = 0; p <= px; ++p) coarse[q][p] = c[g.index(N, q, I, p)];
      // collapse in time
      double tq[2][2];
      for (int p = 0; p <= px; ++p) {
        const double shift = (2.0 * cn + 1.0 - rt) / rt;
        tq[0][p] = coarse[0][p] + (pt ? coarse[1][p] * shift : 0.0);
        tq[1][p] = pt ? coarse[1][p] / rt : 0.0;
      }
      const double shift = (2.0 * ci + 1.0 - rx) / rx;
      for (int q = 0; q <= pt; ++q) {
        out[f.index(n, q, i, 0)] = tq[q][0] + (px ? tq[q][1] * shift : 0.0);
        if (px) out[f.index(n, q, i, 1)] = tq[q][1] / rx;
      }
    }
  }
  return out;
}

}  // namespace stbem
