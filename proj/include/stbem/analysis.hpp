#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "stbem/assembly.hpp"
#include "stbem/error.hpp"
#include "stbem/norms.hpp"
#include "stbem/oracle.hpp"
#include "stbem/rates.hpp"
#include "stbem/solve.hpp"

namespace stbem {

// ---------------------------------------------------------------------------
// Rate tables

struct RateTableRow {
  int px;
  int pt;
  Rational gamma;
  Rational sigma2;
};

struct RateTable {
  std::string title;
  int d;
  bool sparse;
  std::vector<RateTableRow> rows;
};

/// Full tensor rows use the optimal scaling; sparse rows use sigma^2 = d - 1.
inline RateTable make_rate_table(int d, bool sparse, const std::vector<std::pair<int, int>>& degrees) {
  RateTable t;
  t.d = d;
  t.sparse = sparse;
  t.title = std::string(sparse ? "sparse grids" : "full tensor product") + ", d=" + std::to_string(d);
  for (const auto& [px, pt] : degrees) {
    if (sparse) {
      const RateModel m = RateModel::standard(px, pt, d, Rational(d - 1));
      t.rows.push_back({px, pt, predicted_rate_sparse(m), m.sigma2});
    } else {
      const FullRate r = predicted_rate_full(RateModel::standard(px, pt, d));
      t.rows.push_back({px, pt, r.gamma, r.sigma2_opt});
    }
  }
  return t;
}

/// The published rate tables: full tensor rates for (px, pt) in
/// {(0,0), (1,0), (0,1), (1,1), (3,1)} and sparse rates for the degrees
/// {(0,0), (1,0), (1,1), (3,1)}, for d = 2 and d = 3.
inline std::vector<RateTable> rate_tables() {
  const std::vector<std::pair<int, int>> full{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {3, 1}};
  const std::vector<std::pair<int, int>> sparse{{0, 0}, {1, 0}, {1, 1}, {3, 1}};
  return {make_rate_table(2, false, full), make_rate_table(3, false, full), make_rate_table(2, true, sparse),
          make_rate_table(3, true, sparse)};
}

inline std::string format_rate_tables(const std::vector<RateTable>& tables) {
  std::ostringstream os;
  for (const auto& t : tables) {
    os << t.title << "\n";
    os << "  (px,pt)  gamma              sigma^2   2 gamma\n";
    for (const auto& r : t.rows) {
      std::ostringstream deg, g;
      deg << "(" << r.px << "," << r.pt << ")";
      g << to_string(r.gamma) << " (" << std::fixed;
      g.precision(3);
      g << to_double(r.gamma) << ")";
      os << "  " << deg.str();
      for (std::size_t k = deg.str().size(); k < 7; ++k) os << ' ';
      os << "  " << g.str();
      for (std::size_t k = g.str().size(); k < 17; ++k) os << ' ';
      os << "  " << to_string(r.sigma2);
      for (std::size_t k = to_string(r.sigma2).size(); k < 8; ++k) os << ' ';
      os << "  " << to_string(2 * r.gamma);
      os << "\n";
    }
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Error references

/// A fine grid, the single layer matrix on it and a reference density, so
/// that err2(v) = <A (ref - v), ref - v>.
struct ErrorReference {
  FullGrid grid;
  CausalBlockMatrix A;
  Vector reference;
  std::string description;

  double err2(const Vector& approximation_on_grid) const {
    return reference_error_sq(approximation_on_grid, reference, A);
  }

  double err2(const FullGrid& g, const Vector& c) const { return err2(prolong(g, c, grid)); }
  double err2(const CombinedSolution& s) const { return err2(s.on(grid)); }
  double err2(const Density& d) const {
    const Density n = to_nodal(d);
    return err2(n.space.bounding_grid(), n.coefficients);
  }
};

inline bool is_unit_circle(const BoundaryCurve& c) {
  return c.kind() == BoundaryCurve::Kind::circle && std::abs(c.radius() - 1.0) < 1e-14;
}

/// The exact disk flux, L^2 projected onto the grid at `levels`.
inline ErrorReference oracle_reference(const Problem& pb, LevelPair levels, int terms = 50) {
  require(is_unit_circle(pb.disc.curve), "the oracle error needs the unit circle");
  require(pb.method == Method::direct, "the oracle error measures the flux of the direct method");
  require(pb.data.terms.size() == 1 && pb.data.terms[0].mode == 1 && pb.data.terms[0].power == 2,
          "the oracle error needs data of the form A t^2 cos(phi)");
  const FullGrid g(pb.disc, levels);
  AssemblyOptions opt = pb.assembly;
  opt.compress = true;
  ErrorReference r{g, assemble_single_layer(g, opt), Vector(), ""};
  r.reference = pb.data.terms[0].amplitude * DiskOracle(terms, pb.disc.T).project(g);
  std::ostringstream os;
  os << "oracle flux projected on grid " << levels;
  r.description = os.str();
  return r;
}

/// A Galerkin solution on the fine grid at `levels`.
inline ErrorReference bem_reference(const Problem& pb, LevelPair levels) {
  const FullGrid g(pb.disc, levels);
  AssemblyOptions opt = pb.assembly;
  opt.compress = true;
  ErrorReference r{g, assemble_single_layer(g, opt), Vector(), ""};
  try {
    r.reference = solve_full_grid(r.A, assemble_rhs(g, pb));
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << "reference level " << levels << ": " << e.what();
    throw NumericalError(os.str());
  }
  std::ostringstream os;
  os << "Galerkin reference on grid " << levels;
  r.description = os.str();
  return r;
}

}  // namespace stbem
