#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace stbem {

/// Nodes and weights on [0, 1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

template <unsigned N>
Rule1D gauss_legendre_unit() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& wt = G::weights();
  Rule1D r;
  // boost stores the non-negative half of the symmetric rule on [-1, 1]
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0.0) continue;
    r.x.push_back(0.5 - 0.5 * a[i]);
    r.w.push_back(0.5 * wt[i]);
  }
  if constexpr (N % 2 == 1) {
    r.x.push_back(0.5);
    r.w.push_back(0.5 * wt[0]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    r.x.push_back(0.5 + 0.5 * a[i]);
    r.w.push_back(0.5 * wt[i]);
  }
  return r;
}

inline const Rule1D& gauss8() {
  static const Rule1D r = gauss_legendre_unit<8>();
  return r;
}

inline const Rule1D& gauss16() {
  static const Rule1D r = gauss_legendre_unit<16>();
  return r;
}

inline const Rule1D& gauss20() {
  static const Rule1D r = gauss_legendre_unit<20>();
  return r;
}

/// Composite Gauss rule on [0, 1] graded towards 0: breakpoints (k/m)^q.
inline Rule1D graded_composite(const Rule1D& base, int pieces, double exponent) {
  Rule1D r;
  for (int k = 0; k < pieces; ++k) {
    const double a = std::pow(static_cast<double>(k) / pieces, exponent);
    const double b = std::pow(static_cast<double>(k + 1) / pieces, exponent);
    for (std::size_t i = 0; i < base.size(); ++i) {
      r.x.push_back(a + (b - a) * base.x[i]);
      r.w.push_back((b - a) * base.w[i]);
    }
  }
  return r;
}

/// Quadrature node on a pair of unit parameter squares.
struct PairNode {
  double xi;   // local coordinate in the test panel, [0, 1]
  double eta;  // local coordinate in the source panel, [0, 1]
  double w;
};

enum class PairRelation { coincident, next, previous, separated };

/// Rules for panel pairs on a closed curve. The singular point is the
/// diagonal (coincident), the corner (1, 0) (source follows test) or the
/// corner (0, 1) (source precedes test).
class PanelPairRules {
 public:
  explicit PanelPairRules(int pieces = 12, double grading = 8.0)
      : graded_(graded_composite(gauss8(), pieces, grading)) {
    const Rule1D& g = gauss8();
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t b = 0; b < g.size(); ++b)
        separated_.push_back({g.x[a], g.x[b], g.w[a] * g.w[b]});

    // s = |xi - eta| splitting of the square
    for (std::size_t a = 0; a < graded_.size(); ++a) {
      const double s = graded_.x[a];
      const double len = 1.0 - s;
      for (std::size_t b = 0; b < g.size(); ++b) {
        const double x = len * g.x[b];
        const double w = graded_.w[a] * g.w[b] * len;
        coincident_.push_back({x + s, x, w});
        coincident_.push_back({x, x + s, w});
      }
    }

    // Duffy triangles around the shared corner, in distance coordinates.
    std::vector<std::array<double, 3>> corner;
    for (std::size_t a = 0; a < graded_.size(); ++a) {
      const double rho = graded_.x[a];
      for (std::size_t b = 0; b < g.size(); ++b) {
        const double w = graded_.w[a] * g.w[b] * rho;
        corner.push_back({rho, rho * g.x[b], w});
        corner.push_back({rho * g.x[b], rho, w});
      }
    }
    for (const auto& c : corner) {
      next_.push_back({1.0 - c[0], c[1], c[2]});
      previous_.push_back({c[0], 1.0 - c[1], c[2]});
    }

    // Panels one apart: split each into halves.
    for (int si = 0; si < 2; ++si)
      for (int sj = 0; sj < 2; ++sj)
        for (const auto& n : separated_)
          near_.push_back({0.5 * (si + n.xi), 0.5 * (sj + n.eta), 0.25 * n.w});
  }

  const std::vector<PairNode>& rule(PairRelation rel, bool near) const {
    switch (rel) {
      case PairRelation::coincident: return coincident_;
      case PairRelation::next: return next_;
      case PairRelation::previous: return previous_;
      case PairRelation::separated: break;
    }
    return near ? near_ : separated_;
  }

  static const PanelPairRules& standard() {
    static const PanelPairRules r;
    return r;
  }

 private:
  Rule1D graded_;
  std::vector<PairNode> separated_, near_, coincident_, next_, previous_;
};

/// Nodes for the pair (test panel i, source panel l) of a uniform closed mesh
/// with M panels, in the local coordinates of the two panels. Meshes with
/// fewer than three panels are subdivided so that every sub-pair touches in
/// at most one point.
inline std::vector<PairNode> panel_pair_nodes(int i, int l, int M,
                                              const PanelPairRules& rules = PanelPairRules::standard()) {
  const int sub = M >= 3 ? 1 : (M == 2 ? 2 : 4);
  const int Ms = M * sub;
  std::vector<PairNode> out;
  for (int a = 0; a < sub; ++a) {
    for (int b = 0; b < sub; ++b) {
      const int si = i * sub + a;
      const int sl = l * sub + b;
      const int d = ((sl - si) % Ms + Ms) % Ms;
      PairRelation rel = PairRelation::separated;
      if (d == 0) rel = PairRelation::coincident;
      else if (d == 1) rel = PairRelation::next;
      else if (d == Ms - 1) rel = PairRelation::previous;
      const bool near = (d == 2 || d == Ms - 2);
      for (const auto& n : rules.rule(rel, near)) {
        out.push_back({(a + n.xi) / sub, (b + n.eta) / sub, n.w / (sub * sub)});
      }
    }
  }
  return out;
}

}  // namespace stbem
