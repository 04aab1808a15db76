#pragma once

#include <cmath>
#include <numbers>

#include "stbem/data.hpp"
#include "stbem/error.hpp"
#include "stbem/kernel.hpp"
#include "stbem/quadrature.hpp"
#include "stbem/space.hpp"

namespace stbem {

namespace detail {

inline void require_interior(const BoundaryCurve& curve, const Vec2& x) {
  if (!(curve.level_set(x) < -1e-10)) throw ConfigError("potential evaluation point is not strictly inside the domain");
}

/// int_{u0}^{u1} f(u) du, bisecting parameter intervals that are long
/// compared with their distance to x.
template <class F>
double near_adaptive(const BoundaryCurve& curve, const Vec2& x, double u0, double u1, F&& f, int depth = 0) {
  const double mid = 0.5 * (u0 + u1);
  const double len = (u1 - u0) * curve.speed(mid);
  const double dist = std::min({(curve.point(u0) - x).norm(), (curve.point(mid) - x).norm(), (curve.point(u1) - x).norm()});
  if (len > 0.5 * dist && depth < 40)
    return near_adaptive(curve, x, u0, mid, f, depth + 1) + near_adaptive(curve, x, mid, u1, f, depth + 1);
  const Rule1D& r = gauss16();
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) s += r.w[k] * f(u0 + (u1 - u0) * r.x[k]);
  return s * (u1 - u0);
}

}  // namespace detail

/// Single layer potential of a nodal full-grid density at an interior point.
inline double eval_single_layer_potential(const Density& psi, const Vec2& x, double t) {
  require(psi.representation == Density::Representation::nodal, "single layer potential needs a nodal density");
  const FullGrid g = psi.space.bounding_grid();
  const BoundaryCurve& curve = g.disc.curve;
  detail::require_interior(curve, x);
  if (t <= 0.0) return 0.0;
  const int M = g.panels(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
  const double H = g.H(), h = g.h();
  const int ncell = std::min(g.cells(), static_cast<int>(std::ceil(t / h)));
  double total = 0.0;
  for (int i = 0; i < M; ++i) {
    const auto f = [&](double u) {
      const double r2 = (curve.point(u) - x).squaredNorm();
      const double xi = u / H - i;
      double s = 0.0;
      for (int j = 0; j < ncell; ++j) {
        const double sa = j * h, sb = (j + 1) * h;
        double tint[2];
        if (tq == 1) {
          tint[0] = time_integrated_slp(r2, sa, sb, t);
        } else {
          const auto lin = time_integrated_slp_linear(r2, sa, sb, t);
          tint[0] = lin[0];
          tint[1] = 2.0 / h * lin[1] - lin[0];
        }
        for (int r = 0; r < tq; ++r)
          for (int p = 0; p < sp; ++p)
            s += psi.coefficients[g.index(j, r, i, p)] * tint[r] * (p == 0 ? 1.0 : 2.0 * xi - 1.0);
      }
      return s * curve.speed(u);
    };
    total += detail::near_adaptive(curve, x, i * H, (i + 1) * H, f);
  }
  return total;
}

/// Double layer potential of the Dirichlet data at an interior point.
inline double eval_double_layer_potential(const BoundaryCurve& curve, const BoundaryData& data, const Vec2& x, double t) {
  detail::require_interior(curve, x);
  if (t <= 0.0 || data.is_zero()) return 0.0;
  double total = 0.0;
  int maxmode = 0, maxpow = 1;
  for (const auto& term : data.terms) {
    maxmode = std::max(maxmode, term.mode);
    maxpow = std::max(maxpow, term.power);
  }
  const int pieces = std::max(8, 4 * maxmode);
  std::vector<double> X;
  for (int c = 0; c < pieces; ++c) {
    const auto f = [&](double v) {
      const Vec2 y = curve.point(v);
      const Vec2 d = x - y;
      const double a = 0.25 * d.squaredNorm();
      const double dn = d.dot(curve.normal(v)) / (8.0 * std::numbers::pi);
      exp_moments_dyn(a, t, maxpow + 1 + 2, X);
      double s = 0.0;
      for (const auto& term : data.terms)
        s += term.amplitude * std::cos(2.0 * std::numbers::pi * term.mode * v) * dlp_phi(term.power, t, X);
      return s * dn * curve.speed(v);
    };
    total += detail::near_adaptive(curve, x, static_cast<double>(c) / pieces, static_cast<double>(c + 1) / pieces, f);
  }
  return total;
}

}  // namespace stbem
