#pragma once

// Independent reference computations for the tests: extended precision
// series, Boost adaptive quadrature and brute-force enumeration. Nothing
// here calls the closed forms under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "stbem/geometry.hpp"

namespace oracle {

/// E1(z) = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!), 200 terms in long double.
inline long double e1_series(long double z) {
  long double sum = 0.0L, term = 1.0L;
  for (int k = 1; k <= 200; ++k) {
    term *= -z / k;
    sum += term / k;
  }
  return -0.57721566490153286060651209008240243L - std::log(z) - sum;
}

/// Exponential integral from Boost, as a second opinion.
inline double e1_boost(double z) { return boost::math::expint(1, z); }

/// Adaptive Gauss-Kronrod on [a, b] with breakpoints geometrically clustered
/// towards both ends, which keeps log and exponential layers resolved.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12) {
  if (!(b > a)) return 0.0;
  std::vector<double> br{a, b};
  const double len = b - a;
  for (double e : {1e-12, 1e-9, 1e-6, 1e-4, 1e-2, 1e-1}) {
    br.push_back(a + e * len);
    br.push_back(b - e * len);
  }
  std::sort(br.begin(), br.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k)
    s += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, br[k], br[k + 1], 10, tol);
  return s;
}

/// Gauss-Kronrod on [a, b] with breakpoints clustered geometrically around a
/// single point c in [a, b], for integrands with an integrable singularity there.
template <class F>
double integrate_around(F&& f, double a, double b, double c, double tol = 1e-12) {
  std::vector<double> br{a, b};
  if (c > a && c < b) br.push_back(c);
  for (double e : {1e-12, 1e-9, 1e-6, 1e-4, 1e-2, 1e-1}) {
    const double d = e * (b - a);
    for (double x : {c - d, c + d})
      if (x > a && x < b) br.push_back(x);
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k)
    s += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, br[k], br[k + 1], 8, tol);
  return s;
}

/// Fixed geometric mesh on [a, b] refined towards the points in `sing`
/// (ratio 0.15, `layers` layers) with 30-point Gauss-Legendre on every piece.
/// Converges exponentially for integrands that are analytic apart from
/// logarithmic singularities at those points.
template <class F>
double integrate_hp(F&& f, double a, double b, const std::vector<double>& sing, int layers = 30) {
  std::vector<double> br{a, b};
  for (double c : sing) {
    br.push_back(c);
    for (double d = 0.5 * (b - a); layers > 0 && d > (b - a) * std::pow(0.15, layers); d *= 0.15)
      for (double x : {c - d, c + d})
        if (x > a && x < b) br.push_back(x);
  }
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k)
    if (br[k + 1] > br[k]) s += boost::math::quadrature::gauss<double, 30>::integrate(f, br[k], br[k + 1]);
  return s;
}

inline double heat_kernel(double r2, double tau) {
  if (tau <= 0.0) return 0.0;
  return std::exp(-r2 / (4.0 * tau)) / (4.0 * std::numbers::pi * tau);
}

/// int_{s_a}^{s_b} G(r, t - s) ds by quadrature in s.
inline double slp_time_integral(double r2, double s_a, double s_b, double t) {
  const double hi = std::min(s_b, t);
  if (hi <= s_a) return 0.0;
  return integrate([&](double s) { return heat_kernel(r2, t - s); }, s_a, hi);
}

/// int_{s_a}^{s_b} (s - s_a) G(r, t - s) ds.
inline double slp_time_integral_linear(double r2, double s_a, double s_b, double t) {
  const double hi = std::min(s_b, t);
  if (hi <= s_a) return 0.0;
  return integrate([&](double s) { return (s - s_a) * heat_kernel(r2, t - s); }, s_a, hi);
}

/// int_{s_a}^{s_b} d/dn_y G(x - y, t - s) ds by quadrature.
inline double dlp_time_integral(double dx, double dy, double nx, double ny, double s_a, double s_b, double t) {
  const double hi = std::min(s_b, t);
  if (hi <= s_a) return 0.0;
  const double r2 = dx * dx + dy * dy, dn = dx * nx + dy * ny;
  return integrate(
      [&](double s) {
        const double tau = t - s;
        if (tau <= 0.0) return 0.0;
        return dn / (8.0 * std::numbers::pi * tau * tau) * std::exp(-r2 / (4.0 * tau));
      },
      s_a, hi);
}

/// int_0^T int_0^t G(r, t - s) ds dt = (1/4pi) int_0^T E1(a/t) dt with
/// a = r^2/4, by quadrature in t.
inline double slp_cell_time_part_quadrature(double r2, double T) {
  const double a = r2 / 4.0;
  if (a <= 0.0) return 0.0;
  return integrate(
      [&](double t) {
        if (t <= 0.0 || a / t > 700.0) return 0.0;
        return e1_boost(a / t) / (4.0 * std::numbers::pi);
      },
      0.0, T, 1e-13);
}

/// The same double time integral by hand: d/dt [(t + a) E1(a/t) - t e^{-a/t}]
/// = E1(a/t), evaluated with Boost's E1. Checked against the quadrature above.
inline double slp_cell_time_part(double r2, double T) {
  const double a = r2 / 4.0, z = a / T;
  if (a <= 0.0 || z > 700.0) return 0.0;
  return ((T + a) * e1_boost(z) - T * std::exp(-z)) / (4.0 * std::numbers::pi);
}

/// Galerkin entry of the single layer operator for panels i, l of a single
/// time cell [0, T] with piecewise constants: geometric quadrature over the
/// two curve parameters, refined at the singular points, with the double time
/// integral from slp_cell_time_part.
inline double slp_entry_level0(const stbem::BoundaryCurve& c, int M, int i, int l, double T, int layers = 30) {
  const double H = 1.0 / M;
  const double lo = l * H, hi = (l + 1) * H;
  // the log singularity sits at v = u, or at the shared endpoint of adjacent panels
  const bool next = l == (i + 1) % M, prev = i == (l + 1) % M;
  auto inner = [&](double u) {
    auto f = [&](double v) {
      const double r2 = (c.point(u) - c.point(v)).squaredNorm();
      if (r2 < 1e-200) return 0.0;
      return slp_cell_time_part(r2, T) * c.speed(v);
    };
    std::vector<double> sing;
    if (i == l) sing.push_back(u);
    if (next) sing.push_back(lo);
    if (prev) sing.push_back(hi);
    return integrate_hp(f, lo, hi, sing, layers);
  };
  const double ulo = i * H, uhi = (i + 1) * H;
  std::vector<double> outer;
  if (i == l || prev) outer.push_back(ulo);
  if (i == l || next) outer.push_back(uhi);
  return integrate_hp([&](double u) { return inner(u) * c.speed(u); }, ulo, uhi, outer, layers);
}

/// Brute-force minimum of F outside the full tensor set with bounds
/// lx <= Lx, lt <= Lt, searched over a box.
inline std::pair<std::pair<int, int>, double> min_outside_box(const std::function<double(int, int)>& F, int Lx, int Lt,
                                                              int box) {
  double best = INFINITY;
  std::pair<int, int> where{-1, -1};
  for (int x = 0; x <= box; ++x)
    for (int t = 0; t <= box; ++t) {
      if (x <= Lx && t <= Lt) continue;
      const double v = F(x, t);
      if (v < best) {
        best = v;
        where = {x, t};
      }
    }
  return {where, best};
}

}  // namespace oracle
