#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "stbem/error.hpp"
#include "stbem/quadrature.hpp"
#include "stbem/space.hpp"
#include "stbem/special_functions.hpp"

namespace stbem {

/// Exact solution on the unit disk for g = t^2 cos(phi) and zero initial data.
///   u = cos(phi) [t^2 r - t (r - r^3) / 4 + 2 sum c_k J1(j_k r) (1 - e^{-j_k^2 t}) / j_k^4]
/// with c_k = -2 / (j_k J0(j_k)) the Fourier-Bessel coefficients of r. The flux
/// series is resummed with sum j_k^{-2} = 1/8, sum j_k^{-4} = 1/192:
///   du/dn = cos(phi) [t^2 + t/2 - 1/48 + 4 sum e^{-j_k^2 t} / j_k^4].
class DiskOracle {
 public:
  explicit DiskOracle(int terms = 50, double T = 4.0) : T_(T), zeros_(special::bessel_j1_zeros(terms)) {
    require(terms >= 1, "oracle needs at least one Bessel term");
    coef_.reserve(zeros_.size());
    for (double j : zeros_) coef_.push_back(-2.0 / (j * special::bessel_j0(j)));
  }

  int terms() const { return static_cast<int>(zeros_.size()); }
  const std::vector<double>& zeros() const { return zeros_; }

  /// Time factor F(t) of the flux.
  double flux_factor(double t) const {
    check_time(t);
    if (t == 0.0) return 0.0;
    double s = 0.0;
    for (double j : zeros_) s += std::exp(-j * j * t) / (j * j * j * j);
    return t * t + 0.5 * t - 1.0 / 48.0 + 4.0 * s;
  }

  /// Antiderivative of F (up to a constant).
  double flux_factor_antiderivative(double t) const {
    check_time(t);
    double s = 0.0;
    for (double j : zeros_) s += std::exp(-j * j * t) / std::pow(j, 6);
    return t * t * t / 3.0 + t * t / 4.0 - t / 48.0 - 4.0 * s;
  }

  /// Antiderivative of t F(t) (up to a constant).
  double flux_factor_moment_antiderivative(double t) const {
    check_time(t);
    double s = 0.0;
    for (double j : zeros_) s += std::exp(-j * j * t) * (t / std::pow(j, 6) + 1.0 / std::pow(j, 8));
    return t * t * t * t / 4.0 + t * t * t / 6.0 - t * t / 96.0 - 4.0 * s;
  }

  double flux(double phi, double t) const { return flux_factor(t) * std::cos(phi); }

  /// Magnitude of the k-th series term of F at time t (k from 1).
  double flux_term(int k, double t) const {
    const double j = zeros_.at(k - 1);
    return 4.0 * std::exp(-j * j * t) / (j * j * j * j);
  }

  /// Interior solution at polar coordinates (r, phi).
  double solution(double r, double phi, double t) const {
    check_time(t);
    require(r >= 0.0 && r <= 1.0, "oracle solution needs r in [0, 1]");
    double s = 0.0;
    for (std::size_t k = 0; k < zeros_.size(); ++k) {
      const double j = zeros_[k];
      s += coef_[k] * special::bessel_j1(j * r) * (-std::expm1(-j * j * t)) / (j * j * j * j);
    }
    return std::cos(phi) * (t * t * r - t * (r - r * r * r) / 4.0 + 2.0 * s);
  }

  /// L^2 projection of the flux onto a full grid (arc-length measure of the
  /// unit circle, Legendre bases per cell).
  Vector project(const FullGrid& g) const {
    require(g.disc.curve.kind() == BoundaryCurve::Kind::circle && std::abs(g.disc.curve.radius() - 1.0) < 1e-14,
            "the disk oracle needs the unit circle");
    const int M = g.panels(), nt = g.cells(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
    const double H = g.H(), h = g.h();
    // panel averages of cos and of cos * P1 in the parameter
    std::vector<std::array<double, 2>> sx(M), st(nt);
    const Rule1D& r = gauss20();
    for (int i = 0; i < M; ++i) {
      const double a = 2.0 * std::numbers::pi * i * H, b = 2.0 * std::numbers::pi * (i + 1) * H;
      sx[i][0] = (std::sin(b) - std::sin(a)) / (b - a);
      double s1 = 0.0;
      for (std::size_t k = 0; k < r.size(); ++k) s1 += r.w[k] * std::cos(a + (b - a) * r.x[k]) * (2.0 * r.x[k] - 1.0);
      sx[i][1] = 3.0 * s1;  // P1 has mean square 1/3
    }
    for (int n = 0; n < nt; ++n) {
      const double t0 = n * h, t1 = (n + 1) * h;
      st[n][0] = (flux_factor_antiderivative(t1) - flux_factor_antiderivative(t0)) / h;
      // mean of F P1 in closed form; quadrature misses the e^{-j^2 t} layers near t = 0
      const double I0 = flux_factor_antiderivative(t1) - flux_factor_antiderivative(t0);
      const double I1 = flux_factor_moment_antiderivative(t1) - flux_factor_moment_antiderivative(t0);
      const double s1 = (2.0 / h * (I1 - t0 * I0) - I0) / h;
      st[n][1] = 3.0 * s1;
    }
    Vector c(g.dofs());
    for (int n = 0; n < nt; ++n)
      for (int q = 0; q < tq; ++q)
        for (int i = 0; i < M; ++i)
          for (int p = 0; p < sp; ++p) c[g.index(n, q, i, p)] = st[n][q] * sx[i][p];
    return c;
  }

 private:
  void check_time(double t) const {
    if (t < 0.0 || t > T_ * (1.0 + 1e-12)) throw ConfigError("oracle time outside [0, T]");
  }

  double T_;
  std::vector<double> zeros_;
  std::vector<double> coef_;
};

}  // namespace stbem
