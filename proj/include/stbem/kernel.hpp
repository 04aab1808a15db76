#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "stbem/error.hpp"
#include "stbem/geometry.hpp"
#include "stbem/special_functions.hpp"

namespace stbem {

inline constexpr double four_pi = 4.0 * std::numbers::pi;

/// Fundamental solution of the heat equation in two space dimensions.
inline double heat_kernel(const Vec2& x, double t) {
  if (t <= 0.0) return 0.0;
  return std::exp(-x.squaredNorm() / (4.0 * t)) / (four_pi * t);
}

/// X_n(tau) = int_0^tau s^n e^{-a/s} ds for n = -2 .. N-3, stored at index n + 2.
/// Zero when a / tau exceeds the underflow threshold.
template <int N>
inline std::array<double, N> exp_moments(double a, double tau) {
  std::array<double, N> X{};
  if (tau <= 0.0) return X;
  const double z = a / tau;
  if (z > special::underflow_argument) return X;
  const double e = std::exp(-z);
  X[0] = e / a;
  if constexpr (N > 1) X[1] = special::expint_e1(z);
  double tp = 1.0;
  for (int n = 0; n + 2 < N; ++n) {
    tp *= tau;
    X[n + 2] = (tp * e - a * X[n + 1]) / (n + 1);
  }
  return X;
}

/// Repeated time antiderivatives of the heat kernel at distance r^2 = 4a:
/// F_1(tau) = int_0^tau G, F_{n+1}(tau) = int_0^tau F_n. Returns F_1..F_4.
///
/// For z = a / tau below 40 the moments come from the upward recursion; its
/// cancellation grows like z^{n-1}. Beyond, F_n = tau^{n-1} e^{-z} I_n(z) /
/// (4 pi (n-1)!) with I_n(z) = int_0^inf e^{-y} y^{n-1} (z + y)^{-n} dy taken
/// from its asymptotic series, which is accurate to about e^{-z} there.
inline std::array<double, 4> slp_antiderivatives(double a, double tau) {
  std::array<double, 4> F{};
  if (tau <= 0.0) return F;
  const double z = a / tau;
  if (z > special::underflow_argument) return F;
  if (z >= 40.0) {
    const double e = std::exp(-z);
    double tp = 1.0, fact = 1.0;
    for (int n = 1; n <= 4; ++n) {
      // I_n z^n = sum_k (-1)^k C(n+k-1, k) (n+k-1)! z^{-k}
      double term = fact, sum = term, last = term;
      for (int k = 0; k < 40; ++k) {
        term *= -static_cast<double>(n + k) * (n + k) / ((k + 1) * z);
        if (std::abs(term) > last) break;
        sum += term;
        last = std::abs(term);
        if (last < 1e-17 * std::abs(sum)) break;
      }
      F[n - 1] = tp * e * sum / (std::pow(z, n) * four_pi * fact);
      tp *= tau;
      fact *= n;
    }
    return F;
  }
  const auto X = exp_moments<5>(a, tau);
  // M_m = int_0^tau s^m g(s) ds = X_{m-1} / 4pi
  const double m0 = X[1] / four_pi, m1 = X[2] / four_pi, m2 = X[3] / four_pi, m3 = X[4] / four_pi;
  F[0] = m0;
  F[1] = tau * m0 - m1;
  F[2] = (tau * (tau * m0 - 2.0 * m1) + m2) / 2.0;
  F[3] = (tau * (tau * (tau * m0 - 3.0 * m1) + 3.0 * m2) - m3) / 6.0;
  return F;
}

/// int_0^tau G at squared distance 4a; equals E1(a / tau) / 4pi.
inline double slp_first_antiderivative(double a, double tau) {
  if (tau <= 0.0 || a / tau > special::underflow_argument) return 0.0;
  return special::expint_e1(a / tau) / four_pi;
}

/// int_{s_a}^{s_b} G(x - y, t - s) ds with r2 = |x - y|^2.
inline double time_integrated_slp(double r2, double s_a, double s_b, double t) {
  require(r2 > 0.0, "time_integrated_slp: coincident points");
  require(s_a < s_b, "time_integrated_slp: empty source interval");
  if (t <= s_a) return 0.0;
  const double a = 0.25 * r2;
  return slp_first_antiderivative(a, t - s_a) - slp_first_antiderivative(a, t - s_b);
}

/// int_{s_a}^{s_b} s^0 and s^1 weighted versions: returns {int G ds, int (s - s_a) G ds}.
inline std::array<double, 2> time_integrated_slp_linear(double r2, double s_a, double s_b, double t) {
  require(r2 > 0.0, "time_integrated_slp: coincident points");
  require(s_a < s_b, "time_integrated_slp: empty source interval");
  if (t <= s_a) return {0.0, 0.0};
  const double a = 0.25 * r2;
  const double hi = t - s_a;
  const double lo = std::max(t - s_b, 0.0);
  const auto Xh = exp_moments<4>(a, hi);
  const auto Xl = exp_moments<4>(a, lo);
  const double m0 = (Xh[1] - Xl[1]) / four_pi;
  const double m1 = (Xh[2] - Xl[2]) / four_pi;
  // s - s_a = (t - s_a) - tau
  return {m0, hi * m0 - m1};
}

/// Normal derivative of G with respect to the source point.
inline double heat_kernel_dn(const Vec2& x, const Vec2& y, const Vec2& n_y, double t) {
  if (t <= 0.0) return 0.0;
  const Vec2 d = x - y;
  return heat_kernel(d, t) * d.dot(n_y) / (2.0 * t);
}

/// int_{s_a}^{s_b} dG/dn_y (x - y, t - s) ds.
inline double time_integrated_dlp(const Vec2& x, const Vec2& y, const Vec2& n_y, double s_a,
                                  double s_b, double t) {
  require(s_a < s_b, "time_integrated_dlp: empty source interval");
  const Vec2 d = x - y;
  const double r2 = d.squaredNorm();
  require(r2 > 0.0, "time_integrated_dlp: coincident points");
  if (t <= s_a) return 0.0;
  const double hi = t - s_a;
  const double lo = std::max(t - s_b, 0.0);
  const double a = 0.25 * r2;
  const double eh = std::exp(-a / hi);
  const double el = lo > 0.0 ? std::exp(-a / lo) : 0.0;
  return d.dot(n_y) / (2.0 * std::numbers::pi * r2) * (eh - el);
}

/// Phi_q(t) = int_0^t (t - tau)^q e^{-a/tau} / tau^2 dtau for q = 0..Q-1.
/// The double-layer time integral against s^q data is (x-y).n_y / 8pi * Phi_q.
template <int Q>
inline std::array<double, Q> dlp_power_integrals(double a, double t) {
  std::array<double, Q> phi{};
  if (t <= 0.0) return phi;
  const auto X = exp_moments<Q + 1>(a, t);
  for (int q = 0; q < Q; ++q) {
    double binom = 1.0, tp = std::pow(t, q), s = 0.0;
    for (int m = 0; m <= q; ++m) {
      s += binom * tp * ((m % 2) ? -X[m] : X[m]);
      binom = binom * (q - m) / (m + 1);
      tp = (t != 0.0) ? tp / t : 0.0;
    }
    phi[q] = s;
  }
  return phi;
}

/// X_{-2} .. X_{count-3} at (a, tau), runtime length.
inline void exp_moments_dyn(double a, double tau, int count, std::vector<double>& X) {
  X.assign(count, 0.0);
  if (tau <= 0.0) return;
  const double z = a / tau;
  if (z > special::underflow_argument) return;
  const double e = std::exp(-z);
  X[0] = e / a;
  if (count > 1) X[1] = special::expint_e1(z);
  double tp = 1.0;
  for (int n = 0; n + 2 < count; ++n) {
    tp *= tau;
    X[n + 2] = (tp * e - a * X[n + 1]) / (n + 1);
  }
}

/// Phi_q(t) from precomputed moments X at t.
inline double dlp_phi(int q, double t, const std::vector<double>& X) {
  double s = 0.0, binom = 1.0;
  for (int m = 0; m <= q; ++m) {
    s += binom * std::pow(t, q - m) * ((m % 2) ? -X[m] : X[m]);
    binom = binom * (q - m) / (m + 1);
  }
  return s;
}

/// Coefficients of the time Galerkin entries for per-cell Legendre bases
/// {1, 2(t - t_n)/h - 1}. For lag k = n - j,
///   T_qr(k) = sum c * h^{2-n} F_n(h (k + m)),
/// with q the test (t) index and r the source (s) index.
struct TimeTerm {
  int n;  // antiderivative order, 2..4
  int m;  // shift, -1..1
  double c;
};

inline const std::vector<TimeTerm>& time_galerkin_terms(int q, int r) {
  static const std::vector<TimeTerm> t00{{2, -1, 1}, {2, 0, -2}, {2, 1, 1}};
  static const std::vector<TimeTerm> t01{{2, -1, 1}, {2, 1, -1}, {3, -1, 2}, {3, 0, -4}, {3, 1, 2}};
  static const std::vector<TimeTerm> t10{{2, -1, -1}, {2, 1, 1}, {3, -1, -2}, {3, 0, 4}, {3, 1, -2}};
  static const std::vector<TimeTerm> t11{{2, -1, -1}, {2, 0, -2}, {2, 1, -1}, {3, -1, -4},
                                         {3, 1, 4},   {4, -1, -4}, {4, 0, 8},  {4, 1, -4}};
  if (q == 0) return r == 0 ? t00 : t01;
  return r == 0 ? t10 : t11;
}

/// T_qr(k) given F_n at the lattice tau = h j: F(j, n) with F(j <= 0, .) = 0.
template <class FAt>
inline double time_galerkin_entry(int q, int r, int k, double h, FAt&& F) {
  double s = 0.0;
  for (const auto& term : time_galerkin_terms(q, r)) {
    const int j = k + term.m;
    if (j <= 0) continue;
    s += term.c * std::pow(h, 2 - term.n) * F(j, term.n);
  }
  return s;
}

}  // namespace stbem
