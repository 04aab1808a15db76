#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "stbem/error.hpp"

namespace stbem::special {

inline constexpr double euler_gamma = std::numbers::egamma;

/// Arguments beyond this make E1 and e^{-z} underflow; callers get 0.
inline constexpr double underflow_argument = 700.0;

/// Exponential integral E1(z) for z > 0.
/// Power series for z <= 1, modified Lentz continued fraction above.
inline double expint_e1(double z) {
  if (!(z > 0.0)) throw ConfigError("expint_e1: argument must be positive");
  if (z > underflow_argument) return 0.0;
  if (z <= 1.0) {
    // E1 = -gamma - ln z - sum_{k>=1} (-z)^k / (k k!)
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= -z / k;
      const double contrib = term / k;
      sum += contrib;
      if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(z) - sum;
  }
  constexpr double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

namespace detail {

// Ascending series, accumulated in long double to tame cancellation near |z| = 12.
inline double bessel_series(int nu, double z) {
  const long double half = 0.5L * z;
  long double term = 1.0L;
  for (int k = 1; k <= nu; ++k) term *= half / k;
  long double sum = term;
  const long double q = -half * half;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-21L * std::abs(sum)) break;
  }
  return static_cast<double>(sum);
}

// Hankel asymptotic expansion, truncated at the smallest term.
inline double bessel_hankel(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(term) > last) break;
    last = std::abs(term);
    // even k feed P with alternating signs, odd k feed Q
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (last < 1e-17) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

inline double bessel_j0(double z) {
  const double x = std::abs(z);
  return x <= 12.0 ? detail::bessel_series(0, x) : detail::bessel_hankel(0, x);
}

inline double bessel_j1(double z) {
  const double x = std::abs(z);
  const double v = x <= 12.0 ? detail::bessel_series(1, x) : detail::bessel_hankel(1, x);
  return z < 0.0 ? -v : v;
}

/// First `count` positive zeros of J1 (McMahon start, Newton polish).
inline std::vector<double> bessel_j1_zeros(int count) {
  require(count >= 0, "bessel_j1_zeros: negative count");
  std::vector<double> zeros;
  zeros.reserve(count);
  for (int k = 1; k <= count; ++k) {
    const double beta = (k + 0.25) * std::numbers::pi;
    double x = beta - 3.0 / (8.0 * beta) + 36.0 / (1536.0 * beta * beta * beta);
    for (int it = 0; it < 50; ++it) {
      const double j1 = bessel_j1(x);
      const double dj1 = bessel_j0(x) - j1 / x;
      const double step = j1 / dj1;
      x -= step;
      if (std::abs(step) < 1e-15 * x) break;
    }
    zeros.push_back(x);
  }
  return zeros;
}

}  // namespace stbem::special
