#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "stbem/error.hpp"
#include "stbem/indexsets.hpp"

namespace stbem {

/// Regularity and degree data for the a-priori rates. mu and lambda default
/// to px + 1 and pt + 1.
struct RateModel {
  int px = 0;
  int pt = 0;
  int d = 2;
  Rational sigma2{1};
  Rational mu{1};
  Rational lambda{1};

  static RateModel standard(int px, int pt, int d, Rational sigma2 = Rational(1)) {
    RateModel m{px, pt, d, sigma2, Rational(px + 1), Rational(pt + 1)};
    m.validate();
    return m;
  }

  void validate() const {
    require(px >= 0 && pt >= 0, "negative polynomial degree");
    require(d >= 2, "dimension must be at least 2");
    require(mu > 0 && mu <= px + 1, "need 0 < mu <= px + 1");
    require(lambda > 0 && lambda <= pt + 1, "need 0 < lambda <= pt + 1");
    require(sigma2 > 0, "sigma^2 must be positive");
  }
};

struct FullRate {
  Rational gamma;          // rate of the energy norm in N
  Rational sigma2_opt;     // optimal scaling
  Rational squared_rate;   // rate of the squared energy norm, 2 gamma
};

/// Optimal full tensor rate: squared rate (2 mu + 1) / (d - 1 + sigma^2) at
/// sigma^2 = (mu + 1/2) / (lambda + 1/4).
inline FullRate predicted_rate_full(const RateModel& m) {
  m.validate();
  const Rational half(1, 2), quarter(1, 4);
  const Rational s2 = (m.mu + half) / (m.lambda + quarter);
  const Rational sq = (2 * m.mu + 1) / (Rational(m.d - 1) + s2);
  return {sq / 2, s2, sq};
}

/// Squared rate for an arbitrary scaling: 2 min{(lambda + 1/4) sigma^2, mu + 1/2} / (sigma^2 + d - 1).
inline Rational general_full_rate(const RateModel& m, const Rational& sigma2) {
  m.validate();
  require(sigma2 > 0, "sigma^2 must be positive");
  const Rational a = (m.lambda + Rational(1, 4)) * sigma2;
  const Rational b = m.mu + Rational(1, 2);
  return 2 * std::min(a, b) / (sigma2 + Rational(m.d - 1));
}

/// gamma = min{(mu + 1/2) / sigma^2, lambda + 1/4, (2 lambda + mu + 1/2) / (2 + sigma^2)}.
inline Rational predicted_rate_sparse(const RateModel& m) {
  m.validate();
  const Rational half(1, 2), quarter(1, 4);
  return std::min({(m.mu + half) / m.sigma2, m.lambda + quarter, (2 * m.lambda + m.mu + half) / (Rational(2) + m.sigma2)});
}

/// Exponent function f(lx, lt) = max{lx/2, lt/4} + max{mu lx, lambda lt};
/// the full tensor error is governed by its minimum outside the index set.
inline double exponent_function(const RateModel& m, int lx, int lt) {
  return std::max(0.5 * lx, 0.25 * lt) + std::max(to_double(m.mu) * lx, to_double(m.lambda) * lt);
}

struct OutsideMinimum {
  LevelPair where;
  double value;
};

/// Minimum of a monotonically increasing F outside the full tensor set
/// {lx <= floor(L/sigma), lt <= floor(sigma L)}: attained at one of the two
/// corners (floor(L/sigma) + 1, 0) and (0, floor(sigma L) + 1).
inline OutsideMinimum minimize_outside_set(const std::function<double(int, int)>& F, int L, const Rational& sigma2) {
  require(L >= 0, "level must be nonnegative");
  const LevelPair a{floor_L_over_sigma(L, sigma2) + 1, 0};
  const LevelPair b{0, floor_sigma_L(L, sigma2) + 1};
  const double fa = F(a.lx, a.lt), fb = F(b.lx, b.lt);
  return fb < fa ? OutsideMinimum{b, fb} : OutsideMinimum{a, fa};
}

struct ConvergenceRecord {
  int L = 0;
  long N = 0;
  double err2 = 0.0;
  double assemble_s = 0.0;
  double solve_s = 0.0;
};

/// Negated least-squares slope of log(err2) against log(N).
inline double fit_rate(const std::vector<ConvergenceRecord>& records) {
  require(records.size() >= 3, "rate fit needs at least three records");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(records.size());
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (k > 0) require(records[k].N > records[k - 1].N, "rate fit needs strictly increasing N");
    require(records[k].err2 > 0.0, "rate fit needs positive errors");
    const double x = std::log(static_cast<double>(records[k].N)), y = std::log(records[k].err2);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace stbem
