#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "stbem/error.hpp"

namespace stbem {

using Rational = boost::rational<long long>;

/// Parses "p/q", integers and plain decimals ("0.5", "-1.25") exactly.
inline Rational parse_rational(const std::string& text) {
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  require(!s.empty(), "empty rational");
  try {
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
      const long long p = std::stoll(s.substr(0, slash));
      const long long q = std::stoll(s.substr(slash + 1));
      require(q != 0, "rational with zero denominator: " + text);
      return Rational(p, q);
    }
    const auto dot = s.find('.');
    if (dot == std::string::npos) {
      std::size_t used = 0;
      const long long p = std::stoll(s, &used);
      require(used == s.size(), "malformed rational: " + text);
      return Rational(p);
    }
    const bool neg = s[0] == '-';
    const std::string ip = s.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
    const std::string fp = s.substr(dot + 1);
    require(fp.size() <= 12 && fp.find_first_not_of("0123456789") == std::string::npos &&
                ip.find_first_not_of("0123456789") == std::string::npos,
            "malformed rational: " + text);
    long long den = 1;
    for (std::size_t k = 0; k < fp.size(); ++k) den *= 10;
    const long long num = (ip.empty() ? 0 : std::stoll(ip)) * den + (fp.empty() ? 0 : std::stoll(fp));
    return Rational(neg ? -num : num, den);
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("malformed rational: " + text);
  }
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

struct LevelPair {
  int lx = 0;
  int lt = 0;
  auto operator<=>(const LevelPair&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const LevelPair& p) {
  return os << "(" << p.lx << "," << p.lt << ")";
}

/// floor(L / sigma) for sigma^2 = s2: largest m with m^2 <= L^2 / s2.
inline int floor_L_over_sigma(int L, const Rational& s2) {
  int m = 0;
  while (static_cast<long long>(m + 1) * (m + 1) * s2.numerator() <=
         static_cast<long long>(L) * L * s2.denominator())
    ++m;
  return m;
}

/// floor(sigma L): largest m with m^2 <= s2 L^2.
inline int floor_sigma_L(int L, const Rational& s2) {
  int m = 0;
  while (static_cast<long long>(m + 1) * (m + 1) * s2.denominator() <=
         static_cast<long long>(L) * L * s2.numerator())
    ++m;
  return m;
}

/// ceil(sigma L): smallest m with m^2 >= s2 L^2.
inline int ceil_sigma_L(int L, const Rational& s2) {
  int m = 0;
  while (static_cast<long long>(m) * m * s2.denominator() <
         static_cast<long long>(L) * L * s2.numerator())
    ++m;
  return m;
}

/// ceil of a nonnegative rational.
inline long long ceil_rational(const Rational& r) {
  const long long q = r.numerator() / r.denominator();
  return (q * r.denominator() == r.numerator() || r < 0) ? q : q + 1;
}

class IndexSet {
 public:
  enum class Kind { full_tensor, sparse, optimized, adaptive };

  IndexSet() = default;
  explicit IndexSet(std::set<LevelPair> idx, Kind kind = Kind::adaptive)
      : indices_(std::move(idx)), kind_(kind) {}

  Kind kind() const { return kind_; }
  int level() const { return L_; }
  const Rational& sigma2() const { return sigma2_; }
  std::optional<Rational> threshold() const { return T_; }

  const std::set<LevelPair>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool contains(const LevelPair& p) const { return indices_.count(p) > 0; }
  void insert(const LevelPair& p) { indices_.insert(p); }

  int max_lx() const {
    int m = 0;
    for (const auto& p : indices_) m = std::max(m, p.lx);
    return m;
  }
  int max_lt() const {
    int m = 0;
    for (const auto& p : indices_) m = std::max(m, p.lt);
    return m;
  }

  bool is_downset() const {
    for (const auto& p : indices_) {
      if (p.lx < 0 || p.lt < 0) return false;
      if (p.lx > 0 && !contains({p.lx - 1, p.lt})) return false;
      if (p.lt > 0 && !contains({p.lx, p.lt - 1})) return false;
    }
    return true;
  }

  /// Indices outside the set whose downward neighbours all lie inside.
  std::vector<LevelPair> admissible_neighbours() const {
    std::set<LevelPair> out;
    for (const auto& p : indices_) {
      for (const LevelPair c : {LevelPair{p.lx + 1, p.lt}, LevelPair{p.lx, p.lt + 1}}) {
        if (contains(c)) continue;
        const bool ok = (c.lx == 0 || contains({c.lx - 1, c.lt})) && (c.lt == 0 || contains({c.lx, c.lt - 1}));
        if (ok) out.insert(c);
      }
    }
    if (indices_.empty()) out.insert({0, 0});
    return {out.begin(), out.end()};
  }

  void write_text(std::ostream& os) const {
    for (const auto& p : indices_) os << p.lx << ' ' << p.lt << '\n';
  }

  static IndexSet read_text(std::istream& is) {
    std::set<LevelPair> idx;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
      std::istringstream ls(line);
      LevelPair p;
      std::string rest;
      if (!(ls >> p.lx >> p.lt) || (ls >> rest) || p.lx < 0 || p.lt < 0)
        throw ConfigError("index set line " + std::to_string(lineno) + ": expected \"lx lt\"");
      idx.insert(p);
    }
    return IndexSet(std::move(idx), Kind::adaptive);
  }

 private:
  friend IndexSet full_tensor_set(int, const Rational&);
  friend IndexSet sparse_set(int, const Rational&);
  friend IndexSet optimized_set(int, const Rational&, std::optional<Rational>);

  std::set<LevelPair> indices_;
  Kind kind_ = Kind::adaptive;
  int L_ = 0;
  Rational sigma2_{1};
  std::optional<Rational> T_;
};

/// {lx <= floor(L / sigma), lt <= floor(sigma L)}.
inline IndexSet full_tensor_set(int L, const Rational& sigma2) {
  require(L >= 0, "index set level must be nonnegative");
  require(sigma2 > 0, "sigma^2 must be positive");
  IndexSet s;
  s.kind_ = IndexSet::Kind::full_tensor;
  s.L_ = L;
  s.sigma2_ = sigma2;
  const int Lx = floor_L_over_sigma(L, sigma2), Lt = floor_sigma_L(L, sigma2);
  for (int x = 0; x <= Lx; ++x)
    for (int t = 0; t <= Lt; ++t) s.indices_.insert({x, t});
  return s;
}

/// sigma lx + lt / sigma <= L, tested as (sigma^2 lx + lt)^2 <= sigma^2 L^2.
inline bool sparse_member(const LevelPair& p, int L, const Rational& s2) {
  const Rational lhs = s2 * p.lx + p.lt;
  return lhs * lhs <= s2 * L * L;
}

inline IndexSet sparse_set(int L, const Rational& sigma2) {
  require(L >= 0, "index set level must be nonnegative");
  require(sigma2 > 0, "sigma^2 must be positive");
  IndexSet s;
  s.kind_ = IndexSet::Kind::sparse;
  s.L_ = L;
  s.sigma2_ = sigma2;
  const int Lx = floor_L_over_sigma(L, sigma2), Lt = floor_sigma_L(L, sigma2);
  for (int x = 0; x <= Lx; ++x)
    for (int t = 0; t <= Lt; ++t)
      if (sparse_member({x, t}, L, sigma2)) s.indices_.insert({x, t});
  return s;
}

/// sigma lx + lt/sigma - T max{sigma lx, lt/sigma} <= (1 - T) L; an empty T
/// stands for the limit T -> -infinity, i.e. max{sigma lx, lt/sigma} <= L.
inline bool optimized_member(const LevelPair& p, int L, const Rational& s2, std::optional<Rational> T) {
  const Rational x = s2 * p.lx;
  const Rational t(p.lt);
  const Rational mx = std::max(x, t);
  if (!T) return mx * mx <= s2 * L * L;
  const Rational B = x + t - *T * mx;
  if (B <= 0) return true;
  const Rational one_minus = Rational(1) - *T;
  return B * B <= one_minus * one_minus * s2 * L * L;
}

inline IndexSet optimized_set(int L, const Rational& sigma2, std::optional<Rational> T) {
  require(L >= 0, "index set level must be nonnegative");
  require(sigma2 > 0, "sigma^2 must be positive");
  require(!T || *T < 1, "optimised index set requires T < 1");
  IndexSet s;
  s.kind_ = IndexSet::Kind::optimized;
  s.L_ = L;
  s.sigma2_ = sigma2;
  s.T_ = T;
  const int Lx = floor_L_over_sigma(L, sigma2), Lt = floor_sigma_L(L, sigma2);
  for (int x = 0; x <= Lx; ++x)
    for (int t = 0; t <= Lt; ++t)
      if (optimized_member({x, t}, L, sigma2, T)) s.indices_.insert({x, t});
  return s;
}

inline bool is_downset(const IndexSet& s) { return s.is_downset(); }

/// Smallest downset containing the given indices.
inline IndexSet downset_closure(const std::vector<LevelPair>& gens) {
  std::set<LevelPair> idx;
  for (const auto& g : gens) {
    require(g.lx >= 0 && g.lt >= 0, "negative level in downset closure");
    for (int x = 0; x <= g.lx; ++x)
      for (int t = 0; t <= g.lt; ++t) idx.insert({x, t});
  }
  return IndexSet(std::move(idx), IndexSet::Kind::adaptive);
}

/// Combination coefficients of a downset: c_l = sum_{z in {0,1}^2} (-1)^{|z|} [l + z in S].
inline std::vector<std::pair<LevelPair, int>> combination_coefficients(const IndexSet& s) {
  std::vector<std::pair<LevelPair, int>> out;
  for (const auto& p : s.indices()) {
    int c = 0;
    for (int zx = 0; zx <= 1; ++zx)
      for (int zt = 0; zt <= 1; ++zt)
        if (s.contains({p.lx + zx, p.lt + zt})) c += ((zx + zt) % 2) ? -1 : 1;
    if (c != 0) out.emplace_back(p, c);
  }
  return out;
}

}  // namespace stbem
