#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "stbem/error.hpp"

namespace stbem {

/// Dirichlet data g(u, t) = sum A t^p cos(2 pi m u), with u the curve
/// parameter (the polar angle on a circle).
struct BoundaryData {
  struct Term {
    int mode = 0;
    int power = 1;
    double amplitude = 1.0;
  };
  std::vector<Term> terms;

  double operator()(double u, double t) const {
    double s = 0.0;
    for (const auto& term : terms)
      s += term.amplitude * std::pow(t, term.power) * std::cos(2.0 * std::numbers::pi * term.mode * u);
    return s;
  }

  bool is_zero() const {
    for (const auto& t : terms)
      if (t.amplitude != 0.0) return false;
    return true;
  }

  void validate() const {
    for (const auto& t : terms) {
      require(t.mode >= 0, "data mode must be nonnegative");
      // g(., 0) = 0 is required by the zero initial condition
      require(t.power >= 1 && t.power <= 8, "data time power must lie in 1..8");
    }
  }

  static BoundaryData t2cos(int mode) { return BoundaryData{{{mode, 2, 1.0}}}; }
  static BoundaryData zero() { return BoundaryData{}; }

  /// "t2cos1", "t2cos2", "zero" or "fourier:m,p,A;m,p,A;...".
  static BoundaryData parse(const std::string& text) {
    if (text == "t2cos1") return t2cos(1);
    if (text == "t2cos2") return t2cos(2);
    if (text == "zero") return zero();
    const std::string prefix = "fourier:";
    require(text.rfind(prefix, 0) == 0, "unknown data \"" + text + "\"");
    BoundaryData d;
    std::stringstream ss(text.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ';')) {
      if (item.empty()) continue;
      Term t;
      char c1 = 0, c2 = 0;
      std::istringstream is(item);
      if (!(is >> t.mode >> c1 >> t.power >> c2 >> t.amplitude) || c1 != ',' || c2 != ',')
        throw ConfigError("malformed fourier term \"" + item + "\"");
      d.terms.push_back(t);
    }
    d.validate();
    return d;
  }
};

}  // namespace stbem
