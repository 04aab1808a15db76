#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stbem/error.hpp"

namespace stbem {

using Vec2 = Eigen::Vector2d;

/// Smooth closed curve parameterised over [0, 1). Only circles and
/// axis-aligned ellipses centred at the origin are built in.
class BoundaryCurve {
 public:
  enum class Kind { circle, ellipse };

  static BoundaryCurve circle(double radius = 1.0) {
    require(radius > 0.0, "circle radius must be positive");
    return BoundaryCurve(Kind::circle, radius, radius);
  }

  static BoundaryCurve ellipse(double a, double b) {
    require(a > 0.0 && b > 0.0, "ellipse semi-axes must be positive");
    return BoundaryCurve(Kind::ellipse, a, b);
  }

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double radius() const { return a_; }

  /// Circles are invariant under parameter shifts, which makes every
  /// Galerkin block circulant.
  bool rotation_invariant() const { return kind_ == Kind::circle; }

  Vec2 point(double u) const {
    const double th = angle(u);
    return {a_ * std::cos(th), b_ * std::sin(th)};
  }

  /// Derivative of the parameterisation.
  Vec2 tangent(double u) const {
    const double th = angle(u);
    const double s = 2.0 * std::numbers::pi;
    return {-s * a_ * std::sin(th), s * b_ * std::cos(th)};
  }

  double speed(double u) const {
    const double th = angle(u);
    return 2.0 * std::numbers::pi * std::hypot(a_ * std::sin(th), b_ * std::cos(th));
  }

  Vec2 normal(double u) const {
    const double th = angle(u);
    const Vec2 n(b_ * std::cos(th), a_ * std::sin(th));
    return n / n.norm();
  }

  /// |gamma(u) - gamma(v)|^2 without cancellation for nearby parameters.
  double chord_sq(double u, double v) const {
    const double s = std::numbers::pi * (u + v);
    const double d = std::numbers::pi * (u - v);
    const double sd = std::sin(d), ss = std::sin(s), cs = std::cos(s);
    return 4.0 * sd * sd * (a_ * a_ * ss * ss + b_ * b_ * cs * cs);
  }

  /// (gamma(u) - gamma(v)) . n(v), cancellation free.
  double offset_dot_normal(double u, double v) const {
    const double thv = angle(v);
    const double sd = std::sin(std::numbers::pi * (u - v));
    const double norm = std::hypot(b_ * std::cos(thv), a_ * std::sin(thv));
    return -2.0 * a_ * b_ * sd * sd / norm;
  }

  /// Negative inside, zero on the curve, positive outside.
  double level_set(const Vec2& x) const {
    return (x.x() / a_) * (x.x() / a_) + (x.y() / b_) * (x.y() / b_) - 1.0;
  }

  double length() const {
    if (kind_ == Kind::circle) return 2.0 * std::numbers::pi * a_;
    // periodic trapezoid rule converges geometrically for analytic integrands
    constexpr int n = 512;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += speed(static_cast<double>(k) / n);
    return sum / n;
  }

  std::string describe() const {
    if (kind_ == Kind::circle) return "circle(R=" + std::to_string(a_) + ")";
    return "ellipse(a=" + std::to_string(a_) + ", b=" + std::to_string(b_) + ")";
  }

 private:
  BoundaryCurve(Kind k, double a, double b) : kind_(k), a_(a), b_(b) {}
  static double angle(double u) { return 2.0 * std::numbers::pi * (u - std::floor(u)); }

  Kind kind_;
  double a_, b_;
};

/// Uniform dyadic partition of the parameter domain.
struct BoundaryMesh {
  BoundaryCurve curve;
  int level;
  int base_count;

  int size() const { return base_count << level; }
  double width() const { return 1.0 / size(); }
  double start(int k) const { return static_cast<double>(k) / size(); }
  double end(int k) const { return static_cast<double>(k + 1) / size(); }

  std::vector<double> breakpoints() const {
    std::vector<double> b(size() + 1);
    for (int k = 0; k <= size(); ++k) b[k] = start(k);
    return b;
  }
};

inline BoundaryMesh mesh(const BoundaryCurve& curve, int level, int M0) {
  require(M0 >= 1, "mesh: base element count must be at least 1");
  require(level >= 0 && level < 24, "mesh: level out of range");
  return BoundaryMesh{curve, level, M0};
}

}  // namespace stbem
