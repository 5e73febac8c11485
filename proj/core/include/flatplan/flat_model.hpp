#pragma once

#include <Eigen/Core>
#include <vector>

namespace flatplan {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Below this flat-velocity magnitude (m/s) heading and curvature are undefined.
inline constexpr double kEpsSpeed = 1e-6;

// Motion direction of a trajectory segment (eta in the kinematic model).
enum class Direction : int { Backward = -1, Forward = 1 };

constexpr double sign(Direction d) { return static_cast<double>(static_cast<int>(d)); }
constexpr Direction opposite(Direction d) {
  return d == Direction::Forward ? Direction::Backward : Direction::Forward;
}

// Antisymmetric 90 degree rotation [[0,-1],[1,0]].
inline Mat2 auxB() {
  Mat2 b;
  b << 0.0, -1.0, 1.0, 0.0;
  return b;
}

// b^T B a, i.e. the z component of a x b.
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Flat output (rear-axle position) and its first three time derivatives.
struct FlatPoint {
  Vec2 sigma = Vec2::Zero();
  Vec2 d_sigma = Vec2::Zero();
  Vec2 dd_sigma = Vec2::Zero();
  Vec2 ddd_sigma = Vec2::Zero();
};

struct VehicleState {
  Vec2 position = Vec2::Zero();
  double theta = 0.0;  // (-pi, pi]
  double v = 0.0;      // signed longitudinal speed
  double a_t = 0.0;
  double a_n = 0.0;
  double phi = 0.0;  // front steering angle
  double kappa = 0.0;
};

// Vehicle footprint as a clockwise convex polygon in the rear-axle body frame.
struct VehicleGeometry {
  double wheelbase = 2.0;
  std::vector<Vec2> body_vertices;
  double inflation = 0.0;

  // Body polygon grown outward by `inflation` (mitred corners). This is the
  // polygon every collision and containment test uses.
  std::vector<Vec2> footprint() const;

  // Throws ValidationError if the body is not a clockwise convex polygon.
  void validate() const;

  // Rectangle of given length/width with `rear_overhang` behind the rear axle.
  static VehicleGeometry box(double length, double width, double rear_overhang,
                             double wheelbase, double inflation = 0.0);
};

// Full state from flat outputs. Throws SpeedSingularity if |d_sigma| < kEpsSpeed.
VehicleState recoverState(const FlatPoint& fp, Direction dir, const VehicleGeometry& geom);

// Body-to-world rotation, eta/|d_sigma| * [d_sigma, B d_sigma].
Mat2 rotationFromFlat(const Vec2& d_sigma, Direction dir);

// Transposed Jacobian of R(d_sigma) * l with respect to d_sigma, so that
// d/d(d_sigma) [a^T R l] = rotationJacobianT(l, ...) * a for a constant a.
Mat2 rotationJacobianT(const Vec2& l, const Vec2& d_sigma, Direction dir);

}  // namespace flatplan
