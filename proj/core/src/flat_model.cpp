#include "flatplan/flat_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "flatplan/errors.hpp"

namespace flatplan {

namespace {

void requireSpeed(const Vec2& d_sigma) {
  const double speed = d_sigma.norm();
  if (!(speed >= kEpsSpeed)) {
    throw SpeedSingularity("flat velocity magnitude " + std::to_string(speed) +
                           " is below the singularity threshold");
  }
}

}  // namespace

std::vector<Vec2> VehicleGeometry::footprint() const {
  const std::size_t n = body_vertices.size();
  if (inflation == 0.0 || n < 3) return body_vertices;
  const Mat2 b = auxB();
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& prev = body_vertices[(i + n - 1) % n];
    const Vec2& cur = body_vertices[i];
    const Vec2& next = body_vertices[(i + 1) % n];
    // Outward normals of the two incident edges (clockwise order).
    const Vec2 n0 = (b * (cur - prev)).normalized();
    const Vec2 n1 = (b * (next - cur)).normalized();
    const Vec2 bis = n0 + n1;
    const double c = 1.0 + n0.dot(n1);
    out[i] = cur + inflation * bis / c;
  }
  return out;
}

void VehicleGeometry::validate() const {
  if (!(wheelbase > 0.0)) throw ValidationError("vehicle.wheelbase must be > 0");
  if (!(inflation >= 0.0)) throw ValidationError("vehicle.inflation must be >= 0");
  const std::size_t n = body_vertices.size();
  if (n < 3) throw ValidationError("vehicle.body needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = body_vertices[i];
    const Vec2& b = body_vertices[(i + 1) % n];
    const Vec2& c = body_vertices[(i + 2) % n];
    // Clockwise convex: every turn is to the right.
    if (!(cross2(b - a, c - b) < -1e-12)) {
      throw ValidationError("vehicle.body must be a clockwise convex polygon");
    }
  }
}

VehicleGeometry VehicleGeometry::box(double length, double width, double rear_overhang,
                                     double wheelbase, double inflation) {
  VehicleGeometry g;
  g.wheelbase = wheelbase;
  g.inflation = inflation;
  const double back = -rear_overhang;
  const double front = length - rear_overhang;
  const double half = 0.5 * width;
  // Clockwise starting at the rear-left corner.
  g.body_vertices = {Vec2(back, half), Vec2(front, half), Vec2(front, -half), Vec2(back, -half)};
  return g;
}

VehicleState recoverState(const FlatPoint& fp, Direction dir, const VehicleGeometry& geom) {
  requireSpeed(fp.d_sigma);
  const double eta = sign(dir);
  const Vec2& v = fp.d_sigma;
  const Vec2& a = fp.dd_sigma;
  const double speed2 = v.squaredNorm();
  const double speed = std::sqrt(speed2);
  const double crs = cross2(v, a);

  VehicleState s;
  s.position = fp.sigma;
  s.v = eta * speed;
  s.theta = std::atan2(eta * v.y(), eta * v.x());
  if (s.theta <= -std::numbers::pi) s.theta += 2.0 * std::numbers::pi;
  s.a_t = eta * v.dot(a) / speed;
  s.a_n = eta * crs / speed;
  s.kappa = eta * crs / (speed2 * speed);
  s.phi = std::atan(s.kappa * geom.wheelbase);
  return s;
}

Mat2 rotationFromFlat(const Vec2& d_sigma, Direction dir) {
  requireSpeed(d_sigma);
  const Vec2 t = sign(dir) * d_sigma / d_sigma.norm();
  Mat2 r;
  r.col(0) = t;
  r.col(1) = auxB() * t;
  return r;
}

Mat2 rotationJacobianT(const Vec2& l, const Vec2& d_sigma, Direction dir) {
  requireSpeed(d_sigma);
  const double speed = d_sigma.norm();
  const Mat2 r = rotationFromFlat(d_sigma, dir);
  Mat2 lb;
  lb.col(0) = l;
  lb.col(1) = auxB() * l;
  return sign(dir) * lb.transpose() / speed - d_sigma * (r * l).transpose() / (speed * speed);
}

}  // namespace flatplan
