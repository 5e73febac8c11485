#pragma once

#include <Eigen/Core>
#include <vector>

#include "flatplan/flat_model.hpp"

namespace flatplan {

// Clockwise convex polygon.
using Polygon = std::vector<Vec2>;

// Interior is {p : normal^T p <= offset}.
struct HalfPlane {
  Vec2 normal = Vec2::Zero();
  double offset = 0.0;
};

struct HPolygon {
  std::vector<HalfPlane> rows;

  // max over rows of normal^T p - offset; <= 0 inside.
  double violation(const Vec2& p) const;
};

// Throws InvalidPolygon unless `poly` has >= 3 vertices, is strictly convex
// and clockwise.
void validatePolygon(const Polygon& poly);
bool isConvexClockwise(const Polygon& poly);

// One outward half-plane per edge (v_e -> v_{e+1}). Throws DegenerateEdge.
std::vector<HalfPlane> hrepFromVertices(const Polygon& poly);

Polygon transformPolygon(const Polygon& body, const Mat2& R, const Vec2& t);

// Exact signed distance: separation when disjoint, minus penetration depth
// when overlapping.
double sdExact(const Polygon& P, const Polygon& Q);

// Lower bound on the signed distance built from edge normals of both shapes.
double lbSd(const Polygon& ego, const Polygon& obs);

struct LseResult {
  double value = 0.0;
  Eigen::VectorXd weights;  // d value / d values
};

// alpha^{-1} log sum exp(alpha * values); alpha > 0 smooths max, alpha < 0 min.
LseResult lse(const Eigen::VectorXd& values, double alpha);

struct SmoothDistanceConfig {
  double alpha_max = 100.0;
  double alpha_min = -100.0;
};

// Obstacle pose and its time derivative at a stamp.
struct ObstaclePose {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Mat2 rotation = Mat2::Identity();
  Mat2 rotation_rate = Mat2::Zero();
};

struct SmoothDistance {
  double value = 0.0;
  Vec2 d_sigma = Vec2::Zero();
  Vec2 d_dsigma = Vec2::Zero();
  double d_stamp = 0.0;
};

// Smoothed signed-distance under-estimate between the ego footprint placed at
// (sigma, d_sigma, eta) and the obstacle at `pose`, with gradients.
// Throws SpeedSingularity.
SmoothDistance smoothDistance(const Vec2& sigma, const Vec2& d_sigma, Direction eta,
                              const Polygon& ego_body, const Polygon& obs_body,
                              const ObstaclePose& pose, const SmoothDistanceConfig& cfg = {});

// Cheap certified lower bound on smoothDistance(...).value, from the
// obstacle's circumscribing circle against the ego edge normals.
double smoothDistanceLowerBound(const Vec2& sigma, const Vec2& d_sigma, Direction eta, const Polygon& ego_body,
                                const Polygon& obs_body, const ObstaclePose& pose, const SmoothDistanceConfig& cfg = {});

}  // namespace flatplan
