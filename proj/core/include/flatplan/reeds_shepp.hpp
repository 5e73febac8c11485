#pragma once

#include <array>
#include <vector>

#include "flatplan/flat_model.hpp"

namespace flatplan {

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Vec2 position() const { return {x, y}; }
};

// A pose on a sampled path, tagged with the direction used to reach it.
struct PathPose {
  Pose2 pose;
  Direction dir = Direction::Forward;
  double kappa = 0.0;  // signed path curvature w.r.t. arc length
};

enum class Steer : char { Left, Straight, Right };

// Reeds-Shepp curve of up to five pieces. Lengths are signed arc lengths in
// meters; negative means driving backward.
struct RsPath {
  std::array<Steer, 5> steer{};
  std::array<double, 5> length{};
  int count = 0;

  double totalLength() const;
};

double wrapAngle(double a);  // to (-pi, pi]

// Shortest Reeds-Shepp curve between two poses with turning radius 1/kappa_max.
RsPath rsShortest(const Pose2& from, const Pose2& to, double kappa_max);

// Pose reached after travelling `s` meters (unsigned) along `path`.
Pose2 rsInterpolate(const Pose2& from, const RsPath& path, double kappa_max, double s);

// Samples every piece at spacing <= step, including both piece endpoints.
// The first entry is `from`.
std::vector<PathPose> rsSample(const Pose2& from, const RsPath& path, double kappa_max, double step);

}  // namespace flatplan
