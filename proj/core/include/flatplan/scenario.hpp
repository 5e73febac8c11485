#pragma once

#include <array>
#include <string>
#include <vector>

#include "flatplan/frontend.hpp"
#include "flatplan/grid.hpp"
#include "flatplan/lbfgs.hpp"
#include "flatplan/optimizer.hpp"
#include "flatplan/penalties.hpp"

namespace flatplan {

// Pose plus signed longitudinal speed and tangential acceleration.
struct StateSpec {
  Pose2 pose;
  double v = 0.0;
  double a = 0.0;
};

struct RectangleObstacle {
  Vec2 center = Vec2::Zero();
  double length = 1.0;
  double width = 1.0;
  double yaw = 0.0;

  Polygon polygon() const;  // clockwise
};

struct MapSpec {
  double resolution = 0.1;
  Vec2 origin = Vec2::Zero();
  double size_x = 20.0;  // meters
  double size_y = 20.0;
  std::vector<Polygon> polygons;  // convex; stored clockwise
  std::vector<RectangleObstacle> rectangles;
  std::vector<std::array<int, 2>> occupied;  // explicit cells
};

struct DynamicObstacleSpec {
  Polygon body;  // clockwise, body frame
  ObstacleTrajectory trajectory;
};

struct FrontendConfig {
  HybridAStarParams search;
  SegmentPlanParams segments;
  double corridor_max_extent = 10.0;
};

struct Scenario {
  std::string name = "scenario";
  MapSpec map;
  StateSpec start;
  StateSpec goal;
  VehicleGeometry vehicle = VehicleGeometry::box(4.6, 1.9, 1.0, 2.8);
  std::vector<DynamicObstacleSpec> dynamic_obstacles;
  FrontendConfig frontend;
  ConstraintConfig constraints;
  SolverConfig solver;

  // Rasterizes polygons, rectangles and explicit cells.
  OccupancyGrid buildGrid() const;
  std::vector<DynamicObstacle> obstacles() const;
  // Throws ValidationError naming the violated field.
  void validate() const;
};

// Throws ParseError (with line and column for syntax errors) or ValidationError.
Scenario parseScenario(const std::string& text, const std::string& source = "<string>");
Scenario loadScenario(const std::string& path);
std::string dumpScenario(const Scenario& s);
void saveScenario(const Scenario& s, const std::string& path);

}  // namespace flatplan
