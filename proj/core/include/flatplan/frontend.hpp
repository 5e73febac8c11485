#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "flatplan/grid.hpp"
#include "flatplan/reeds_shepp.hpp"

namespace flatplan {

struct HybridAStarParams {
  double xy_resolution = 0.3;
  int heading_bins = 72;
  double arc_length = 0.0;  // primitive length; <= 0 means 1.5 * xy_resolution
  double forward_cost = 1.0;
  double backward_cost = 2.0;
  double switch_cost = 3.0;
  std::size_t max_expansions = 200000;
};

struct SearchResult {
  std::vector<PathPose> path;  // path[i].dir is the motion that reaches pose i
  std::size_t expansions = 0;
  bool analytic_hit = false;
};

// Pose after driving `signed_length` meters with constant curvature `kappa`.
Pose2 advanceArc(const Pose2& p, double kappa, double signed_length);

// Shortest Reeds-Shepp connection sampled at the grid resolution, or nothing
// if any sampled footprint collides.
std::optional<std::vector<PathPose>> reedsSheppShot(const CollisionChecker& checker, const Pose2& from,
                                                    const Pose2& to, double kappa_max);

// Hybrid A* over (x, y, heading, gear) with left/straight/right primitives in
// both gears. Throws NoPathFound when the open set or the expansion budget is
// exhausted, or when start or goal collide.
SearchResult hybridAStar(const OccupancyGrid& grid, const Pose2& start, const Pose2& goal,
                         const Polygon& footprint, double kappa_max, const HybridAStarParams& params = {});

double pathLength(const std::vector<PathPose>& path);
int directionSwitches(const std::vector<PathPose>& path);

struct SegmentPlanParams {
  double v_ref = 2.0;
  int pieces = 0;              // pieces per segment; <= 0 means from piece_length
  double piece_length = 2.0;   // target arc length per piece
  double min_duration = 0.5;   // lower clamp on each segment duration
  double merge_length = 1e-3;  // segments shorter than this are merged away
};

struct PlanSegment {
  Direction eta = Direction::Forward;
  std::vector<Pose2> poses;
  std::vector<double> arc;          // cumulative arc length at each pose
  std::vector<Vec2> waypoints;      // interior piece junctions, pieces - 1 of them
  int pieces = 1;
  double duration = 0.0;

  double length() const { return arc.empty() ? 0.0 : arc.back(); }
  // Pose at arc length s (clamped), interpolated linearly between samples.
  Pose2 poseAt(double s) const;
};

struct InitialPlan {
  std::vector<PlanSegment> segments;
  std::vector<Vec2> shift_positions;   // one per segment boundary
  std::vector<double> shift_headings;  // vehicle heading at each boundary
};

InitialPlan segmentPlan(const std::vector<PathPose>& path, const SegmentPlanParams& params = {});

}  // namespace flatplan
