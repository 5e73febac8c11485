#pragma once

#include <vector>

#include "flatplan/geometry.hpp"
#include "flatplan/grid.hpp"
#include "flatplan/reeds_shepp.hpp"

namespace flatplan {

// Local extents of an oriented rectangle around a seed pose, meters.
struct RectExtents {
  double front = 0.0;
  double back = 0.0;
  double left = 0.0;
  double right = 0.0;
};

struct Corridor {
  std::vector<HPolygon> cells;
  std::vector<Pose2> seeds;
  std::vector<RectExtents> extents;
};

// One free oriented rectangle per seed. Each rectangle starts at the bounding
// box of `footprint` and grows round-robin (front, left, back, right) in
// resolution-sized steps; a blocked side stops on the blocking cell center.
// Extents are finally capped at max(max_extent, initial extent).
// Throws SeedInCollision if an occupied center lies inside the initial box.
Corridor buildCorridor(const OccupancyGrid& grid, const std::vector<Pose2>& seeds,
                       const Polygon& footprint, double max_extent);

HPolygon rectangleCell(const Pose2& seed, const RectExtents& ext);

// max over (vertex, half-plane) of A^T (sigma + R l_e) - b; <= 0 when the
// footprint is contained. Throws SpeedSingularity.
double containsFootprint(const HPolygon& cell, const Vec2& sigma, const Vec2& d_sigma,
                         Direction eta, const Polygon& footprint);

}  // namespace flatplan
