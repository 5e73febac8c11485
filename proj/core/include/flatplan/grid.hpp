#pragma once

#include <cstdint>
#include <vector>

#include "flatplan/geometry.hpp"
#include "flatplan/reeds_shepp.hpp"

namespace flatplan {

// Boolean occupancy grid. Cell (ix, iy) covers
// [origin + ix*res, origin + (ix+1)*res) x [origin + iy*res, ...).
// Everything outside the grid counts as occupied.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(double resolution, const Vec2& origin, int width, int height);

  double resolution() const { return resolution_; }
  const Vec2& origin() const { return origin_; }
  int width() const { return width_; }
  int height() const { return height_; }

  bool inBounds(int ix, int iy) const { return ix >= 0 && iy >= 0 && ix < width_ && iy < height_; }
  bool occupied(int ix, int iy) const;
  void setOccupied(int ix, int iy, bool value = true);

  Vec2 cellCenter(int ix, int iy) const;
  // Floor of the world position in cell units; may be out of bounds.
  void worldToCell(const Vec2& p, int& ix, int& iy) const;

  // Marks every cell whose square overlaps the polygon interior.
  void rasterize(const Polygon& poly);

  // Centers of occupied cells plus a one-cell ring just outside the grid.
  std::vector<Vec2> obstacleCenters() const;

  const std::vector<std::uint8_t>& cells() const { return cells_; }

 private:
  double resolution_ = 0.1;
  Vec2 origin_ = Vec2::Zero();
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> cells_;
};

// Footprint collision test against a grid: a pose collides when an occupied
// cell center lies strictly inside the footprint grown by `margin`.
class CollisionChecker {
 public:
  CollisionChecker(const OccupancyGrid& grid, Polygon footprint, double margin = 0.0);

  bool collides(const Pose2& pose) const;
  bool collides(const Vec2& position, const Mat2& R) const;

  const OccupancyGrid& grid() const { return *grid_; }
  const Polygon& footprint() const { return footprint_; }
  double margin() const { return margin_; }

 private:
  const OccupancyGrid* grid_;
  Polygon footprint_;
  std::vector<HalfPlane> body_planes_;
  double margin_;
  Polygon grown_;                  // footprint grown by the margin, mitred corners
  std::vector<Vec2> disk_centers_;  // body-frame disks covering grown_
  double disk_radius_ = 0.0;
  std::vector<float> clearance_;  // distance from each cell center to the nearest obstacle center
};

}  // namespace flatplan
