#include "flatplan/corridor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "flatplan/errors.hpp"

namespace flatplan {

namespace {

// Blocking centers are kept this far outside the rectangle so that they stay
// outside after the world-frame half-plane conversion rounds.
constexpr double kBoundaryGap = 1e-6;

Mat2 headingRotation(double theta) {
  Mat2 R;
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return R;
}

RectExtents growRectangle(const std::vector<Vec2>& local, const RectExtents& init, double step,
                          int max_rounds, std::size_t seed_index) {
  RectExtents ext = init;
  for (const Vec2& p : local) {
    if (p.x() < ext.front && p.x() > -ext.back && p.y() < ext.left && p.y() > -ext.right) {
      throw SeedInCollision(seed_index, "corridor seed " + std::to_string(seed_index) +
                                            " has an occupied cell inside the vehicle footprint box");
    }
  }

  // Directions in round-robin order: front, left, back, right. Points are
  // bucketed by their outward coordinate so each strip test only touches the
  // points that can lie in it.
  const std::size_t n = local.size();
  struct Side {
    std::vector<double> outward, lateral;
    std::vector<std::size_t> start, items;  // CSR buckets
    double base = 0.0;
    std::size_t bucket = 0;
  };
  std::array<Side, 4> sides;
  for (int d = 0; d < 4; ++d) {
    Side& sd = sides[d];
    sd.outward.resize(n);
    sd.lateral.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = local[i];
      switch (d) {
        case 0: sd.outward[i] = p.x(); sd.lateral[i] = p.y(); break;
        case 1: sd.outward[i] = p.y(); sd.lateral[i] = p.x(); break;
        case 2: sd.outward[i] = -p.x(); sd.lateral[i] = p.y(); break;
        default: sd.outward[i] = -p.y(); sd.lateral[i] = p.x(); break;
      }
    }
    sd.base = n ? *std::min_element(sd.outward.begin(), sd.outward.end()) : 0.0;
    std::size_t nb = 1;
    std::vector<std::size_t> key(n);
    for (std::size_t i = 0; i < n; ++i) {
      key[i] = static_cast<std::size_t>((sd.outward[i] - sd.base) / step);
      nb = std::max(nb, key[i] + 1);
    }
    sd.start.assign(nb + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++sd.start[key[i] + 1];
    for (std::size_t b = 0; b < nb; ++b) sd.start[b + 1] += sd.start[b];
    sd.items.resize(n);
    std::vector<std::size_t> fill(sd.start.begin(), sd.start.end() - 1);
    for (std::size_t i = 0; i < n; ++i) sd.items[fill[key[i]]++] = i;
  }

  std::array<double*, 4> e = {&ext.front, &ext.left, &ext.back, &ext.right};
  std::array<bool, 4> blocked{};
  for (int round = 0; round < max_rounds; ++round) {
    if (blocked[0] && blocked[1] && blocked[2] && blocked[3]) break;
    for (int d = 0; d < 4; ++d) {
      if (blocked[d]) continue;
      Side& sd = sides[d];
      // lateral span of the side: front/back use (-right, left), left/right use (-back, front)
      const double lo = (d % 2 == 0) ? -ext.right : -ext.back;
      const double hi = (d % 2 == 0) ? ext.left : ext.front;
      const double cur = *e[d];
      const double limit = cur + step;
      const std::size_t nb = sd.start.size() - 1;
      // skip buckets lying entirely at or below the current extent
      while (sd.bucket < nb && sd.base + (sd.bucket + 1) * step <= cur) ++sd.bucket;
      double hit = std::numeric_limits<double>::infinity();
      for (std::size_t b = sd.bucket; b < nb && sd.base + b * step <= limit; ++b) {
        for (std::size_t k = sd.start[b]; k < sd.start[b + 1]; ++k) {
          const std::size_t i = sd.items[k];
          const double o = sd.outward[i];
          if (o > cur && o <= limit && sd.lateral[i] > lo && sd.lateral[i] < hi) hit = std::min(hit, o);
        }
      }
      if (hit < std::numeric_limits<double>::infinity()) {
        *e[d] = std::max(cur, hit - kBoundaryGap);
        blocked[d] = true;
      } else {
        *e[d] = limit;
      }
    }
  }
  return ext;
}

}  // namespace

HPolygon rectangleCell(const Pose2& seed, const RectExtents& ext) {
  const Mat2 R = headingRotation(seed.theta);
  const Vec2 p = seed.position();
  const Vec2 ex = R.col(0), ey = R.col(1);
  HPolygon cell;
  cell.rows = {HalfPlane{ex, ex.dot(p) + ext.front}, HalfPlane{ey, ey.dot(p) + ext.left},
               HalfPlane{-ex, -ex.dot(p) + ext.back}, HalfPlane{-ey, -ey.dot(p) + ext.right}};
  return cell;
}

Corridor buildCorridor(const OccupancyGrid& grid, const std::vector<Pose2>& seeds,
                       const Polygon& footprint, double max_extent) {
  RectExtents init;
  init.front = init.left = -std::numeric_limits<double>::infinity();
  init.back = init.right = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : footprint) {
    init.front = std::max(init.front, v.x());
    init.back = std::max(init.back, -v.x());
    init.left = std::max(init.left, v.y());
    init.right = std::max(init.right, -v.y());
  }
  const std::vector<Vec2> centers = grid.obstacleCenters();
  const double span = grid.resolution() * std::hypot(grid.width() + 2.0, grid.height() + 2.0);
  const int max_rounds = static_cast<int>(std::ceil(span / grid.resolution())) + 4;

  Corridor out;
  out.seeds = seeds;
  out.cells.reserve(seeds.size());
  out.extents.reserve(seeds.size());
  std::vector<Vec2> local(centers.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const Mat2 Rt = headingRotation(seeds[s].theta).transpose();
    const Vec2 p = seeds[s].position();
    for (std::size_t i = 0; i < centers.size(); ++i) local[i] = Rt * (centers[i] - p);
    RectExtents ext = growRectangle(local, init, grid.resolution(), max_rounds, s);
    ext.front = std::min(ext.front, std::max(max_extent, init.front));
    ext.back = std::min(ext.back, std::max(max_extent, init.back));
    ext.left = std::min(ext.left, std::max(max_extent, init.left));
    ext.right = std::min(ext.right, std::max(max_extent, init.right));
    out.extents.push_back(ext);
    out.cells.push_back(rectangleCell(seeds[s], ext));
  }
  return out;
}

double containsFootprint(const HPolygon& cell, const Vec2& sigma, const Vec2& d_sigma,
                         Direction eta, const Polygon& footprint) {
  const Mat2 R = rotationFromFlat(d_sigma, eta);
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec2& l : footprint) {
    const Vec2 v = sigma + R * l;
    for (const HalfPlane& h : cell.rows) worst = std::max(worst, h.normal.dot(v) - h.offset);
  }
  return worst;
}

}  // namespace flatplan
