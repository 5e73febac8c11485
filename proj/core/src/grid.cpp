#include "flatplan/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flatplan/errors.hpp"

namespace flatplan {

OccupancyGrid::OccupancyGrid(double resolution, const Vec2& origin, int width, int height)
    : resolution_(resolution), origin_(origin), width_(width), height_(height) {
  if (!(resolution > 0.0)) throw ValidationError("grid.resolution must be > 0");
  if (width <= 0 || height <= 0) throw ValidationError("grid dimensions must be positive");
  cells_.assign(static_cast<std::size_t>(width) * height, 0);
}

bool OccupancyGrid::occupied(int ix, int iy) const {
  if (!inBounds(ix, iy)) return true;
  return cells_[static_cast<std::size_t>(iy) * width_ + ix] != 0;
}

void OccupancyGrid::setOccupied(int ix, int iy, bool value) {
  if (!inBounds(ix, iy)) return;
  cells_[static_cast<std::size_t>(iy) * width_ + ix] = value ? 1 : 0;
}

Vec2 OccupancyGrid::cellCenter(int ix, int iy) const {
  return origin_ + resolution_ * Vec2(ix + 0.5, iy + 0.5);
}

void OccupancyGrid::worldToCell(const Vec2& p, int& ix, int& iy) const {
  ix = static_cast<int>(std::floor((p.x() - origin_.x()) / resolution_));
  iy = static_cast<int>(std::floor((p.y() - origin_.y()) / resolution_));
}

void OccupancyGrid::rasterize(const Polygon& poly) {
  Vec2 lo = poly.front(), hi = poly.front();
  for (const Vec2& v : poly) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  int x0, y0, x1, y1;
  worldToCell(lo, x0, y0);
  worldToCell(hi, x1, y1);
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, width_ - 1);
  y1 = std::min(y1, height_ - 1);
  const double r = resolution_;
  for (int iy = y0; iy <= y1; ++iy) {
    for (int ix = x0; ix <= x1; ++ix) {
      const Vec2 o = origin_ + r * Vec2(ix, iy);
      const Polygon cell = {o, o + Vec2(0, r), o + Vec2(r, r), o + Vec2(r, 0)};
      if (sdExact(cell, poly) < 0.0) setOccupied(ix, iy);
    }
  }
}

std::vector<Vec2> OccupancyGrid::obstacleCenters() const {
  std::vector<Vec2> out;
  for (int iy = -1; iy <= height_; ++iy) {
    for (int ix = -1; ix <= width_; ++ix) {
      if (occupied(ix, iy)) out.push_back(cellCenter(ix, iy));
    }
  }
  return out;
}

namespace {

// One-dimensional squared distance transform (lower envelope of parabolas).
void edt1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
           std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  const double inf = std::numeric_limits<double>::infinity();
  int k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (int q = 1; q < n; ++q) {
    if (f[q] == inf) continue;
    if (f[v[k]] == inf) {
      v[k] = q;
      continue;
    }
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = (f[v[k]] == inf) ? inf : dq * dq + f[v[k]];
  }
}

}  // namespace

CollisionChecker::CollisionChecker(const OccupancyGrid& grid, Polygon footprint, double margin)
    : grid_(&grid), footprint_(std::move(footprint)), margin_(margin) {
  body_planes_ = hrepFromVertices(footprint_);
  const std::size_t nv = footprint_.size();
  for (std::size_t i = 0; i < nv; ++i) {
    const Vec2& n0 = body_planes_[(i + nv - 1) % nv].normal;
    const Vec2& n1 = body_planes_[i].normal;
    grown_.push_back(footprint_[i] + margin_ * (n0 + n1) / (1.0 + n0.dot(n1)));
  }
  // Mitred grown polygon bounds the collision region; cover its bounding
  // box with disks along the long axis.
  Vec2 glo = grown_.front(), ghi = grown_.front();
  for (const Vec2& v : grown_) {
    glo = glo.cwiseMin(v);
    ghi = ghi.cwiseMax(v);
  }
  const Vec2 ext = ghi - glo;
  const int axis = ext.x() >= ext.y() ? 0 : 1;
  const int k = std::max(1, static_cast<int>(std::ceil(ext[axis] / std::max(ext[1 - axis], 1e-9))));
  Vec2 step = Vec2::Zero();
  step[axis] = ext[axis] / k;
  Vec2 half = 0.5 * ext;
  half[axis] = 0.5 * step[axis];
  disk_radius_ = half.norm();
  disk_centers_.clear();
  for (int j = 0; j < k; ++j) disk_centers_.push_back(glo + half + j * step);

  // Exact Euclidean distance transform over the grid padded by the
  // out-of-bounds ring.
  const int w = grid.width() + 2, h = grid.height() + 2;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      dist[static_cast<std::size_t>(y) * w + x] = grid.occupied(x - 1, y - 1) ? 0.0 : inf;
  const int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int x = 0; x < w; ++x) {
    f.resize(h);
    d.resize(h);
    for (int y = 0; y < h; ++y) f[y] = dist[static_cast<std::size_t>(y) * w + x];
    edt1d(f, d, v, z);
    for (int y = 0; y < h; ++y) dist[static_cast<std::size_t>(y) * w + x] = d[y];
  }
  for (int y = 0; y < h; ++y) {
    f.resize(w);
    d.resize(w);
    for (int x = 0; x < w; ++x) f[x] = dist[static_cast<std::size_t>(y) * w + x];
    edt1d(f, d, v, z);
    for (int x = 0; x < w; ++x) dist[static_cast<std::size_t>(y) * w + x] = d[x];
  }
  clearance_.resize(static_cast<std::size_t>(grid.width()) * grid.height());
  for (int y = 0; y < grid.height(); ++y)
    for (int x = 0; x < grid.width(); ++x)
      clearance_[static_cast<std::size_t>(y) * grid.width() + x] = static_cast<float>(
          std::sqrt(dist[static_cast<std::size_t>(y + 1) * w + x + 1]) * grid.resolution());
}

bool CollisionChecker::collides(const Pose2& pose) const {
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  Mat2 R;
  R << c, -s, s, c;
  return collides(pose.position(), R);
}

bool CollisionChecker::collides(const Vec2& position, const Mat2& R) const {
  const OccupancyGrid& g = *grid_;
  const double res = g.resolution();
  const double slack = 0.5 * std::sqrt(2.0) * res + 1e-9;
  bool clear = true;
  for (const Vec2& c : disk_centers_) {
    int cx, cy;
    g.worldToCell(position + R * c, cx, cy);
    if (!g.inBounds(cx, cy) || clearance_[static_cast<std::size_t>(cy) * g.width() + cx] - slack <= disk_radius_) {
      clear = false;
      break;
    }
  }
  if (clear) return false;
  Vec2 lo = position + R * grown_.front(), hi = lo;
  for (const Vec2& v : grown_) {
    const Vec2 w = position + R * v;
    lo = lo.cwiseMin(w);
    hi = hi.cwiseMax(w);
  }
  int x0, y0, x1, y1;
  g.worldToCell(lo, x0, y0);
  g.worldToCell(hi, x1, y1);
  for (int iy = y0; iy <= y1; ++iy) {
    for (int ix = x0; ix <= x1; ++ix) {
      if (!g.occupied(ix, iy)) continue;
      const Vec2 local = R.transpose() * (g.cellCenter(ix, iy) - position);
      double worst = -std::numeric_limits<double>::infinity();
      for (const HalfPlane& h : body_planes_) worst = std::max(worst, h.normal.dot(local) - h.offset);
      if (worst < margin_) return true;
    }
  }
  return false;
}

}  // namespace flatplan
