#include "flatplan/audit.hpp"

#include <algorithm>
#include <cmath>

#include "flatplan/corridor.hpp"
#include "flatplan/errors.hpp"
#include "flatplan/geometry.hpp"

namespace flatplan {

const char* auditClassName(AuditClass c) {
  if (c == AuditClass::Static) return "static";
  return constraintClassName(static_cast<ConstraintClass>(c));
}

double AuditReport::maxViolation() const {
  double m = 0.0;
  for (const ClassAudit& c : classes)
    if (c.present) m = std::max(m, c.max_violation);
  return m;
}

namespace {

void record(ClassAudit& c, double g, double t) {
  ++c.samples;
  if (g > c.max_violation) {
    c.max_violation = g;
    c.worst_time = t;
  }
}

// Deepest penetration of an occupied cell center into the footprint; negative
// when all centers are outside.
double staticPenetration(const OccupancyGrid& grid, const Polygon& world) {
  const std::vector<HalfPlane> planes = hrepFromVertices(world);
  Vec2 lo = world.front(), hi = world.front();
  for (const Vec2& v : world) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  int x0, y0, x1, y1;
  grid.worldToCell(lo, x0, y0);
  grid.worldToCell(hi, x1, y1);
  double deepest = -std::numeric_limits<double>::infinity();
  for (int iy = y0; iy <= y1; ++iy) {
    for (int ix = x0; ix <= x1; ++ix) {
      if (!grid.occupied(ix, iy)) continue;
      const Vec2 c = grid.cellCenter(ix, iy);
      double depth = std::numeric_limits<double>::infinity();
      for (const HalfPlane& h : planes) depth = std::min(depth, h.offset - h.normal.dot(c));
      deepest = std::max(deepest, depth);
    }
  }
  return deepest;
}

}  // namespace

AuditReport checkTrajectory(const AuditInput& in, int oversample) {
  const FlatTrajectory& traj = *in.trajectory;
  const ConstraintConfig& cfg = *in.constraints;
  const int lambda = cfg.lambda;
  const int os = std::max(1, oversample);
  const int per_piece = os * lambda;
  AuditReport rep;
  auto cls = [&](AuditClass c) -> ClassAudit& { return rep.classes[static_cast<int>(c)]; };
  for (AuditClass c : {AuditClass::Velocity, AuditClass::AccelT, AuditClass::AccelN, AuditClass::Curvature})
    cls(c).present = true;
  const bool with_cells = in.cells && !in.cells->empty();
  const bool with_dynamic = in.obstacles && !in.obstacles->empty();
  cls(AuditClass::Corridor).present = with_cells;
  cls(AuditClass::Dynamic).present = with_dynamic;
  cls(AuditClass::Static).present = in.grid != nullptr;
  if (with_cells && in.cells->size() != constraintPointCount(traj, lambda))
    throw ValidationError("audit: corridor cell count does not match the trajectory layout");

  std::size_t cell_base = 0;
  for (std::size_t si = 0; si < traj.segments().size(); ++si) {
    const Segment& seg = traj.segments()[si];
    const double t_seg = traj.startStamps()[si];
    for (int j = 0; j < seg.pieceCount(); ++j, cell_base += lambda + 1) {
      for (int m = 0; m <= per_piece; ++m) {
        const double local = seg.delta_T * m / per_piece;
        const double t = t_seg + j * seg.delta_T + local;
        const PieceCoeffs& c = seg.pieces[j];
        const Vec2 s = c.transpose() * basis(local, 0);
        const Vec2 ds = c.transpose() * basis(local, 1);
        const Vec2 dds = c.transpose() * basis(local, 2);
        ++rep.samples;
        const double speed = ds.norm();
        if (speed < kEpsSpeed) {
          ++rep.singular_samples;
          continue;
        }
        const double a_t = ds.dot(dds) / speed;
        const double a_n = cross2(ds, dds) / speed;
        const double kappa = cross2(ds, dds) / (speed * speed * speed);
        record(cls(AuditClass::Velocity), speed - cfg.v_max, t);
        record(cls(AuditClass::AccelT), std::abs(a_t) - cfg.a_t_max, t);
        record(cls(AuditClass::AccelN), std::abs(a_n) - cfg.a_n_max, t);
        record(cls(AuditClass::Curvature), std::abs(kappa) - cfg.kappa_max, t);

        const Mat2 R = rotationFromFlat(ds, seg.eta);
        const Polygon world = transformPolygon(in.footprint, R, s);
        if (with_cells) {
          const int k = m / os;
          const bool on_point = m % os == 0;
          const HPolygon& a = (*in.cells)[cell_base + k];
          double g = containsFootprint(a, s, ds, seg.eta, in.footprint);
          if (!on_point) g = std::min(g, containsFootprint((*in.cells)[cell_base + k + 1], s, ds, seg.eta, in.footprint));
          record(cls(AuditClass::Corridor), g, t);
        }
        if (in.grid) record(cls(AuditClass::Static), staticPenetration(*in.grid, world), t);
        if (with_dynamic) {
          for (const DynamicObstacle& o : *in.obstacles) {
            const ObstaclePose p = o.trajectory.at(t);
            const double sd = sdExact(world, transformPolygon(o.body, p.rotation, p.position));
            if (sd < rep.min_dynamic_distance) {
              rep.min_dynamic_distance = sd;
              rep.min_dynamic_time = t;
            }
            record(cls(AuditClass::Dynamic), cfg.d_safe - sd, t);
          }
        }
      }
    }
  }
  return rep;
}

namespace {

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

}  // namespace

double arcLength(const FlatTrajectory& traj) {
  constexpr int kSub = 8;
  double len = 0.0;
  for (const Segment& seg : traj.segments()) {
    for (const PieceCoeffs& c : seg.pieces) {
      const double h = seg.delta_T / kSub;
      for (int q = 0; q < kSub; ++q) {
        const double mid = (q + 0.5) * h;
        for (std::size_t g = 0; g < kGlNodes.size(); ++g) {
          const double t = mid + 0.5 * h * kGlNodes[g];
          len += 0.5 * h * kGlWeights[g] * (c.transpose() * basis(t, 1)).norm();
        }
      }
    }
  }
  return len;
}

Metrics computeMetrics(const FlatTrajectory& traj, double solve_time, double rate_hz) {
  Metrics m;
  m.duration = traj.totalDuration();
  m.length = arcLength(traj);
  m.solve_time = solve_time;
  if (m.duration <= 0.0) return m;
  const double h = 1.0 / rate_hz;
  const int n = static_cast<int>(std::floor(m.duration / h + 1e-9));
  std::vector<double> ts;
  for (int k = 0; k <= n; ++k) ts.push_back(std::min(k * h, m.duration));
  if (ts.back() < m.duration - 1e-12) ts.push_back(m.duration);
  double ia = 0.0, ij = 0.0;
  double pa = traj.eval(ts[0], 2).norm(), pj = traj.eval(ts[0], 3).norm();
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double a = traj.eval(ts[k], 2).norm(), jk = traj.eval(ts[k], 3).norm();
    const double dt = ts[k] - ts[k - 1];
    ia += 0.5 * dt * (pa + a);
    ij += 0.5 * dt * (pj + jk);
    pa = a;
    pj = jk;
  }
  m.mean_acceleration = ia / m.duration;
  m.mean_jerk = ij / m.duration;
  return m;
}

}  // namespace flatplan
