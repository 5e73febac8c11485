#pragma once

#include <array>
#include <string>
#include <vector>

#include "flatplan/grid.hpp"
#include "flatplan/penalties.hpp"
#include "flatplan/poly_traj.hpp"

namespace flatplan {

// Audited constraint classes: the penalized ones plus a static-map check.
enum class AuditClass : int { Velocity = 0, AccelT, AccelN, Curvature, Corridor, Dynamic, Static };
inline constexpr int kNumAuditClasses = 7;
const char* auditClassName(AuditClass c);

struct ClassAudit {
  bool present = false;
  double max_violation = 0.0;  // max(0, g) in native units
  double worst_time = 0.0;
  int samples = 0;
};

struct AuditReport {
  std::array<ClassAudit, kNumAuditClasses> classes{};
  int samples = 0;
  int singular_samples = 0;  // speed below eps; speed-dependent classes skipped
  double min_dynamic_distance = std::numeric_limits<double>::infinity();  // exact signed distance
  double min_dynamic_time = 0.0;

  double maxViolation() const;
  const ClassAudit& operator[](AuditClass c) const { return classes[static_cast<int>(c)]; }
};

struct AuditInput {
  const FlatTrajectory* trajectory = nullptr;
  const ConstraintConfig* constraints = nullptr;
  Polygon footprint;
  const OccupancyGrid* grid = nullptr;                   // optional static check
  const std::vector<HPolygon>* cells = nullptr;          // optional, one per constraint point
  const std::vector<DynamicObstacle>* obstacles = nullptr;  // optional
};

// Samples oversample * lambda intervals per piece. Between two constraint
// points the footprint must lie in at least one of their two cells. Dynamic
// distances are exact signed distances; violation is d_safe - sd.
AuditReport checkTrajectory(const AuditInput& in, int oversample);

struct Metrics {
  double mean_acceleration = 0.0;  // time average of |sigma''|
  double mean_jerk = 0.0;          // time average of |sigma'''|
  double duration = 0.0;
  double length = 0.0;
  double solve_time = 0.0;
};

// Time averages use the trapezoid rule on a grid of spacing 1/rate_hz (the
// last interval may be shorter). Length uses Gauss-Legendre quadrature.
Metrics computeMetrics(const FlatTrajectory& traj, double solve_time = 0.0, double rate_hz = 100.0);

double arcLength(const FlatTrajectory& traj);

}  // namespace flatplan
