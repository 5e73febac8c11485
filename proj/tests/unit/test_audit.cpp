#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../common/instances.hpp"
#include "flatplan/audit.hpp"
#include "flatplan/corridor.hpp"
#include "flatplan/errors.hpp"
#include "flatplan/scenario.hpp"

using namespace flatplan;
using namespace flatplan::testing;

namespace {

BoundaryState state(Vec2 p, Vec2 v = Vec2::Zero(), Vec2 a = Vec2::Zero()) { return {p, v, a}; }

// x(t) = 10 t^3 - 15 t^4 + 6 t^5 on [0, 1].
FlatTrajectory unitQuintic() { return FlatTrajectory({mincoSolve(state({0, 0}), state({1, 0}), {}, 1.0)}); }

// 2 m/s along x for 10 s, four pieces.
FlatTrajectory cruise() {
  return FlatTrajectory({mincoSolve(state({0, 0}, {2, 0}), state({20, 0}, {2, 0}),
                                    {Vec2(5, 0), Vec2(10, 0), Vec2(15, 0)}, 10.0)});
}

// Same path traversed `factor` times faster: every coefficient of order r
// scales by factor^r.
FlatTrajectory spedUp(const FlatTrajectory& tr, double factor) {
  std::vector<Segment> segs = tr.segments();
  for (Segment& s : segs) {
    s.delta_T /= factor;
    for (PieceCoeffs& c : s.pieces)
      for (int r = 0; r < kNumCoeffs; ++r) c.row(r) *= std::pow(factor, r);
  }
  return FlatTrajectory(std::move(segs));
}

ConstraintConfig limits() {
  ConstraintConfig c;
  c.v_max = 3.0;
  c.a_t_max = 2.0;
  c.a_n_max = 2.0;
  c.kappa_max = 0.3;
  c.lambda = 8;
  return c;
}

// Time average of |60 - 360 t + 360 t^2| by the trapezoid rule at `hz`.
double quinticJerkAverage(double hz) {
  const int n = static_cast<int>(std::round(hz));
  double sum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / n;
    const double j = std::abs(60.0 - 360.0 * t + 360.0 * t * t);
    sum += (k == 0 || k == n) ? 0.5 * j : j;
  }
  return sum / n;
}

}  // namespace

TEST(Metrics, ConstantVelocityHasNoAccelerationOrJerk) {
  const Metrics m = computeMetrics(cruise());
  EXPECT_NEAR(m.mean_acceleration, 0.0, 1e-9);
  EXPECT_NEAR(m.mean_jerk, 0.0, 1e-9);
  EXPECT_NEAR(m.duration, 10.0, 1e-12);
  EXPECT_NEAR(m.length, 20.0, 1e-9);
}

TEST(Metrics, UnitQuinticJerkMatchesClosedForm) {
  const Metrics m = computeMetrics(unitQuintic());
  EXPECT_NEAR(m.mean_jerk, quinticJerkAverage(100.0), 1e-9);
  // exact time average is 40 / sqrt(3)
  EXPECT_NEAR(m.mean_jerk, 40.0 / std::sqrt(3.0), 1e-2);
  EXPECT_NEAR(m.length, 1.0, 1e-12);
}

TEST(Metrics, StraightTenMetres) {
  const FlatTrajectory tr({mincoSolve(state({0, 0}), state({10, 0}), {Vec2(5, 0)}, 6.0)});
  EXPECT_NEAR(computeMetrics(tr).length, 10.0, 1e-2);
}

TEST(Metrics, SamplingRateChangesLittle) {
  std::mt19937 rng(4);
  for (int i = 0; i < 20; ++i) {
    const FlatTrajectory tr({randomSegment(rng, Vec2(0, 0), 0.3 * i, Direction::Forward, 4, 3.7)});
    const Metrics a = computeMetrics(tr, 0.0, 100.0), b = computeMetrics(tr, 0.0, 1000.0);
    EXPECT_LT(std::abs(a.mean_acceleration - b.mean_acceleration), 0.01 * b.mean_acceleration);
    EXPECT_LT(std::abs(a.mean_jerk - b.mean_jerk), 0.01 * b.mean_jerk);
  }
}

TEST(Audit, CruiseWithinLimits) {
  const FlatTrajectory tr = cruise();
  const ConstraintConfig cfg = limits();
  AuditInput in;
  in.trajectory = &tr;
  in.constraints = &cfg;
  in.footprint = testFootprint();
  const AuditReport r = checkTrajectory(in, 10);
  EXPECT_EQ(r.maxViolation(), 0.0);
  EXPECT_EQ(r.samples, 4 * (8 * 10 + 1));
  EXPECT_EQ(r.singular_samples, 0);
}

TEST(Audit, SpedUpTrajectoryViolatesVelocity) {
  const FlatTrajectory tr = spedUp(cruise(), 2.0);
  EXPECT_NEAR(tr.eval(1.0, 1).x(), 4.0, 1e-9);
  const ConstraintConfig cfg = limits();
  AuditInput in;
  in.trajectory = &tr;
  in.constraints = &cfg;
  in.footprint = testFootprint();
  const AuditReport r = checkTrajectory(in, 10);
  EXPECT_NEAR(r[AuditClass::Velocity].max_violation, 1.0, 1e-9);
  EXPECT_EQ(r[AuditClass::AccelT].max_violation, 0.0);
}

TEST(Audit, StaticScenarioHasNoDynamicClass) {
  const FlatTrajectory tr = cruise();
  const ConstraintConfig cfg = limits();
  const std::vector<DynamicObstacle> none;
  AuditInput in;
  in.trajectory = &tr;
  in.constraints = &cfg;
  in.footprint = testFootprint();
  in.obstacles = &none;
  const AuditReport r = checkTrajectory(in, 10);
  EXPECT_FALSE(r[AuditClass::Dynamic].present);
  EXPECT_FALSE(r[AuditClass::Corridor].present);
  EXPECT_FALSE(r[AuditClass::Static].present);
  EXPECT_TRUE(r[AuditClass::Velocity].present);
}

TEST(Audit, CorridorAndDynamicViolations) {
  const FlatTrajectory tr = cruise();
  const ConstraintConfig cfg = limits();
  const Polygon fp = testFootprint();
  const std::size_t n = constraintPointCount(tr, cfg.lambda);

  // Wide cells contain the footprint everywhere; a narrow one leaks.
  std::vector<HPolygon> wide(n, rectangleCell({10, 0, 0}, {15, 15, 5, 5}));
  AuditInput in;
  in.trajectory = &tr;
  in.constraints = &cfg;
  in.footprint = fp;
  in.cells = &wide;
  EXPECT_EQ(checkTrajectory(in, 10)[AuditClass::Corridor].max_violation, 0.0);
  std::vector<HPolygon> narrow = wide;
  narrow[5] = rectangleCell({10, 0, 0}, {15, 15, 0.5, 5});
  AuditInput leaky = in;
  leaky.cells = &narrow;
  const double leak = checkTrajectory(leaky, 10)[AuditClass::Corridor].max_violation;
  double left = 0.0;
  for (const Vec2& v : fp) left = std::max(left, v.y());
  EXPECT_NEAR(leak, left - 0.5, 1e-9);

  std::vector<HPolygon> wrong(n - 1, wide.front());
  in.cells = &wrong;
  EXPECT_THROW(checkTrajectory(in, 10), ValidationError);

  // Oncoming box on the same line: exact distance reaches zero.
  in.cells = nullptr;
  const std::vector<DynamicObstacle> obs{
      {RectangleObstacle{Vec2::Zero(), 2.0, 2.0, 0.0}.polygon(),
       ObstacleTrajectory::constantVelocity(Vec2(30, 0), 0.0, Vec2(-2, 0), 0.0, 20.0)}};
  in.obstacles = &obs;
  const AuditReport r = checkTrajectory(in, 10);
  EXPECT_TRUE(r[AuditClass::Dynamic].present);
  EXPECT_LT(r.min_dynamic_distance, 0.0);
  EXPECT_GT(r[AuditClass::Dynamic].max_violation, cfg.d_safe);
}
