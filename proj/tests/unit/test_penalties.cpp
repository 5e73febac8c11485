#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../common/instances.hpp"
#include "flatplan/errors.hpp"
#include "flatplan/penalties.hpp"
#include "../common/test_support.hpp"

using namespace flatplan;
using namespace flatplan::testing;

TEST(Penalties, VelocityExamples) {
  const ScalarTerm a = gVelocity(Vec2(3, 4), 5.0);
  EXPECT_DOUBLE_EQ(a.value, 0.0);
  EXPECT_TRUE(a.d_dsigma.isApprox(Vec2(6, 8)));
  EXPECT_DOUBLE_EQ(gVelocity(Vec2(0, 0), 1.0).value, -1.0);
}

TEST(Penalties, AccelAndCurvatureExamples) {
  const AccelTerms a = gAccel(Vec2(2, 0), Vec2(3, 0), 2.0, 1.5);
  EXPECT_NEAR(a.tangential.value, 5.0, 1e-12);
  EXPECT_NEAR(a.normal.value, -1.5 * 1.5, 1e-12);
  const AccelTerms b = gAccel(Vec2(1, 0), Vec2(0, 2), 1.0, 1.0);
  EXPECT_NEAR(b.normal.value, 3.0, 1e-12);
  EXPECT_NEAR(gCurvature(Vec2(1, 0), Vec2(0, 2), 0.5).value, 3.75, 1e-12);
  EXPECT_NEAR(gCurvature(Vec2(2, 1), Vec2(4, 2), 0.5).value, -0.25, 1e-12);
  EXPECT_THROW(gAccel(Vec2(0, 0), Vec2(1, 0), 1, 1), SpeedSingularity);
  EXPECT_THROW(gCurvature(Vec2(1e-8, 0), Vec2(1, 0), 1), SpeedSingularity);
}

TEST(Penalties, StateConstraintGradientsMatchFd) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector4d x(u(rng), u(rng), u(rng), u(rng));
    if (x.head<2>().norm() < 0.2) continue;
    auto pick = [&](int which) {
      return [which](const Eigen::VectorXd& z) {
        const Vec2 ds = z.head<2>(), dds = z.tail<2>();
        const AccelTerms a = gAccel(ds, dds, 1.3, 0.7);
        if (which == 0) return a.tangential.value;
        if (which == 1) return a.normal.value;
        if (which == 2) return gCurvature(ds, dds, 0.3).value;
        return gVelocity(ds, 2.0).value;
      };
    };
    const AccelTerms a = gAccel(x.head<2>(), x.tail<2>(), 1.3, 0.7);
    const ScalarTerm k = gCurvature(x.head<2>(), x.tail<2>(), 0.3);
    const ScalarTerm v = gVelocity(x.head<2>(), 2.0);
    const std::array<ScalarTerm, 4> terms{a.tangential, a.normal, k, v};
    for (int w = 0; w < 4; ++w) {
      Eigen::VectorXd g(4);
      g << terms[w].d_dsigma, terms[w].d_ddsigma;
      EXPECT_LT(relError(g, centralDiff(pick(w), x)), kFdRelTol) << "class " << w;
    }
  }
}

TEST(Penalties, CorridorExampleAndFd) {
  HPolygon cell;
  cell.rows = {HalfPlane{Vec2(1, 0), 5.0}};
  const auto terms = gCorridor(Vec2(4, 0), Vec2(1, 0), Direction::Forward, cell, {{2.0, 0.0}});
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_NEAR(terms[0].value, 1.0, 1e-12);

  const Polygon square = {{-5, -5}, {-5, 5}, {5, 5}, {5, -5}};
  const HPolygon big{hrepFromVertices(square)};
  for (const auto& t : gCorridor(Vec2(0, 0), Vec2(1, 0.2), Direction::Backward, big, testFootprint()))
    EXPECT_LT(t.value, 0.0);

  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const Polygon fp = testFootprint();
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 sigma(u(rng), u(rng));
    Vec2 vel(u(rng), u(rng));
    if (vel.norm() < 0.3) vel += Vec2(1.0, 0.0);
    const Direction eta = trial % 2 ? Direction::Forward : Direction::Backward;
    const auto terms2 = gCorridor(sigma, vel, eta, big, fp);
    for (std::size_t m = 0; m < terms2.size(); ++m) {
      auto f = [&](const Eigen::VectorXd& z) { return gCorridor(z.head<2>(), z.tail<2>(), eta, big, fp)[m].value; };
      Eigen::VectorXd x(4), g(4);
      x << sigma, vel;
      g << terms2[m].d_sigma, terms2[m].d_dsigma;
      EXPECT_LT(relError(g, centralDiff(f, x)), kFdRelTol);
    }
  }
}

TEST(Penalties, DynamicExamplesAndFd) {
  const Polygon fp = testFootprint();
  DynamicObstacle far{fp, ObstacleTrajectory::constantVelocity(Vec2(30, 0), 0.0, Vec2(0, 0), 0.0, 10.0)};
  EXPECT_LT(gDynamic(Vec2(0, 0), Vec2(1, 0), Direction::Forward, 1.0, {far}, fp, 0.3, 100.0)[0].value, 0.0);
  DynamicObstacle overlap{fp, ObstacleTrajectory::constantVelocity(Vec2(0.5, 0.2), 0.3, Vec2(0, 0), 0.0, 10.0)};
  EXPECT_GT(gDynamic(Vec2(0, 0), Vec2(1, 0), Direction::Forward, 1.0, {overlap}, fp, 0.3, 100.0)[0].value, 0.3);
  EXPECT_THROW(gDynamic(Vec2(0, 0), Vec2(1, 0), Direction::Forward, 11.0, {far}, fp, 0.3, 100.0),
               StampOutOfHorizon);
  bool clamped = false;
  gDynamic(Vec2(0, 0), Vec2(1, 0), Direction::Forward, 11.0, {far}, fp, 0.3, 100.0, true, &clamped);
  EXPECT_TRUE(clamped);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    DynamicObstacle o;
    o.body = VehicleGeometry::box(3.0, 1.5, 0.5, 1.0, 0.0).footprint();
    o.trajectory = ObstacleTrajectory::constantVelocity(Vec2(3.5 * u(rng), 3.5 * u(rng)), 3.0 * u(rng),
                                                        Vec2(4 * u(rng), 4 * u(rng)), 0.5 * u(rng), 20.0);
    const double stamp = 2.0 + u(rng);
    const Vec2 sigma = Vec2(u(rng), u(rng)) + o.trajectory.at(stamp).position;
    const Vec2 vel(2.0 + u(rng), u(rng));
    const Direction eta = trial % 2 ? Direction::Forward : Direction::Backward;
    const ScalarTerm t = gDynamic(sigma, vel, eta, stamp, {o}, fp, 0.3, 100.0)[0];
    auto f = [&](const Eigen::VectorXd& z) {
      return gDynamic(z.segment<2>(0), z.segment<2>(2), eta, z(4), {o}, fp, 0.3, 100.0)[0].value;
    };
    Eigen::VectorXd x(5), g(5);
    x << sigma, vel, stamp;
    g << t.d_sigma, t.d_dsigma, t.d_stamp;
    EXPECT_LT(relError(g, centralDiff(f, x)), kFdRelTol) << "trial " << trial;
  }
}

TEST(Penalties, RelaxL1BranchesAndContinuity) {
  const double a0 = kRelaxDemarcation;
  EXPECT_EQ(relaxL1(-1.0).value, 0.0);
  EXPECT_NEAR(relaxL1(a0).value, 5e-5, 1e-18);
  EXPECT_NEAR(relaxL1(1.0).value, 0.99995, 1e-15);
  // C1 across both branch points
  EXPECT_NEAR(relaxL1(a0).value, a0 - 0.5 * a0, 1e-12);
  EXPECT_NEAR(relaxL1(a0).derivative, 1.0, 1e-12);
  EXPECT_NEAR(relaxL1(std::nextafter(a0, 1.0)).derivative, 1.0, 1e-12);
  EXPECT_NEAR(relaxL1(std::nextafter(0.0, 1.0)).value, 0.0, 1e-12);
  EXPECT_NEAR(relaxL1(std::nextafter(0.0, 1.0)).derivative, 0.0, 1e-12);
  for (double x = -1e-4; x < 3e-4; x += 1.37e-6) {
    const double h = 1e-9;
    const double fd = (relaxL1(x + h).value - relaxL1(x - h).value) / (2 * h);
    EXPECT_NEAR(relaxL1(x).derivative, fd, 1e-5);
    EXPECT_GE(relaxL1(x).value, 0.0);
  }
}

TEST(Penalties, FeasibleTrajectoryHasZeroPenalty) {
  BoundaryState head, tail;
  head.velocity = Vec2(1.0, 0.0);
  tail.position = Vec2(4.0, 0.0);
  tail.velocity = Vec2(1.0, 0.0);
  const Segment s = mincoSolve(head, tail, {Vec2(2.0, 0.0)}, 4.0);
  const FlatTrajectory traj({s});
  ConstraintConfig cfg;
  const Polygon square = {{-20, -20}, {-20, 20}, {20, 20}, {20, -20}};
  std::vector<HPolygon> cells(constraintPointCount(traj, cfg.lambda), HPolygon{hrepFromVertices(square)});
  DynamicObstacle far{testFootprint(), ObstacleTrajectory::constantVelocity(Vec2(50, 50), 0, Vec2(0, 0), 0, 100)};
  const PenaltyResult r = penaltySum(traj, cells, {far}, testFootprint(), cfg);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(packPenaltyGradient(r).cwiseAbs().maxCoeff(), 0.0);
  for (double w : r.report.worst) EXPECT_LE(w, 0.0);
}

namespace {

double penaltyAt(const PenaltyInstance& inst, const Eigen::VectorXd& x) {
  return penaltySum(unpackTrajectory(inst.traj, x), inst.cells, inst.obstacles, inst.footprint, inst.cfg).value;
}

}  // namespace

TEST(Penalties, PenaltySumGradientMatchesFd) {
  std::mt19937 rng(4);
  for (InstanceKind kind :
       {InstanceKind::Feasibility, InstanceKind::Corridor, InstanceKind::Dynamic, InstanceKind::MultiSegment}) {
    int tested = 0;
    for (int trial = 0; trial < 40 && tested < 8; ++trial) {
      const PenaltyInstance inst = makeInstance(rng, kind);
      const PenaltyResult r = penaltySum(inst.traj, inst.cells, inst.obstacles, inst.footprint, inst.cfg);
      if (r.value == 0.0 || r.report.min_kink_gap < 1e-3) continue;
      ++tested;
      const Eigen::VectorXd x = packTrajectory(inst.traj);
      const Eigen::VectorXd fd = centralDiff([&](const Eigen::VectorXd& z) { return penaltyAt(inst, z); }, x);
      EXPECT_LT(relError(packPenaltyGradient(r), fd), kFdRelTol) << "kind " << static_cast<int>(kind);
      EXPECT_NEAR(r.report.total, r.value, 0.0);
      double sum = 0.0;
      for (double c : r.report.class_totals) sum += c;
      EXPECT_NEAR(r.report.total, sum, 1e-12 * std::max(1.0, sum));
    }
    EXPECT_GE(tested, 4) << "kind " << static_cast<int>(kind);
  }
}

TEST(Penalties, LaterSegmentDynamicTermsReachEarlierDurations) {
  std::mt19937 rng(5);
  int found = 0;
  for (int trial = 0; trial < 60 && found < 3; ++trial) {
    PenaltyInstance inst = makeInstance(rng, InstanceKind::MultiSegment);
    inst.cells.clear();
    inst.cfg.weights = {0, 0, 0, 0, 0, 1.0};
    // only dynamic terms on the last segment can couple to the first duration
    const PenaltyResult r = penaltySum(inst.traj, inst.cells, inst.obstacles, inst.footprint, inst.cfg);
    if (r.value == 0.0 || r.report.min_kink_gap < 1e-3) continue;
    const Eigen::VectorXd x = packTrajectory(inst.traj);
    const Eigen::Index iT0 = x.size() - static_cast<Eigen::Index>(inst.traj.segments().size());
    auto f = [&](double T0) {
      Eigen::VectorXd z = x;
      z(iT0) = T0;
      return penaltyAt(inst, z);
    };
    const double h = kFdStep;
    const double fd = (f(x(iT0) + h) - f(x(iT0) - h)) / (2 * h);
    EXPECT_LT(relError(r.grad_T(0), fd), kFdRelTol);
    // the first segment's own penalty is separated out to show cross-segment coupling
    std::vector<Segment> tail(inst.traj.segments().begin() + 1, inst.traj.segments().end());
    double later_only = 0.0;
    {
      // shifting T0 shifts the stamps of every later point by the same amount
      const double T0 = inst.traj.segments()[0].duration();
      const auto later = [&](double shift) {
        double s = 0.0;
        double stamp0 = T0 + shift;
        for (const Segment& seg : tail) {
          for (int j = 0; j < seg.pieceCount(); ++j) {
            for (int k = 0; k <= inst.cfg.lambda; ++k) {
              const double tb = seg.delta_T * k / inst.cfg.lambda;
              const Vec2 p = seg.pieces[j].transpose() * basis(tb, 0);
              const Vec2 v = seg.pieces[j].transpose() * basis(tb, 1);
              const double w = (k == 0 || k == inst.cfg.lambda) ? 0.5 : 1.0;
              for (const auto& t : gDynamic(p, v, seg.eta, stamp0 + seg.delta_T * j + tb, inst.obstacles,
                                            inst.footprint, inst.cfg.d_safe, inst.cfg.alpha, true))
                s += seg.delta_T / inst.cfg.lambda * w * relaxL1(t.value).value;
            }
          }
          stamp0 += seg.duration();
        }
        return s;
      };
      later_only = (later(h) - later(-h)) / (2 * h);
    }
    if (std::abs(later_only) > 1e-6) ++found;
  }
  EXPECT_GE(found, 1);
}

TEST(Penalties, DenserSamplingDetectsAtLeastAsMuch) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    PenaltyInstance inst = makeInstance(rng, InstanceKind::Feasibility);
    auto detections = [&](int lambda) {
      int n = 0;
      for (const Segment& seg : inst.traj.segments()) {
        for (int j = 0; j < seg.pieceCount(); ++j) {
          for (int k = 0; k <= lambda; ++k) {
            const double t = seg.delta_T * k / lambda;
            const Vec2 v = seg.pieces[j].transpose() * basis(t, 1);
            const Vec2 a = seg.pieces[j].transpose() * basis(t, 2);
            n += gVelocity(v, inst.cfg.v_max).value > 0.0;
            n += gCurvature(v, a, inst.cfg.kappa_max).value > 0.0;
          }
        }
      }
      return n;
    };
    for (int lambda : {2, 4, 8, 16}) EXPECT_GE(detections(2 * lambda), detections(lambda));
  }
}

TEST(Penalties, ObstacleTrajectoryPiecesAndClamp) {
  PosePiece a{0.0, 2.0, Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0.1)};
  PosePiece b{2.0, 4.0, Eigen::Vector3d(2, 1, 0.5), Eigen::Vector2d(0, 2), Eigen::Vector2d(0.2, 0)};
  const ObstacleTrajectory tr({a, b});
  EXPECT_NEAR(tr.at(1.0).position.x(), 1.0, 1e-12);
  EXPECT_NEAR(tr.at(3.0).position.x(), 3.5, 1e-12);
  EXPECT_NEAR(tr.at(3.0).velocity.x(), 2.0, 1e-12);
  EXPECT_NEAR(tr.at(3.0).velocity.y(), 2.0, 1e-12);
  EXPECT_NEAR(tr.headingAt(1.0), 0.1, 1e-12);
  bool clamped = false;
  const ObstaclePose p = tr.at(9.0, &clamped);
  EXPECT_TRUE(clamped);
  EXPECT_NEAR(p.position.x(), 2.0 + 2.0 + 2.0, 1e-12);
  EXPECT_EQ(p.velocity.norm(), 0.0);
  PosePiece gap{5.0, 6.0, Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0), Eigen::Vector2d(0, 0)};
  EXPECT_THROW(ObstacleTrajectory({a, gap}), ValidationError);
}
