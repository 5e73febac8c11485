#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/LU>

#include "flatplan/errors.hpp"
#include "flatplan/flat_model.hpp"

using namespace flatplan;

namespace {

VehicleGeometry wheelbase(double L) {
  VehicleGeometry g = VehicleGeometry::box(3.0, 1.6, 0.5, L);
  return g;
}

FlatPoint fp(Vec2 v, Vec2 a) {
  FlatPoint p;
  p.d_sigma = v;
  p.dd_sigma = a;
  return p;
}

}  // namespace

TEST(RecoverState, LeftTurnUnitSpeed) {
  const VehicleState s = recoverState(fp({1, 0}, {0, 1}), Direction::Forward, wheelbase(2.0));
  EXPECT_DOUBLE_EQ(s.v, 1.0);
  EXPECT_DOUBLE_EQ(s.theta, 0.0);
  EXPECT_DOUBLE_EQ(s.a_t, 0.0);
  EXPECT_DOUBLE_EQ(s.a_n, 1.0);
  EXPECT_DOUBLE_EQ(s.kappa, 1.0);
  EXPECT_DOUBLE_EQ(s.phi, std::atan(2.0));
}

TEST(RecoverState, ReverseMotion) {
  const VehicleState s = recoverState(fp({1, 0}, {0, 0}), Direction::Backward, wheelbase(2.0));
  EXPECT_DOUBLE_EQ(s.v, -1.0);
  EXPECT_DOUBLE_EQ(s.theta, std::numbers::pi);
  EXPECT_DOUBLE_EQ(s.a_t, 0.0);
  EXPECT_DOUBLE_EQ(s.a_n, 0.0);
  EXPECT_DOUBLE_EQ(s.kappa, 0.0);
  EXPECT_DOUBLE_EQ(s.phi, 0.0);
}

TEST(RecoverState, ZeroVelocityIsSingular) {
  EXPECT_THROW(recoverState(fp({0, 0}, {1, 0}), Direction::Forward, wheelbase(2.0)),
               SpeedSingularity);
  EXPECT_THROW(recoverState(fp({1e-7, 0}, {1, 0}), Direction::Forward, wheelbase(2.0)),
               SpeedSingularity);
}

TEST(RecoverState, RandomIdentities) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const VehicleGeometry g = wheelbase(2.7);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 v(u(rng), u(rng));
    if (v.norm() < 0.05) continue;
    const FlatPoint p = fp(v, {u(rng), u(rng)});
    const VehicleState f = recoverState(p, Direction::Forward, g);
    const VehicleState b = recoverState(p, Direction::Backward, g);
    EXPECT_NEAR(f.kappa, std::tan(f.phi) / g.wheelbase, 1e-9 * std::max(1.0, std::abs(f.kappa)));
    EXPECT_NEAR(f.a_n, f.kappa * f.v * f.v, 1e-9 * std::max(1.0, std::abs(f.a_n)));
    EXPECT_NEAR(b.a_n, b.kappa * b.v * b.v, 1e-9 * std::max(1.0, std::abs(b.a_n)));
    EXPECT_DOUBLE_EQ(b.v, -f.v);
    const double dth = std::remainder(b.theta - f.theta - std::numbers::pi, 2.0 * std::numbers::pi);
    EXPECT_NEAR(dth, 0.0, 1e-12);
    // kappa carries eta, so flipping direction keeps |kappa v^2| and negates its sign.
    EXPECT_NEAR(b.kappa * b.v * b.v, -f.kappa * f.v * f.v, 1e-9 * std::max(1.0, std::abs(f.a_n)));
    EXPECT_GT(f.theta, -std::numbers::pi);
    EXPECT_LE(f.theta, std::numbers::pi);
  }
}

TEST(Rotation, Examples) {
  EXPECT_TRUE(rotationFromFlat({2, 0}, Direction::Forward).isApprox(Mat2::Identity(), 1e-15));
  Mat2 r90;
  r90 << 0, -1, 1, 0;
  EXPECT_TRUE(rotationFromFlat({0, 3}, Direction::Forward).isApprox(r90, 1e-15));
  EXPECT_TRUE(rotationFromFlat({1, 0}, Direction::Backward).isApprox(-Mat2::Identity(), 1e-15));
  EXPECT_THROW(rotationFromFlat({0, 0}, Direction::Forward), SpeedSingularity);
}

TEST(Rotation, OrthonormalWithUnitDeterminant) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 v(u(rng), u(rng));
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      const Mat2 r = rotationFromFlat(v, d);
      EXPECT_NEAR((r.transpose() * r - Mat2::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-12);
      EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
  }
}

TEST(Rotation, JacobianMatchesFiniteDifference) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 v(u(rng), u(rng));
    if (v.norm() < 0.2) continue;
    const Vec2 l(u(rng), u(rng));
    const Vec2 a(u(rng), u(rng));
    const Direction d = (i % 2) ? Direction::Forward : Direction::Backward;
    const Vec2 g = rotationJacobianT(l, v, d) * a;
    for (int k = 0; k < 2; ++k) {
      Vec2 vp = v, vm = v;
      vp(k) += 1e-6;
      vm(k) -= 1e-6;
      const double fd = (a.dot(rotationFromFlat(vp, d) * l) - a.dot(rotationFromFlat(vm, d) * l)) / 2e-6;
      EXPECT_NEAR(g(k), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(VehicleGeometry, BoxIsClockwiseAndInflates) {
  VehicleGeometry g = VehicleGeometry::box(4.0, 2.0, 1.0, 2.5, 0.25);
  EXPECT_NO_THROW(g.validate());
  const auto fp = g.footprint();
  ASSERT_EQ(fp.size(), 4u);
  EXPECT_TRUE(fp[0].isApprox(Vec2(-1.25, 1.25)));
  EXPECT_TRUE(fp[2].isApprox(Vec2(3.25, -1.25)));
  g.body_vertices = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  EXPECT_THROW(g.validate(), ValidationError);
}
