#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "flatplan/errors.hpp"
#include "flatplan/scenario.hpp"

using namespace flatplan;

namespace {

const char* kMinimal = R"({
  "map": {"size": [30, 20]},
  "start": {"x": 2, "y": 10, "theta": 0},
  "goal": {"x": 25, "y": 10, "theta": 0}
})";

std::string withConstraints(const std::string& block) {
  return R"({"map": {"size": [30, 20]}, "start": {"x": 2, "y": 10, "theta": 0},
             "goal": {"x": 25, "y": 10, "theta": 0}, "constraints": )" +
         block + "}";
}

// Runs f and returns the message of the ValidationError it throws.
template <class F>
std::string validationMessage(F f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ValidationError";
  return {};
}

}  // namespace

TEST(Scenario, MinimalFileGetsDefaults) {
  const Scenario s = parseScenario(kMinimal);
  EXPECT_EQ(s.map.size_x, 30.0);
  EXPECT_EQ(s.map.resolution, 0.1);
  EXPECT_EQ(s.constraints.lambda, 16);
  EXPECT_EQ(s.constraints.weights[0], 1e4);
  EXPECT_EQ(s.constraints.w_T, 50.0);
  EXPECT_EQ(s.solver.lbfgs.memory, 8);
  EXPECT_EQ(s.solver.lbfgs.max_iterations, 3000);
  EXPECT_EQ(s.solver.v_bar, 0.05);
  EXPECT_EQ(s.start.v, 0.0);
  EXPECT_TRUE(s.dynamic_obstacles.empty());
  const OccupancyGrid g = s.buildGrid();
  EXPECT_EQ(g.width(), 300);
  EXPECT_EQ(g.height(), 200);
  for (int iy = 0; iy < g.height(); ++iy)
    for (int ix = 0; ix < g.width(); ++ix) ASSERT_FALSE(g.occupied(ix, iy));
}

TEST(Scenario, NegativeSpeedLimitNamesField) {
  const std::string msg = validationMessage([] { parseScenario(withConstraints(R"({"v_m": -1})")); });
  EXPECT_NE(msg.find("constraints.v_m"), std::string::npos) << msg;
}

TEST(Scenario, NonConvexPolygonNamesIndex) {
  const std::string text = R"({"map": {"size": [30, 20], "polygons": [
      [[1, 1], [2, 1], [2, 2]],
      [[10, 10], [14, 10], [12, 11], [14, 14], [10, 14]]]},
    "start": {"x": 2, "y": 10, "theta": 0}, "goal": {"x": 25, "y": 10, "theta": 0}})";
  const std::string msg = validationMessage([&] { parseScenario(text); });
  EXPECT_NE(msg.find("map.polygons[1]"), std::string::npos) << msg;
  EXPECT_NE(msg.find("convex"), std::string::npos) << msg;
}

TEST(Scenario, SyntaxErrorReportsLine) {
  try {
    parseScenario("{\n  \"map\": {\"size\": [30, 20]},\n  \"start\": {\"x\": 2,, }\n}", "bad.json");
    FAIL() << "no ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.json: line 3"), std::string::npos) << e.what();
  }
}

TEST(Scenario, WrongTypeAndUnknownKey) {
  EXPECT_THROW(parseScenario(withConstraints(R"({"v_m": "fast"})")), ParseError);
  try {
    parseScenario(withConstraints(R"({"v_max": 3})"));
    FAIL() << "unknown key accepted";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("constraints.v_max"), std::string::npos) << e.what();
  }
}

TEST(Scenario, SteerLimitConvertsToCurvature) {
  const Scenario s = parseScenario(withConstraints(R"({"phi_m": 0.5})"));
  EXPECT_NEAR(s.constraints.kappa_max, std::tan(0.5) / 2.8, 1e-12);
}

TEST(Scenario, StartOutsideMapRejected) {
  const std::string text = R"({"map": {"size": [30, 20]}, "start": {"x": -2, "y": 10, "theta": 0},
                              "goal": {"x": 25, "y": 10, "theta": 0}})";
  const std::string msg = validationMessage([&] { parseScenario(text); });
  EXPECT_NE(msg.find("start"), std::string::npos) << msg;
}

TEST(Scenario, CounterClockwisePolygonStoredClockwise) {
  const std::string text = R"({"map": {"size": [30, 20], "polygons": [[[10, 10], [12, 10], [12, 12], [10, 12]]]},
    "start": {"x": 2, "y": 10, "theta": 0}, "goal": {"x": 25, "y": 10, "theta": 0}})";
  const Scenario sc = parseScenario(text);
  const Polygon& p = sc.map.polygons.at(0);
  double area2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& a = p[i];
    const Vec2& b = p[(i + 1) % p.size()];
    area2 += a.x() * b.y() - a.y() * b.x();
  }
  EXPECT_LT(area2, 0.0);
}

TEST(Scenario, RoundTripIsIdentity) {
  const std::string text = R"({
    "name": "round trip",
    "map": {"resolution": 0.2, "origin": [-1, 2], "size": [40, 25],
            "polygons": [[[5, 5], [7, 5], [6, 8]]],
            "rectangles": [{"center": [20, 12], "length": 3, "width": 2, "yaw": 0.4}],
            "occupied": [[3, 4], [5, 6]]},
    "start": {"x": 2, "y": 10, "theta": 0.3, "v": 1.5, "a": 0.2},
    "goal": {"x": 30, "y": 14, "theta": -1.2},
    "vehicle": {"length": 4.2, "width": 1.8, "rear_overhang": 0.9, "wheelbase": 2.6},
    "dynamic_obstacles": [{"length": 4, "width": 2, "start_time": 0.5, "pieces": [
        {"duration": 3, "x": [30, -2], "y": [5, 0.1, 0.01], "heading": [3.0, 0.01]},
        {"duration": 20, "x": [24, -1.5], "y": [5.39], "heading": [3.03]}]}],
    "frontend": {"xy_resolution": 0.4, "heading_bins": 48, "piece_length": 2.5},
    "constraints": {"v_m": 4, "a_tm": 2, "a_nm": 1.5, "kappa_m": 0.2, "d_m": 0.4, "lambda": 12,
                    "w_T": 20, "alpha": 50, "weights": {"corridor": 2e4}},
    "solver": {"memory": 6, "max_iterations": 500, "g_tol": 1e-5}
  })";
  const Scenario a = parseScenario(text);
  const std::string dumped = dumpScenario(a);
  const Scenario b = parseScenario(dumped);
  EXPECT_EQ(dumpScenario(b), dumped);

  EXPECT_EQ(b.name, a.name);
  EXPECT_EQ(b.map.origin, a.map.origin);
  EXPECT_EQ(b.map.resolution, a.map.resolution);
  EXPECT_EQ(b.map.polygons, a.map.polygons);
  EXPECT_EQ(b.map.occupied, a.map.occupied);
  EXPECT_EQ(b.start.pose.theta, a.start.pose.theta);
  EXPECT_EQ(b.start.v, a.start.v);
  EXPECT_EQ(b.start.a, a.start.a);
  EXPECT_EQ(b.vehicle.footprint(), a.vehicle.footprint());
  EXPECT_EQ(b.vehicle.wheelbase, a.vehicle.wheelbase);
  EXPECT_EQ(b.constraints.kappa_max, a.constraints.kappa_max);
  EXPECT_EQ(b.constraints.weights, a.constraints.weights);
  EXPECT_EQ(b.constraints.lambda, 12);
  EXPECT_EQ(b.solver.lbfgs.memory, 6);
  EXPECT_EQ(b.frontend.search.heading_bins, 48);
  ASSERT_EQ(b.dynamic_obstacles.size(), 1u);
  for (double t : {0.0, 0.5, 2.0, 3.5, 10.0, 30.0}) {
    EXPECT_EQ(b.dynamic_obstacles[0].trajectory.at(t).position, a.dynamic_obstacles[0].trajectory.at(t).position);
  }
  const OccupancyGrid ga = a.buildGrid(), gb = b.buildGrid();
  EXPECT_EQ(ga.obstacleCenters(), gb.obstacleCenters());
}
