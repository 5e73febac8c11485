#include <benchmark/benchmark.h>

#include <Eigen/Geometry>

#include <random>
#include <string>
#include <vector>

#include "flatplan/frontend.hpp"
#include "flatplan/geometry.hpp"
#include "flatplan/planner.hpp"
#include "flatplan/poly_traj.hpp"
#include "flatplan/scenario.hpp"

using namespace flatplan;

namespace {

Scenario bundled(const char* name) { return loadScenario(std::string(FLATPLAN_SCENARIO_DIR) + "/" + name + ".json"); }

std::vector<Vec2> waypoints(int pieces) {
  std::vector<Vec2> q;
  for (int j = 1; j < pieces; ++j) q.emplace_back(2.0 * j, 0.5 * ((j % 3) - 1));
  return q;
}

void BM_MincoSolve(benchmark::State& st) {
  const int M = static_cast<int>(st.range(0));
  BoundaryState head, tail;
  head.velocity = Vec2(1.0, 0.0);
  tail.position = Vec2(2.0 * M, 0.0);
  tail.velocity = Vec2(1.0, 0.0);
  const std::vector<Vec2> q = waypoints(M);
  for (auto _ : st) benchmark::DoNotOptimize(mincoSolve(head, tail, q, 1.0 * M));
  st.SetComplexityN(M);
}
BENCHMARK(BM_MincoSolve)->RangeMultiplier(4)->Range(4, 256)->Complexity(benchmark::oN);

void BM_SdExact(benchmark::State& st) {
  const Polygon a = VehicleGeometry::box(4.6, 1.9, 0.9, 2.8, 0.0).footprint();
  const Polygon b = transformPolygon(a, Eigen::Rotation2Dd(0.7).toRotationMatrix(), Vec2(3.0, 2.5));
  for (auto _ : st) benchmark::DoNotOptimize(sdExact(a, b));
}
BENCHMARK(BM_SdExact);

void BM_SmoothDistance(benchmark::State& st) {
  const Polygon a = VehicleGeometry::box(4.6, 1.9, 0.9, 2.8, 0.0).footprint();
  ObstaclePose pose;
  pose.position = Vec2(3.0, 2.5);
  pose.rotation = Eigen::Rotation2Dd(0.7).toRotationMatrix();
  for (auto _ : st) benchmark::DoNotOptimize(smoothDistance(Vec2::Zero(), Vec2(2, 0.3), Direction::Forward, a, a, pose));
}
BENCHMARK(BM_SmoothDistance);

void BM_HybridAStarForest(benchmark::State& st) {
  const Scenario sc = bundled("static_forest");
  const OccupancyGrid g = sc.buildGrid();
  const Polygon fp = sc.vehicle.footprint();
  for (auto _ : st)
    benchmark::DoNotOptimize(hybridAStar(g, sc.start.pose, sc.goal.pose, fp, sc.constraints.kappa_max,
                                         sc.frontend.search));
}
BENCHMARK(BM_HybridAStarForest)->Unit(benchmark::kMillisecond);

void BM_ObjectiveEvaluate(benchmark::State& st) {
  const PreparedProblem p = prepare(bundled(st.range(0) ? "dynamic_crossing" : "static_slalom"));
  const TrajectoryProblem problem(p.problem);
  Eigen::VectorXd g;
  for (auto _ : st) benchmark::DoNotOptimize(problem.evaluate(p.x0, &g));
}
BENCHMARK(BM_ObjectiveEvaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_PlanParking(benchmark::State& st) {
  const Scenario sc = bundled("parking_reverse");
  for (auto _ : st) benchmark::DoNotOptimize(plan(sc));
}
BENCHMARK(BM_PlanParking)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
