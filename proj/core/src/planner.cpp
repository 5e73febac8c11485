#include "flatplan/planner.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "flatplan/errors.hpp"

namespace flatplan {

BoundaryState boundaryFromState(const StateSpec& s, Direction eta, double v_bar) {
  const Vec2 dir(std::cos(s.pose.theta), std::sin(s.pose.theta));
  BoundaryState b;
  b.position = s.pose.position();
  b.velocity = std::abs(s.v) >= v_bar ? Vec2(s.v * dir) : Vec2(sign(eta) * v_bar * dir);
  b.acceleration = s.a * dir;
  return b;
}

std::vector<Pose2> constraintPointSeeds(const InitialPlan& plan, int lambda) {
  std::vector<Pose2> seeds;
  for (const PlanSegment& seg : plan.segments) {
    const double len = seg.length();
    for (int j = 0; j < seg.pieces; ++j) {
      for (int k = 0; k <= lambda; ++k) {
        const double f = (j + static_cast<double>(k) / lambda) / seg.pieces;
        seeds.push_back(seg.poseAt(f * len));
      }
    }
  }
  return seeds;
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.kind(), std::string(name) + ": " + e.what());
  }
}

// Nearest sampled path pose that is collision free, for seeds that fall off
// the sampled polyline into an obstacle.
Pose2 nearestFreePose(const CollisionChecker& checker, const InitialPlan& plan, const Pose2& seed) {
  double best = std::numeric_limits<double>::infinity();
  Pose2 out = seed;
  for (const PlanSegment& seg : plan.segments) {
    for (const Pose2& p : seg.poses) {
      const double d = (p.position() - seed.position()).squaredNorm();
      if (d < best && !checker.collides(p)) {
        best = d;
        out = p;
      }
    }
  }
  return out;
}

}  // namespace

PreparedProblem prepare(const Scenario& sc) {
  PreparedProblem out;
  const OccupancyGrid grid = sc.buildGrid();
  const Polygon footprint = sc.vehicle.footprint();
  const ConstraintConfig& cfg = sc.constraints;

  stage("frontend", [&] {
    out.search = hybridAStar(grid, sc.start.pose, sc.goal.pose, footprint, cfg.kappa_max, sc.frontend.search);
    out.initial = segmentPlan(out.search.path, sc.frontend.segments);
    return 0;
  });

  stage("corridor", [&] {
    std::vector<Pose2> seeds = constraintPointSeeds(out.initial, cfg.lambda);
    const CollisionChecker checker(grid, footprint);
    for (Pose2& s : seeds) {
      if (checker.collides(s)) s = nearestFreePose(checker, out.initial, s);
    }
    out.corridor = buildCorridor(grid, seeds, footprint, sc.frontend.corridor_max_extent);
    return 0;
  });

  stage("backend", [&] {
    OptimizationProblem& p = out.problem;
    const auto& segs = out.initial.segments;
    const int n = static_cast<int>(segs.size());
    p.start = boundaryFromState(sc.start, segs.front().eta, sc.solver.v_bar);
    p.goal = boundaryFromState(sc.goal, segs.back().eta, sc.solver.v_bar);
    DecisionVector dv;
    dv.tau.resize(n);
    dv.theta_g.resize(n - 1);
    for (int i = 0; i < n; ++i) {
      p.pieces.push_back(segs[i].pieces);
      p.etas.push_back(segs[i].eta);
      dv.q.push_back(segs[i].waypoints);
      dv.tau(i) = inverseTimeMap(segs[i].duration);
      if (i + 1 < n) {
        dv.p_g.push_back(out.initial.shift_positions[i]);
        const double back = segs[i].eta == Direction::Backward ? std::numbers::pi : 0.0;
        dv.theta_g(i) = wrapAngle(out.initial.shift_headings[i] + back);
      }
    }
    p.cells = out.corridor.cells;
    p.obstacles = sc.obstacles();
    p.footprint = footprint;
    p.constraints = cfg;
    p.v_bar = sc.solver.v_bar;
    out.x0 = TrajectoryProblem(p).pack(dv);
    return 0;
  });
  return out;
}

PlanResult plan(const Scenario& sc) {
  const auto t0 = std::chrono::steady_clock::now();
  PreparedProblem prep = prepare(sc);
  PlanResult r;
  stage("backend", [&] {
    const TrajectoryProblem problem(prep.problem);
    const SolveResult s = solve(problem, prep.x0, sc.solver);
    r.trajectory = s.trajectory;
    r.x = s.x;
    r.objective = s.objective;
    r.iterations = s.iterations;
    r.evaluations = s.evaluations;
    r.grad_norm = s.grad_norm;
    r.status = s.status;
    r.trace = s.trace;
    r.solve_time = s.wall_time;
    return 0;
  });
  r.start = prep.problem.start;
  r.goal = prep.problem.goal;
  r.search = std::move(prep.search);
  r.initial = std::move(prep.initial);
  r.corridor = std::move(prep.corridor);
  r.x0 = prep.x0;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace flatplan
