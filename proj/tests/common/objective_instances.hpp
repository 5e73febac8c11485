#pragma once

// Randomized multi-segment decision vectors for full-objective gradient checks.

#include <Eigen/Core>
#include <cmath>
#include <random>
#include <vector>

#include "flatplan/optimizer.hpp"
#include "instances.hpp"

namespace flatplan::testing {

struct ObjectiveInstance {
  TrajectoryProblem problem;
  Eigen::VectorXd x;
};

// Alternating-gear instance with `segments` segments. Cells and obstacles are
// laid around the initial trajectory when requested.
inline ObjectiveInstance makeObjectiveInstance(std::mt19937& rng, int segments, bool with_cells,
                                               bool with_obstacles) {
  std::uniform_real_distribution<double> u(0.0, 1.0), n(-1.0, 1.0);
  std::uniform_int_distribution<int> pieces(2, 4);

  OptimizationProblem p;
  p.footprint = testFootprint();
  p.constraints.lambda = 8;
  p.constraints.v_max = 2.0 + 2.0 * u(rng);
  p.constraints.a_t_max = 1.0 + u(rng);
  p.constraints.a_n_max = 1.0 + u(rng);
  p.constraints.kappa_max = 0.1 + 0.2 * u(rng);
  p.constraints.d_safe = 0.5 + u(rng);
  p.constraints.weights = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  p.constraints.w_T = 1.0 + 5.0 * u(rng);

  DecisionVector dv;
  dv.tau.resize(segments);
  dv.theta_g.resize(segments - 1);
  Vec2 at(10.0 * n(rng), 10.0 * n(rng));
  double heading = 3.14 * n(rng);
  Direction eta = Direction::Forward;
  const Vec2 start = at;
  Vec2 first_dir, last_dir;
  for (int i = 0; i < segments; ++i) {
    const int M = pieces(rng);
    p.pieces.push_back(M);
    p.etas.push_back(eta);
    const Vec2 dir = sign(eta) * Vec2(std::cos(heading), std::sin(heading));
    if (i == 0) first_dir = dir;
    last_dir = dir;
    const double len = 3.0 + 5.0 * u(rng);
    const Vec2 nrm(-dir.y(), dir.x());
    std::vector<Vec2> q;
    for (int j = 1; j < M; ++j) q.push_back(at + (len * j / M) * dir + 0.3 * n(rng) * nrm);
    dv.q.push_back(q);
    dv.tau(i) = inverseTimeMap(len / (1.5 + u(rng)));
    at += len * dir;
    if (i + 1 < segments) {
      dv.p_g.push_back(at);
      dv.theta_g(i) = std::atan2(dir.y(), dir.x()) + 0.2 * n(rng);
    }
    heading += 0.6 * n(rng);
    eta = opposite(eta);
  }
  p.start.position = start;
  p.start.velocity = (1.0 + 2.0 * u(rng)) * first_dir;
  p.start.acceleration = Vec2(0.3 * n(rng), 0.3 * n(rng));
  p.goal.position = at;
  p.goal.velocity = (0.5 + u(rng)) * last_dir;

  TrajectoryProblem bare(p);
  const Eigen::VectorXd x = bare.pack(dv);
  const FlatTrajectory traj = bare.trajectory(x);
  if (with_cells) p.cells = jitteredCells(rng, traj, p.constraints.lambda, p.footprint);
  if (with_obstacles) p.obstacles = crossingObstacles(rng, traj, 3);
  return {TrajectoryProblem(p), x};
}

}  // namespace flatplan::testing
