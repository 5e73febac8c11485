#pragma once

#include <vector>

#include "flatplan/corridor.hpp"
#include "flatplan/frontend.hpp"
#include "flatplan/optimizer.hpp"
#include "flatplan/scenario.hpp"

namespace flatplan {

// Boundary state imposed on the trajectory for a scenario state. Speeds below
// v_bar are raised to v_bar along the heading in direction `eta`, so that the
// heading of a resting vehicle is encoded in the flat velocity.
BoundaryState boundaryFromState(const StateSpec& s, Direction eta, double v_bar);

// Vehicle poses at the constraint-point parameters of an initial plan, in
// segment, piece, k order.
std::vector<Pose2> constraintPointSeeds(const InitialPlan& plan, int lambda);

struct PlanResult {
  FlatTrajectory trajectory;
  Eigen::VectorXd x;
  ObjectiveBreakdown objective;
  int iterations = 0;
  int evaluations = 0;
  double grad_norm = 0.0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  std::vector<double> trace;
  double solve_time = 0.0;  // optimizer only, seconds
  double wall_time = 0.0;   // whole pipeline, seconds

  BoundaryState start;
  BoundaryState goal;
  SearchResult search;
  InitialPlan initial;
  Corridor corridor;
  Eigen::VectorXd x0;
};

// Front end, corridor, back end. Errors are rethrown as StageError tagged
// "frontend", "corridor" or "backend".
PlanResult plan(const Scenario& scenario);

// Problem and initial decision vector for a scenario, without solving.
struct PreparedProblem {
  OptimizationProblem problem;
  Eigen::VectorXd x0;
  SearchResult search;
  InitialPlan initial;
  Corridor corridor;
};
PreparedProblem prepare(const Scenario& scenario);

}  // namespace flatplan
