#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "flatplan/lbfgs.hpp"
#include "flatplan/penalties.hpp"
#include "flatplan/poly_traj.hpp"

namespace flatplan {

struct TimeMap {
  double T = 1.0;
  double dT = 1.0;  // dT/dtau
};

// Smooth bijection from the real line onto T > 0.
TimeMap timeMap(double tau);
double inverseTimeMap(double T);

inline constexpr double kShiftSpeed = 0.05;

struct ShiftVelocity {
  Vec2 v = Vec2::Zero();
  Vec2 dv = Vec2::Zero();  // d v / d theta
};
ShiftVelocity shiftVelocity(double theta, double v_bar = kShiftSpeed);

struct DecisionVector {
  std::vector<std::vector<Vec2>> q;  // per segment, pieces - 1 waypoints
  Eigen::VectorXd tau;               // per segment
  std::vector<Vec2> p_g;             // per shift
  Eigen::VectorXd theta_g;           // per shift, direction of velocity before the shift
};

struct OptimizationProblem {
  BoundaryState start;
  BoundaryState goal;
  std::vector<int> pieces;         // per segment
  std::vector<Direction> etas;     // per segment
  std::vector<HPolygon> cells;     // per constraint point, may be empty
  std::vector<DynamicObstacle> obstacles;
  Polygon footprint;
  ConstraintConfig constraints;
  double v_bar = kShiftSpeed;
};

struct ObjectiveBreakdown {
  double effort = 0.0;
  double time = 0.0;  // w_T * total duration
  double penalty = 0.0;
  double total = 0.0;
  PenaltyReport report;
};

// Objective of the unconstrained reformulation over the decision vector.
class TrajectoryProblem {
 public:
  explicit TrajectoryProblem(OptimizationProblem problem);

  const OptimizationProblem& problem() const { return p_; }
  int segmentCount() const { return static_cast<int>(p_.pieces.size()); }
  // 2 sum(M_i - 1) + n + 3 (n - 1)
  Eigen::Index dimension() const { return dim_; }

  Eigen::VectorXd pack(const DecisionVector& dv) const;
  DecisionVector unpack(const Eigen::VectorXd& x) const;

  // Minimum-effort trajectory for the decision vector.
  FlatTrajectory trajectory(const Eigen::VectorXd& x) const;

  // Objective value; fills `grad` when non-null.
  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* grad, ObjectiveBreakdown* parts = nullptr) const;

 private:
  OptimizationProblem p_;
  Eigen::Index dim_ = 0;
};

struct SolverConfig {
  LbfgsConfig lbfgs;
  double v_bar = kShiftSpeed;
};

struct SolveResult {
  Eigen::VectorXd x;
  FlatTrajectory trajectory;
  ObjectiveBreakdown objective;
  int iterations = 0;
  int evaluations = 0;
  double grad_norm = 0.0;  // max-norm at the returned iterate
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  std::vector<double> trace;
  double wall_time = 0.0;
};

// Throws LineSearchFailure with the best iterate.
SolveResult solve(const TrajectoryProblem& problem, const Eigen::VectorXd& x0, const SolverConfig& cfg);

}  // namespace flatplan
