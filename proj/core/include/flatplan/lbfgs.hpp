#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace flatplan {

struct LbfgsConfig {
  int memory = 8;
  int max_iterations = 3000;
  double g_tol = 1e-4;  // on the max-norm of the gradient
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 64;
  // Stop when the objective has not improved by more than this relative
  // amount over `stagnation_window` iterations.
  double stagnation_rel = 1e-15;
  int stagnation_window = 20;
};

enum class LbfgsStatus { Converged, Stagnated, MaxIterations };
const char* lbfgsStatusName(LbfgsStatus s);

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd g;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  std::vector<double> trace;  // objective at every accepted iterate, starting with x0
};

// Returns f(x) and writes the gradient.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

// Limited-memory BFGS with a weak Wolfe bracketing line search.
// Throws LineSearchFailure carrying the best iterate.
LbfgsResult lbfgsMinimize(const Objective& f, const Eigen::VectorXd& x0, const LbfgsConfig& cfg = {});

}  // namespace flatplan
