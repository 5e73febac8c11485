#include <spdlog/spdlog.h>

#include <cmath>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>

#include "commands.hpp"
#include "flatplan/errors.hpp"
#include "flatplan/planner.hpp"
#include "flatplan/scenario.hpp"

namespace flatplan::cli {

namespace {

constexpr double kStep = 1e-6;
// Instances this close to a kink of the relaxation are skipped: a central
// difference straddling the kink is not a derivative estimate.
constexpr double kMinKinkGap = 1e-3;

struct Suite {
  std::string name;
  int only_class = -1;  // -1 keeps every penalty class
  double max_error = 0.0;
  int tested = 0;
  int skipped = 0;
  int active = 0;  // instances where the suite's penalty was nonzero
};

double relError(const Eigen::VectorXd& a, const Eigen::VectorXd& fd) {
  return (a - fd).cwiseAbs().maxCoeff() / std::max(fd.cwiseAbs().maxCoeff(), 1e-12);
}

}  // namespace

int runGradCheck(const GradCheckOptions& o) {
  const Scenario sc = loadScenario(o.scenario);
  const PreparedProblem prep = prepare(sc);
  std::vector<Suite> suites;
  for (int c = 0; c < kNumConstraintClasses; ++c) suites.push_back({constraintClassName(static_cast<ConstraintClass>(c)), c});
  suites.push_back({"objective", -1});

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const Eigen::Index dim = prep.x0.size();
  for (Suite& s : suites) {
    OptimizationProblem p = prep.problem;
    // tighter limits so that every class has active points
    p.constraints.v_max *= 0.5;
    p.constraints.a_t_max *= 0.3;
    p.constraints.a_n_max *= 0.3;
    p.constraints.kappa_max *= 0.5;
    p.constraints.d_safe += 1.0;
    if (s.only_class >= 0) {
      for (int c = 0; c < kNumConstraintClasses; ++c) p.constraints.weights[c] = c == s.only_class ? 1.0 : 0.0;
      p.constraints.w_T = 0.0;
    } else {
      p.constraints.weights.fill(1.0);
    }
    const TrajectoryProblem tp(p);
    for (int trial = 0; trial < 4 * o.instances && s.tested < o.instances; ++trial) {
      Eigen::VectorXd x = prep.x0;
      for (Eigen::Index i = 0; i < dim; ++i) x(i) += 0.2 * noise(rng);
      Eigen::VectorXd g;
      ObjectiveBreakdown parts;
      try {
        tp.evaluate(x, &g, &parts);
      } catch (const Error&) {
        ++s.skipped;
        continue;
      }
      if (parts.report.min_kink_gap < kMinKinkGap) {
        ++s.skipped;
        continue;
      }
      Eigen::VectorXd fd(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += kStep;
        xm(i) -= kStep;
        fd(i) = (tp.evaluate(xp, nullptr) - tp.evaluate(xm, nullptr)) / (2.0 * kStep);
      }
      const double err = relError(g, fd);
      s.max_error = std::max(s.max_error, err);
      ++s.tested;
      if (parts.penalty > 0.0) ++s.active;
      spdlog::debug("{} instance {}: relative error {}", s.name, s.tested, err);
    }
  }

  nlohmann::json j = nlohmann::json::object();
  bool ok = true;
  for (const Suite& s : suites) {
    const bool pass = s.tested > 0 && s.max_error < o.tolerance;
    ok = ok && pass;
    j[s.name] = {{"max_relative_error", s.max_error},
                 {"tested", s.tested},
                 {"skipped", s.skipped},
                 {"active", s.active},
                 {"pass", pass}};
  }
  j["ok"] = ok;
  std::cout << j.dump(2) << "\n";
  return ok ? 0 : 1;
}

}  // namespace flatplan::cli
