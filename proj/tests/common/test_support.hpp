#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace flatplan::testing {

inline constexpr double kFdStep = 1e-6;
inline constexpr double kFdRelTol = 1e-5;

// Central difference of f at x.
inline Eigen::VectorXd centralDiff(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = kFdStep) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

// Max entrywise mismatch relative to the largest reference entry.
inline double relError(const Eigen::VectorXd& analytic, const Eigen::VectorXd& reference) {
  const double scale = std::max(reference.cwiseAbs().maxCoeff(), 1e-12);
  return (analytic - reference).cwiseAbs().maxCoeff() / scale;
}

inline double relError(double analytic, double reference) {
  return std::abs(analytic - reference) / std::max(std::abs(reference), 1e-12);
}

}  // namespace flatplan::testing
