#include "flatplan/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "flatplan/errors.hpp"

namespace flatplan {

const char* lbfgsStatusName(LbfgsStatus s) {
  switch (s) {
    case LbfgsStatus::Converged: return "converged";
    case LbfgsStatus::Stagnated: return "stagnated";
    case LbfgsStatus::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

namespace {

[[noreturn]] void fail(const Eigen::VectorXd& x, double f, int it, const std::string& why) {
  throw LineSearchFailure(std::vector<double>(x.data(), x.data() + x.size()), f, it, why);
}

}  // namespace

LbfgsResult lbfgsMinimize(const Objective& fun, const Eigen::VectorXd& x0, const LbfgsConfig& cfg) {
  LbfgsResult r;
  r.x = x0;
  r.g.resize(x0.size());
  r.f = fun(r.x, r.g);
  ++r.evaluations;
  if (!std::isfinite(r.f) || !r.g.allFinite()) fail(r.x, r.f, 0, "objective is not finite at the initial point");
  r.trace.push_back(r.f);

  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;
  Eigen::VectorXd d, xn, gn(x0.size());
  std::vector<double> alpha(cfg.memory);

  for (r.iterations = 0;; ++r.iterations) {
    if (r.g.lpNorm<Eigen::Infinity>() <= cfg.g_tol) {
      r.status = LbfgsStatus::Converged;
      return r;
    }
    if (r.iterations >= cfg.max_iterations) {
      r.status = LbfgsStatus::MaxIterations;
      return r;
    }
    const int w = cfg.stagnation_window;
    if (static_cast<int>(r.trace.size()) > w) {
      const double past = r.trace[r.trace.size() - 1 - w];
      if (past - r.f <= cfg.stagnation_rel * std::max(1.0, std::abs(r.f))) {
        r.status = LbfgsStatus::Stagnated;
        return r;
      }
    }

    // two-loop recursion
    d = -r.g;
    const int m = static_cast<int>(S.size());
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho[i] * S[i].dot(d);
      d -= alpha[i] * Y[i];
    }
    if (m > 0) d *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (int i = 0; i < m; ++i) {
      const double beta = rho[i] * Y[i].dot(d);
      d += (alpha[i] - beta) * S[i];
    }
    double dg = d.dot(r.g);
    if (!(dg < 0.0)) {
      // not a descent direction; restart from steepest descent
      S.clear();
      Y.clear();
      rho.clear();
      d = -r.g;
      dg = d.dot(r.g);
    }

    double step = m == 0 ? std::min(1.0, 1.0 / r.g.lpNorm<Eigen::Infinity>()) : 1.0;
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < cfg.max_line_search; ++ls) {
      xn = r.x + step * d;
      try {
        fn = fun(xn, gn);
      } catch (const SingularSystem&) {
        fn = std::numeric_limits<double>::infinity();
      }
      ++r.evaluations;
      if (!std::isfinite(fn) || !gn.allFinite() || fn > r.f + cfg.c1 * step * dg) {
        hi = step;
      } else if (gn.dot(d) < cfg.c2 * dg) {
        lo = step;
      } else {
        accepted = true;
        break;
      }
      step = std::isinf(hi) ? 2.0 * step : 0.5 * (lo + hi);
      if (hi - lo < 1e-16 * std::max(1.0, hi)) break;
    }
    if (!accepted) {
      fail(r.x, r.f, r.iterations,
           "line search found no weak Wolfe step after " + std::to_string(cfg.max_line_search) + " trials");
    }

    Eigen::VectorXd s = xn - r.x;
    Eigen::VectorXd y = gn - r.g;
    const double sy = s.dot(y);
    r.x = xn;
    r.f = fn;
    r.g = gn;
    r.trace.push_back(fn);
    if (sy > 1e-16 * s.squaredNorm()) {
      if (static_cast<int>(S.size()) == cfg.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
    }
  }
}

}  // namespace flatplan
