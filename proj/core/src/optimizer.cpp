#include "flatplan/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "flatplan/errors.hpp"

namespace flatplan {

TimeMap timeMap(double tau) {
  if (tau > 0.0) return {0.5 * tau * tau + tau + 1.0, tau + 1.0};
  const double den = tau * tau - 2.0 * tau + 2.0;
  return {2.0 / den, 4.0 * (1.0 - tau) / (den * den)};
}

double inverseTimeMap(double T) {
  if (!(T > 0.0)) throw ValidationError("duration must be positive to invert the time map");
  if (T >= 1.0) return -1.0 + std::sqrt(2.0 * T - 1.0);
  return 1.0 - std::sqrt(2.0 / T - 1.0);
}

ShiftVelocity shiftVelocity(double theta, double v_bar) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {Vec2(v_bar * c, v_bar * s), Vec2(-v_bar * s, v_bar * c)};
}

TrajectoryProblem::TrajectoryProblem(OptimizationProblem problem) : p_(std::move(problem)) {
  const int n = static_cast<int>(p_.pieces.size());
  if (n == 0) throw ValidationError("problem needs at least one segment");
  if (static_cast<int>(p_.etas.size()) != n) throw ValidationError("problem needs one direction per segment");
  dim_ = n + 3 * (n - 1);
  for (int M : p_.pieces) {
    if (M < 1) throw ValidationError("every segment needs at least one piece");
    dim_ += 2 * (M - 1);
  }
}

Eigen::VectorXd TrajectoryProblem::pack(const DecisionVector& dv) const {
  const int n = segmentCount();
  Eigen::VectorXd x(dim_);
  Eigen::Index at = 0;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(dv.q[i].size()) != p_.pieces[i] - 1) throw ValidationError("waypoint count mismatch");
    for (const Vec2& q : dv.q[i]) {
      x(at++) = q.x();
      x(at++) = q.y();
    }
  }
  for (int i = 0; i < n; ++i) x(at++) = dv.tau(i);
  for (int i = 0; i + 1 < n; ++i) {
    x(at++) = dv.p_g[i].x();
    x(at++) = dv.p_g[i].y();
  }
  for (int i = 0; i + 1 < n; ++i) x(at++) = dv.theta_g(i);
  return x;
}

DecisionVector TrajectoryProblem::unpack(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw ValidationError("decision vector has the wrong dimension");
  const int n = segmentCount();
  DecisionVector dv;
  Eigen::Index at = 0;
  dv.q.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j + 1 < p_.pieces[i]; ++j, at += 2) dv.q[i].emplace_back(x(at), x(at + 1));
  }
  dv.tau = x.segment(at, n);
  at += n;
  for (int i = 0; i + 1 < n; ++i, at += 2) dv.p_g.emplace_back(x(at), x(at + 1));
  dv.theta_g = x.segment(at, n - 1);
  return dv;
}

namespace {

struct Assembled {
  std::vector<MincoSystem> systems;
  std::vector<Segment> segments;
  std::vector<TimeMap> times;
  std::vector<ShiftVelocity> shifts;
};

Assembled assemble(const OptimizationProblem& p, const DecisionVector& dv) {
  const int n = static_cast<int>(p.pieces.size());
  Assembled a;
  a.systems.resize(n);
  for (int i = 0; i + 1 < n; ++i) a.shifts.push_back(shiftVelocity(dv.theta_g(i), p.v_bar));
  for (int i = 0; i < n; ++i) {
    a.times.push_back(timeMap(dv.tau(i)));
    BoundaryState head = p.start, tail = p.goal;
    if (i > 0) {
      head = BoundaryState{};
      head.position = dv.p_g[i - 1];
      head.velocity = -a.shifts[i - 1].v;
    }
    if (i + 1 < n) {
      tail = BoundaryState{};
      tail.position = dv.p_g[i];
      tail.velocity = a.shifts[i].v;
    }
    a.systems[i].setup(p.pieces[i], a.times[i].T);
    Segment seg;
    seg.pieces = a.systems[i].solve(head, tail, dv.q[i]);
    seg.delta_T = a.systems[i].deltaT();
    seg.eta = p.etas[i];
    a.segments.push_back(std::move(seg));
  }
  return a;
}

}  // namespace

FlatTrajectory TrajectoryProblem::trajectory(const Eigen::VectorXd& x) const {
  return FlatTrajectory(assemble(p_, unpack(x)).segments);
}

double TrajectoryProblem::evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* grad, ObjectiveBreakdown* parts) const {
  const DecisionVector dv = unpack(x);
  const Assembled a = assemble(p_, dv);
  const int n = segmentCount();
  const FlatTrajectory traj(a.segments);

  ObjectiveBreakdown b;
  std::vector<EffortResult> effort;
  for (const Segment& s : a.segments) {
    effort.push_back(controlEffort(s));
    b.effort += effort.back().cost;
  }
  for (const TimeMap& t : a.times) b.time += p_.constraints.w_T * t.T;
  const PenaltyResult pen = penaltySum(traj, p_.cells, p_.obstacles, p_.footprint, p_.constraints);
  b.penalty = pen.value;
  b.report = pen.report;
  b.total = b.effort + b.time + b.penalty;
  if (parts) *parts = b;

  if (grad) {
    grad->setZero(dim_);
    Eigen::Index q_at = 0;
    const Eigen::Index tau_at = dim_ - n - 3 * (n - 1);
    const Eigen::Index pg_at = tau_at + n;
    const Eigen::Index th_at = pg_at + 2 * (n - 1);
    for (int i = 0; i < n; ++i) {
      std::vector<PieceCoeffs> gc = effort[i].grad_c;
      for (std::size_t j = 0; j < gc.size(); ++j) gc[j] += pen.grad_c[i][j];
      const double gT = effort[i].grad_T + p_.constraints.w_T + pen.grad_T(i);
      const MincoGradient mg = a.systems[i].backprop(a.segments[i].pieces, gc, gT);
      for (const Vec2& g : mg.grad_q) {
        (*grad)(q_at++) = g.x();
        (*grad)(q_at++) = g.y();
      }
      (*grad)(tau_at + i) = mg.grad_T * a.times[i].dT;
      if (i > 0) {
        // head of segment i: position p_g[i-1], velocity -v_g[i-1]
        (*grad)(pg_at + 2 * (i - 1)) += mg.grad_head.position.x();
        (*grad)(pg_at + 2 * (i - 1) + 1) += mg.grad_head.position.y();
        (*grad)(th_at + i - 1) -= mg.grad_head.velocity.dot(a.shifts[i - 1].dv);
      }
      if (i + 1 < n) {
        (*grad)(pg_at + 2 * i) += mg.grad_tail.position.x();
        (*grad)(pg_at + 2 * i + 1) += mg.grad_tail.position.y();
        (*grad)(th_at + i) += mg.grad_tail.velocity.dot(a.shifts[i].dv);
      }
    }
  }
  return b.total;
}

SolveResult solve(const TrajectoryProblem& problem, const Eigen::VectorXd& x0, const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) { return problem.evaluate(x, &g); };
  const LbfgsResult r = lbfgsMinimize(f, x0, cfg.lbfgs);
  SolveResult out;
  out.x = r.x;
  out.iterations = r.iterations;
  out.evaluations = r.evaluations;
  out.grad_norm = r.g.lpNorm<Eigen::Infinity>();
  out.status = r.status;
  out.trace = r.trace;
  problem.evaluate(r.x, nullptr, &out.objective);
  out.trajectory = problem.trajectory(r.x);
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace flatplan
