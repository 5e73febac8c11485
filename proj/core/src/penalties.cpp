#include "flatplan/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flatplan/errors.hpp"

namespace flatplan {

const char* constraintClassName(ConstraintClass c) {
  switch (c) {
    case ConstraintClass::Velocity: return "velocity";
    case ConstraintClass::AccelT: return "accel_t";
    case ConstraintClass::AccelN: return "accel_n";
    case ConstraintClass::Curvature: return "curvature";
    case ConstraintClass::Corridor: return "corridor";
    case ConstraintClass::Dynamic: return "dynamic";
  }
  return "unknown";
}

void ConstraintConfig::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(field) + " must be a positive number");
  };
  positive(v_max, "constraints.v_m");
  positive(a_t_max, "constraints.a_tm");
  positive(a_n_max, "constraints.a_nm");
  positive(kappa_max, "constraints.kappa_m");
  positive(d_safe, "constraints.d_m");
  positive(alpha, "constraints.alpha");
  if (lambda < 1) throw ValidationError("constraints.lambda must be >= 1");
  if (!(w_T >= 0.0)) throw ValidationError("constraints.w_T must be >= 0");
  for (int c = 0; c < kNumConstraintClasses; ++c) {
    if (!(weights[c] >= 0.0)) {
      throw ValidationError(std::string("constraints.weights.") + constraintClassName(static_cast<ConstraintClass>(c)) +
                            " must be >= 0");
    }
  }
}

ScalarTerm gVelocity(const Vec2& d_sigma, double v_max) {
  ScalarTerm t;
  t.value = d_sigma.squaredNorm() - v_max * v_max;
  t.d_dsigma = 2.0 * d_sigma;
  return t;
}

namespace {

// Dynamic terms certified below this contribute nothing to the objective,
// its gradient or the kink-gap report, so they are not evaluated.
constexpr double kFarSkip = -1e-3;

double checkedSquaredSpeed(const Vec2& d_sigma) {
  const double n2 = d_sigma.squaredNorm();
  if (!(std::sqrt(n2) >= kEpsSpeed)) throw SpeedSingularity("speed below eps in constraint evaluation");
  return n2;
}

}  // namespace

AccelTerms gAccel(const Vec2& d_sigma, const Vec2& dd_sigma, double a_t_max, double a_n_max) {
  const double n2 = checkedSquaredSpeed(d_sigma);
  const Mat2 B = auxB();
  const double p = dd_sigma.dot(d_sigma) / n2;
  const double q = dd_sigma.dot(B * d_sigma) / n2;
  AccelTerms out;
  out.tangential.value = p * p * n2 - a_t_max * a_t_max;
  out.tangential.d_dsigma = 2.0 * p * dd_sigma - 2.0 * p * p * d_sigma;
  out.tangential.d_ddsigma = 2.0 * p * d_sigma;
  out.normal.value = q * q * n2 - a_n_max * a_n_max;
  out.normal.d_dsigma = 2.0 * q * (B.transpose() * dd_sigma) - 2.0 * q * q * d_sigma;
  out.normal.d_ddsigma = 2.0 * q * (B * d_sigma);
  return out;
}

ScalarTerm gCurvature(const Vec2& d_sigma, const Vec2& dd_sigma, double kappa_max) {
  const double n2 = checkedSquaredSpeed(d_sigma);
  const double n = std::sqrt(n2);
  const double n3 = n2 * n;
  const Mat2 B = auxB();
  const double cross = dd_sigma.dot(B * d_sigma);
  const double k = cross / n3;
  ScalarTerm t;
  t.value = k * k - kappa_max * kappa_max;
  t.d_dsigma = 2.0 * k * ((B.transpose() * dd_sigma) / n3 - 3.0 * cross / (n3 * n2) * d_sigma);
  t.d_ddsigma = 2.0 * cross * (B * d_sigma) / (n3 * n3);
  return t;
}

std::vector<ScalarTerm> gCorridor(const Vec2& sigma, const Vec2& d_sigma, Direction eta, const HPolygon& cell,
                                  const Polygon& footprint) {
  const Mat2 R = rotationFromFlat(d_sigma, eta);
  std::vector<ScalarTerm> out;
  out.reserve(footprint.size() * cell.rows.size());
  for (const Vec2& l : footprint) {
    const Vec2 v = sigma + R * l;
    const Mat2 F = rotationJacobianT(l, d_sigma, eta);
    for (const HalfPlane& h : cell.rows) {
      ScalarTerm t;
      t.value = h.normal.dot(v) - h.offset;
      t.d_sigma = h.normal;
      t.d_dsigma = F * h.normal;
      out.push_back(t);
    }
  }
  return out;
}

ObstacleTrajectory::ObstacleTrajectory(std::vector<PosePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ValidationError("obstacle trajectory needs at least one piece");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const PosePiece& p = pieces_[i];
    if (!(p.t1 > p.t0)) throw ValidationError("obstacle trajectory piece " + std::to_string(i) + " has t1 <= t0");
    if (p.x.size() == 0 || p.y.size() == 0 || p.heading.size() == 0) {
      throw ValidationError("obstacle trajectory piece " + std::to_string(i) + " has empty coefficients");
    }
    if (i > 0 && std::abs(p.t0 - pieces_[i - 1].t1) > 1e-9) {
      throw ValidationError("obstacle trajectory piece " + std::to_string(i) + " does not start where the previous ends");
    }
  }
}

ObstacleTrajectory ObstacleTrajectory::constantVelocity(const Vec2& position, double heading, const Vec2& velocity,
                                                        double yaw_rate, double horizon) {
  PosePiece p;
  p.t0 = 0.0;
  p.t1 = horizon;
  p.x = Eigen::Vector2d(position.x(), velocity.x());
  p.y = Eigen::Vector2d(position.y(), velocity.y());
  p.heading = Eigen::Vector2d(heading, yaw_rate);
  return ObstacleTrajectory({p});
}

namespace {

void polyEval(const Eigen::VectorXd& c, double tau, double& value, double& rate) {
  value = 0.0;
  rate = 0.0;
  for (Eigen::Index k = c.size() - 1; k >= 0; --k) {
    rate = rate * tau + value;
    value = value * tau + c(k);
  }
}

}  // namespace

double ObstacleTrajectory::headingAt(double t) const {
  t = std::clamp(t, start(), horizon());
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double v, const PosePiece& p) { return v < p.t1; });
  if (it == pieces_.end()) --it;
  double psi, w;
  polyEval(it->heading, t - it->t0, psi, w);
  return psi;
}

ObstaclePose ObstacleTrajectory::at(double t, bool* clamped) const {
  bool frozen = false;
  if (t > horizon()) {
    t = horizon();
    frozen = true;
  } else if (t < start()) {
    t = start();
    frozen = true;
  }
  if (clamped) *clamped = frozen;
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double v, const PosePiece& p) { return v < p.t1; });
  if (it == pieces_.end()) --it;
  const double tau = t - it->t0;
  double x, vx, y, vy, psi, w;
  polyEval(it->x, tau, x, vx);
  polyEval(it->y, tau, y, vy);
  polyEval(it->heading, tau, psi, w);
  ObstaclePose pose;
  pose.position = Vec2(x, y);
  const double c = std::cos(psi), s = std::sin(psi);
  pose.rotation << c, -s, s, c;
  if (!frozen) {
    pose.velocity = Vec2(vx, vy);
    pose.rotation_rate = w * pose.rotation * auxB();
  }
  return pose;
}

std::vector<ScalarTerm> gDynamic(const Vec2& sigma, const Vec2& d_sigma, Direction eta, double stamp,
                                 const std::vector<DynamicObstacle>& obstacles, const Polygon& footprint,
                                 double d_safe, double alpha, bool clamp, bool* clamped, double skip_below) {
  std::vector<ScalarTerm> out;
  out.reserve(obstacles.size());
  const SmoothDistanceConfig cfg{alpha, -alpha};
  bool any = false;
  for (std::size_t u = 0; u < obstacles.size(); ++u) {
    bool c = false;
    const ObstaclePose pose = obstacles[u].trajectory.at(stamp, &c);
    if (c && !clamp) {
      throw StampOutOfHorizon("stamp " + std::to_string(stamp) + " outside the trajectory of obstacle " +
                              std::to_string(u));
    }
    any = any || c;
    if (d_safe - smoothDistanceLowerBound(sigma, d_sigma, eta, footprint, obstacles[u].body, pose, cfg) < skip_below)
      continue;
    const SmoothDistance U = smoothDistance(sigma, d_sigma, eta, footprint, obstacles[u].body, pose, cfg);
    ScalarTerm t;
    t.value = d_safe - U.value;
    t.d_sigma = -U.d_sigma;
    t.d_dsigma = -U.d_dsigma;
    t.d_stamp = -U.d_stamp;
    out.push_back(t);
  }
  if (clamped) *clamped = any;
  return out;
}

Relaxed relaxL1(double x, double a0) {
  if (x <= 0.0) return {0.0, 0.0};
  if (x <= a0) {
    const double a2 = a0 * a0, a3 = a2 * a0;
    return {-x * x * x * x / (2.0 * a3) + x * x * x / a2, -2.0 * x * x * x / a3 + 3.0 * x * x / a2};
  }
  return {x - 0.5 * a0, 1.0};
}

std::size_t constraintPointCount(const FlatTrajectory& traj, int lambda) {
  std::size_t n = 0;
  for (const Segment& s : traj.segments()) n += static_cast<std::size_t>(s.pieceCount()) * (lambda + 1);
  return n;
}

PenaltyResult penaltySum(const FlatTrajectory& traj, const std::vector<HPolygon>& cells,
                         const std::vector<DynamicObstacle>& obstacles, const Polygon& footprint,
                         const ConstraintConfig& cfg) {
  const auto& segs = traj.segments();
  const int lambda = cfg.lambda;
  if (!cells.empty() && cells.size() != constraintPointCount(traj, lambda)) {
    throw ValidationError("corridor has " + std::to_string(cells.size()) + " cells but the trajectory has " +
                          std::to_string(constraintPointCount(traj, lambda)) + " constraint points");
  }

  PenaltyResult res;
  res.grad_c.resize(segs.size());
  res.grad_T = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(segs.size()));
  PenaltyReport& rep = res.report;
  rep.worst.fill(-std::numeric_limits<double>::infinity());

  std::size_t cell_index = 0;
  double stamp0 = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Segment& seg = segs[i];
    const int M = seg.pieceCount();
    const double dT = seg.delta_T;
    const double T = seg.duration();
    res.grad_c[i].assign(M, PieceCoeffs::Zero());
    for (int j = 0; j < M; ++j) {
      const PieceCoeffs& c = seg.pieces[j];
      for (int k = 0; k <= lambda; ++k, ++cell_index) {
        ++rep.points;
        const double tbar = dT * k / lambda;
        const double frac_piece = static_cast<double>(k) / (lambda * M);
        const double frac_stamp = (j + static_cast<double>(k) / lambda) / M;
        const double stamp = stamp0 + frac_stamp * T;
        const double omega = (k == 0 || k == lambda) ? 0.5 : 1.0;
        const double scale = dT / lambda * omega;

        std::array<Basis, 4> beta;
        std::array<Vec2, 4> d;
        for (int o = 0; o < 4; ++o) {
          beta[o] = basis(tbar, o);
          d[o] = c.transpose() * beta[o];
        }

        auto accumulate = [&](ConstraintClass cls, const ScalarTerm& t) {
          const int ci = static_cast<int>(cls);
          rep.worst[ci] = std::max(rep.worst[ci], t.value);
          if (t.value > -1e-3) {
            rep.min_kink_gap = std::min({rep.min_kink_gap, std::abs(t.value), std::abs(t.value - kRelaxDemarcation)});
          }
          const double w = cfg.weights[ci];
          if (w == 0.0) return;
          const Relaxed r = relaxL1(t.value);
          if (r.value == 0.0 && r.derivative == 0.0) return;
          const double P = w * scale * r.value;
          const double dP = w * scale * r.derivative;
          res.value += P;
          rep.class_totals[ci] += P;
          if (dP != 0.0) {
            res.grad_c[i][j] += dP * (beta[0] * t.d_sigma.transpose() + beta[1] * t.d_dsigma.transpose() +
                                      beta[2] * t.d_ddsigma.transpose());
          }
          const double dG_dtbar = d[1].dot(t.d_sigma) + d[2].dot(t.d_dsigma) + d[3].dot(t.d_ddsigma);
          res.grad_T(i) += P / T + dP * (dG_dtbar * frac_piece + t.d_stamp * frac_stamp);
          if (t.d_stamp != 0.0) {
            for (std::size_t l = 0; l < i; ++l) res.grad_T(l) += dP * t.d_stamp;
          }
        };

        accumulate(ConstraintClass::Velocity, gVelocity(d[1], cfg.v_max));
        if (d[1].norm() < kEpsSpeed) {
          ++rep.singular_points;
          continue;
        }
        const AccelTerms acc = gAccel(d[1], d[2], cfg.a_t_max, cfg.a_n_max);
        accumulate(ConstraintClass::AccelT, acc.tangential);
        accumulate(ConstraintClass::AccelN, acc.normal);
        accumulate(ConstraintClass::Curvature, gCurvature(d[1], d[2], cfg.kappa_max));
        if (!cells.empty()) {
          for (const ScalarTerm& t : gCorridor(d[0], d[1], seg.eta, cells[cell_index], footprint)) {
            accumulate(ConstraintClass::Corridor, t);
          }
        }
        if (!obstacles.empty()) {
          bool clamped = false;
          const auto terms =
              gDynamic(d[0], d[1], seg.eta, stamp, obstacles, footprint, cfg.d_safe, cfg.alpha, true, &clamped,
                       kFarSkip);
          rep.stamp_clamped = rep.stamp_clamped || clamped;
          for (const ScalarTerm& t : terms) accumulate(ConstraintClass::Dynamic, t);
        }
      }
    }
    stamp0 += T;
  }
  rep.total = 0.0;
  for (double v : rep.class_totals) rep.total += v;
  res.value = rep.total;
  return res;
}

}  // namespace flatplan
