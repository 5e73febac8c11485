#pragma once

#include <Eigen/Core>
#include <array>
#include <limits>
#include <string>
#include <vector>

#include "flatplan/geometry.hpp"
#include "flatplan/poly_traj.hpp"

namespace flatplan {

enum class ConstraintClass : int { Velocity = 0, AccelT, AccelN, Curvature, Corridor, Dynamic };
inline constexpr int kNumConstraintClasses = 6;
const char* constraintClassName(ConstraintClass c);

struct ConstraintConfig {
  double v_max = 10.0;
  double a_t_max = 3.0;
  double a_n_max = 3.0;
  double kappa_max = 0.4;
  double d_safe = 0.3;
  int lambda = 16;
  std::array<double, kNumConstraintClasses> weights{1e4, 1e4, 1e4, 1e4, 1e4, 1e4};
  double w_T = 50.0;
  double alpha = 100.0;

  // Throws ValidationError naming the offending field.
  void validate() const;
};

struct ScalarTerm {
  double value = 0.0;
  Vec2 d_sigma = Vec2::Zero();
  Vec2 d_dsigma = Vec2::Zero();
  Vec2 d_ddsigma = Vec2::Zero();
  double d_stamp = 0.0;
};

ScalarTerm gVelocity(const Vec2& d_sigma, double v_max);

struct AccelTerms {
  ScalarTerm tangential;
  ScalarTerm normal;
};
// Throws SpeedSingularity.
AccelTerms gAccel(const Vec2& d_sigma, const Vec2& dd_sigma, double a_t_max, double a_n_max);
ScalarTerm gCurvature(const Vec2& d_sigma, const Vec2& dd_sigma, double kappa_max);

// One term per (footprint vertex, cell half-plane), vertex-major.
std::vector<ScalarTerm> gCorridor(const Vec2& sigma, const Vec2& d_sigma, Direction eta, const HPolygon& cell,
                                  const Polygon& footprint);

// Obstacle pose as polynomials in (t - t0) on [t0, t1].
struct PosePiece {
  double t0 = 0.0;
  double t1 = 0.0;
  Eigen::VectorXd x, y, heading;  // monomial coefficients, lowest order first
};

class ObstacleTrajectory {
 public:
  ObstacleTrajectory() = default;
  // Pieces must be contiguous and increasing. Throws ValidationError.
  explicit ObstacleTrajectory(std::vector<PosePiece> pieces);

  static ObstacleTrajectory constantVelocity(const Vec2& position, double heading, const Vec2& velocity,
                                             double yaw_rate, double horizon);

  double start() const { return pieces_.front().t0; }
  double horizon() const { return pieces_.back().t1; }
  const std::vector<PosePiece>& pieces() const { return pieces_; }

  // Outside the domain the obstacle is frozen at the nearest end pose with
  // zero rates, and `clamped` is set.
  ObstaclePose at(double t, bool* clamped = nullptr) const;
  double headingAt(double t) const;

 private:
  std::vector<PosePiece> pieces_;
};

struct DynamicObstacle {
  Polygon body;  // clockwise, body frame
  ObstacleTrajectory trajectory;
};

// d_safe - U per obstacle. Stamps outside an obstacle's domain throw
// StampOutOfHorizon unless `clamp` is set, in which case `clamped` reports it.
// Obstacles whose term is certified to lie below `skip_below` are left out.
std::vector<ScalarTerm> gDynamic(const Vec2& sigma, const Vec2& d_sigma, Direction eta, double stamp,
                                 const std::vector<DynamicObstacle>& obstacles, const Polygon& footprint,
                                 double d_safe, double alpha, bool clamp = false, bool* clamped = nullptr,
                                 double skip_below = -std::numeric_limits<double>::infinity());

struct Relaxed {
  double value = 0.0;
  double derivative = 0.0;
};
inline constexpr double kRelaxDemarcation = 1e-4;
Relaxed relaxL1(double x, double a0 = kRelaxDemarcation);

struct PenaltyReport {
  double total = 0.0;
  std::array<double, kNumConstraintClasses> class_totals{};
  // Largest constraint value seen per class (negative when satisfied).
  std::array<double, kNumConstraintClasses> worst{};
  int points = 0;
  int singular_points = 0;  // speed below eps; speed-dependent classes skipped
  bool stamp_clamped = false;
  // Smallest distance of any active-or-near constraint value to a kink of the
  // relaxation (0 and a0); small values make finite differences unreliable.
  double min_kink_gap = std::numeric_limits<double>::infinity();
};

struct PenaltyResult {
  double value = 0.0;
  std::vector<std::vector<PieceCoeffs>> grad_c;  // per segment, per piece
  Eigen::VectorXd grad_T;                        // per segment, at fixed coefficients
  PenaltyReport report;
};

// Number of constraint points of a trajectory, (lambda + 1) per piece.
std::size_t constraintPointCount(const FlatTrajectory& traj, int lambda);

// Trapezoidal penalty over all constraint points. `cells` holds one corridor
// cell per constraint point in segment, piece, k order; pass an empty vector
// to skip the corridor class.
PenaltyResult penaltySum(const FlatTrajectory& traj, const std::vector<HPolygon>& cells,
                         const std::vector<DynamicObstacle>& obstacles, const Polygon& footprint,
                         const ConstraintConfig& cfg);

}  // namespace flatplan
