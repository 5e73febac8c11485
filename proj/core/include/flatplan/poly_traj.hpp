#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "flatplan/banded_system.hpp"
#include "flatplan/flat_model.hpp"

namespace flatplan {

// Minimum-jerk splines: s = 3, quintic pieces with 6 monomial coefficients.
inline constexpr int kS = 3;
inline constexpr int kNumCoeffs = 2 * kS;

using PieceCoeffs = Eigen::Matrix<double, kNumCoeffs, 2>;
using Basis = Eigen::Matrix<double, kNumCoeffs, 1>;

// order-th derivative of (1, t, ..., t^5).
Basis basis(double t, int order);

struct BoundaryState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 acceleration = Vec2::Zero();

  const Vec2& operator[](int order) const;
  Vec2& operator[](int order);
};

struct Segment {
  std::vector<PieceCoeffs> pieces;
  double delta_T = 1.0;
  Direction eta = Direction::Forward;

  int pieceCount() const { return static_cast<int>(pieces.size()); }
  double duration() const { return delta_T * pieces.size(); }
  // Local time in [0, duration()]; the final instant belongs to the last piece.
  Vec2 eval(double t, int order) const;
  FlatPoint flatPoint(double t) const;
};

struct TrajLocation {
  int segment = 0;
  int piece = 0;
  double local_t = 0.0;  // time inside the piece
};

class FlatTrajectory {
 public:
  FlatTrajectory() = default;
  explicit FlatTrajectory(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<double>& startStamps() const { return start_stamps_; }
  double totalDuration() const { return total_; }

  // Throws OutOfRange outside [0, totalDuration()].
  TrajLocation locate(double t) const;
  Vec2 eval(double t, int order) const;
  FlatPoint flatPoint(double t) const;
  Direction direction(double t) const { return segments_[locate(t).segment].eta; }

 private:
  std::vector<Segment> segments_;
  std::vector<double> start_stamps_;
  double total_ = 0.0;
};

struct MincoGradient {
  std::vector<Vec2> grad_q;
  double grad_T = 0.0;
  BoundaryState grad_head;
  BoundaryState grad_tail;
};

// Linear system mapping boundary states, waypoints and the duration of one
// segment to its minimum-jerk coefficients. Rows per junction: the waypoint
// followed by continuity of derivative orders 0..4.
class MincoSystem {
 public:
  // Builds and factorizes for `pieces` pieces over total duration T.
  // Throws SingularSystem when T is not positive or the factorization fails.
  void setup(int pieces, double T);

  int pieceCount() const { return pieces_; }
  double deltaT() const { return delta_T_; }

  std::vector<PieceCoeffs> solve(const BoundaryState& head, const BoundaryState& tail,
                                 const std::vector<Vec2>& q) const;

  // Pulls gradients of a scalar cost back from coefficients (and from T at
  // fixed coefficients) to waypoints, T, and the boundary states.
  MincoGradient backprop(const std::vector<PieceCoeffs>& coeffs,
                         const std::vector<PieceCoeffs>& grad_c, double grad_T_direct) const;

 private:
  int pieces_ = 0;
  double delta_T_ = 0.0;
  BandedSystem lu_;
};

Segment mincoSolve(const BoundaryState& head, const BoundaryState& tail,
                   const std::vector<Vec2>& q, double T, Direction eta = Direction::Forward);

MincoGradient mincoBackprop(const Segment& seg, const std::vector<PieceCoeffs>& grad_c,
                            double grad_T_direct);

struct EffortResult {
  double cost = 0.0;
  std::vector<PieceCoeffs> grad_c;
  double grad_T = 0.0;  // at fixed coefficients
};

// Integral of jerk^T W jerk over the segment. W is taken as diagonal.
EffortResult controlEffort(const Segment& seg, const Mat2& W = Mat2::Identity());

}  // namespace flatplan
