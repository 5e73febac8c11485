#include "flatplan/poly_traj.hpp"

#include <cmath>
#include <string>

#include "flatplan/errors.hpp"

namespace flatplan {

Basis basis(double t, int order) {
  Basis b = Basis::Zero();
  for (int k = order; k < kNumCoeffs; ++k) {
    double coef = 1.0;
    for (int m = 0; m < order; ++m) coef *= static_cast<double>(k - m);
    b(k) = coef * std::pow(t, k - order);
  }
  return b;
}

const Vec2& BoundaryState::operator[](int order) const {
  return order == 0 ? position : (order == 1 ? velocity : acceleration);
}

Vec2& BoundaryState::operator[](int order) {
  return order == 0 ? position : (order == 1 ? velocity : acceleration);
}

Vec2 Segment::eval(double t, int order) const {
  const int m = pieceCount();
  int j = static_cast<int>(std::floor(t / delta_T));
  if (j >= m) j = m - 1;
  if (j < 0) j = 0;
  const double lt = t - j * delta_T;
  return pieces[j].transpose() * basis(lt, order);
}

FlatPoint Segment::flatPoint(double t) const {
  FlatPoint fp;
  fp.sigma = eval(t, 0);
  fp.d_sigma = eval(t, 1);
  fp.dd_sigma = eval(t, 2);
  fp.ddd_sigma = eval(t, 3);
  return fp;
}

FlatTrajectory::FlatTrajectory(std::vector<Segment> segments) : segments_(std::move(segments)) {
  start_stamps_.reserve(segments_.size());
  double acc = 0.0;
  for (const Segment& s : segments_) {
    start_stamps_.push_back(acc);
    acc += s.duration();
  }
  total_ = acc;
}

TrajLocation FlatTrajectory::locate(double t) const {
  const double slack = 1e-12 * std::max(1.0, total_);
  if (segments_.empty() || !(t >= -slack && t <= total_ + slack)) {
    throw OutOfRange("time " + std::to_string(t) + " outside [0, " + std::to_string(total_) + "]");
  }
  TrajLocation loc;
  int i = static_cast<int>(segments_.size()) - 1;
  while (i > 0 && t < start_stamps_[i]) --i;
  const Segment& seg = segments_[i];
  const double st = t - start_stamps_[i];
  int j = static_cast<int>(std::floor(st / seg.delta_T));
  if (j >= seg.pieceCount()) j = seg.pieceCount() - 1;
  if (j < 0) j = 0;
  loc.segment = i;
  loc.piece = j;
  loc.local_t = st - j * seg.delta_T;
  return loc;
}

Vec2 FlatTrajectory::eval(double t, int order) const {
  const TrajLocation loc = locate(t);
  return segments_[loc.segment].pieces[loc.piece].transpose() * basis(loc.local_t, order);
}

FlatPoint FlatTrajectory::flatPoint(double t) const {
  const TrajLocation loc = locate(t);
  const PieceCoeffs& c = segments_[loc.segment].pieces[loc.piece];
  FlatPoint fp;
  fp.sigma = c.transpose() * basis(loc.local_t, 0);
  fp.d_sigma = c.transpose() * basis(loc.local_t, 1);
  fp.dd_sigma = c.transpose() * basis(loc.local_t, 2);
  fp.ddd_sigma = c.transpose() * basis(loc.local_t, 3);
  return fp;
}

namespace {

// Row index of the waypoint condition at junction j; continuity rows follow.
constexpr int junctionRow(int j) { return kS + kNumCoeffs * j; }

}  // namespace

void MincoSystem::setup(int pieces, double T) {
  if (pieces < 1) throw SingularSystem("segment needs at least one piece");
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw SingularSystem("segment duration must be positive and finite, got " + std::to_string(T));
  }
  pieces_ = pieces;
  delta_T_ = T / pieces;
  const int n = kNumCoeffs * pieces;
  lu_.reset(n, 4, 2);

  for (int d = 0; d < kS; ++d) {
    const Basis b0 = basis(0.0, d);
    for (int k = 0; k < kNumCoeffs; ++k)
      if (b0(k) != 0.0) lu_(d, k) = b0(k);
  }
  std::array<Basis, kNumCoeffs> end_basis;
  for (int d = 0; d < kNumCoeffs; ++d) end_basis[d] = basis(delta_T_, d);
  for (int j = 0; j + 1 < pieces; ++j) {
    const int r = junctionRow(j);
    const int cj = kNumCoeffs * j;
    for (int k = 0; k < kNumCoeffs; ++k) lu_(r, cj + k) = end_basis[0](k);
    for (int d = 0; d < 2 * kS - 1; ++d) {
      const int row = r + 1 + d;
      for (int k = d; k < kNumCoeffs; ++k) lu_(row, cj + k) = end_basis[d](k);
      lu_(row, cj + kNumCoeffs + d) = -basis(0.0, d)(d);
    }
  }
  const int tail_row = n - kS;
  const int cl = kNumCoeffs * (pieces - 1);
  for (int d = 0; d < kS; ++d)
    for (int k = d; k < kNumCoeffs; ++k) lu_(tail_row + d, cl + k) = end_basis[d](k);

  lu_.factorize();
}

std::vector<PieceCoeffs> MincoSystem::solve(const BoundaryState& head, const BoundaryState& tail,
                                            const std::vector<Vec2>& q) const {
  if (static_cast<int>(q.size()) != pieces_ - 1) {
    throw ValidationError("expected " + std::to_string(pieces_ - 1) + " waypoints, got " +
                          std::to_string(q.size()));
  }
  const int n = kNumCoeffs * pieces_;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 2);
  for (int d = 0; d < kS; ++d) {
    b.row(d) = head[d].transpose();
    b.row(n - kS + d) = tail[d].transpose();
  }
  for (int j = 0; j + 1 < pieces_; ++j) b.row(junctionRow(j)) = q[j].transpose();
  lu_.solve(b);
  std::vector<PieceCoeffs> c(pieces_);
  for (int j = 0; j < pieces_; ++j) c[j] = b.middleRows(kNumCoeffs * j, kNumCoeffs);
  return c;
}

MincoGradient MincoSystem::backprop(const std::vector<PieceCoeffs>& coeffs,
                                    const std::vector<PieceCoeffs>& grad_c,
                                    double grad_T_direct) const {
  const int n = kNumCoeffs * pieces_;
  Eigen::MatrixXd g(n, 2);
  for (int j = 0; j < pieces_; ++j) g.middleRows(kNumCoeffs * j, kNumCoeffs) = grad_c[j];
  lu_.solveTransposed(g);

  MincoGradient out;
  out.grad_q.resize(pieces_ - 1);
  for (int d = 0; d < kS; ++d) {
    out.grad_head[d] = g.row(d).transpose();
    out.grad_tail[d] = g.row(n - kS + d).transpose();
  }
  for (int j = 0; j + 1 < pieces_; ++j) out.grad_q[j] = g.row(junctionRow(j)).transpose();

  // d(cost)/d(deltaT) through the coefficients: -G^T (dA/d deltaT) c. Only
  // rows holding beta^(d)(deltaT) depend on deltaT.
  std::array<Basis, kNumCoeffs> dbasis;
  for (int d = 0; d < kNumCoeffs; ++d) dbasis[d] = basis(delta_T_, d + 1);
  double d_dt = 0.0;
  for (int j = 0; j + 1 < pieces_; ++j) {
    const int r = junctionRow(j);
    const Eigen::RowVector2d w0 = dbasis[0].transpose() * coeffs[j];
    d_dt -= w0.dot(g.row(r));
    for (int d = 0; d < 2 * kS - 1; ++d) {
      const Eigen::RowVector2d wd = dbasis[d].transpose() * coeffs[j];
      d_dt -= wd.dot(g.row(r + 1 + d));
    }
  }
  for (int d = 0; d < kS; ++d) {
    const Eigen::RowVector2d wd = dbasis[d].transpose() * coeffs[pieces_ - 1];
    d_dt -= wd.dot(g.row(n - kS + d));
  }
  out.grad_T = grad_T_direct + d_dt / pieces_;
  return out;
}

Segment mincoSolve(const BoundaryState& head, const BoundaryState& tail,
                   const std::vector<Vec2>& q, double T, Direction eta) {
  MincoSystem sys;
  sys.setup(static_cast<int>(q.size()) + 1, T);
  Segment seg;
  seg.pieces = sys.solve(head, tail, q);
  seg.delta_T = sys.deltaT();
  seg.eta = eta;
  return seg;
}

MincoGradient mincoBackprop(const Segment& seg, const std::vector<PieceCoeffs>& grad_c,
                            double grad_T_direct) {
  MincoSystem sys;
  sys.setup(seg.pieceCount(), seg.duration());
  return sys.backprop(seg.pieces, grad_c, grad_T_direct);
}

EffortResult controlEffort(const Segment& seg, const Mat2& W) {
  const double t = seg.delta_T;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  Eigen::Matrix3d q;
  q << 36.0 * t, 72.0 * t2, 120.0 * t3,
       72.0 * t2, 192.0 * t3, 360.0 * t4,
       120.0 * t3, 360.0 * t4, 720.0 * t5;
  const Eigen::Vector2d w = W.diagonal();
  const Basis jb = basis(t, 3);

  EffortResult r;
  r.grad_c.assign(seg.pieces.size(), PieceCoeffs::Zero());
  double end_rate = 0.0;
  for (std::size_t j = 0; j < seg.pieces.size(); ++j) {
    const Eigen::Matrix<double, 3, 2> c3 = seg.pieces[j].bottomRows<3>();
    const Eigen::Matrix<double, 3, 2> qc = q * c3;
    for (int col = 0; col < 2; ++col) {
      r.cost += w(col) * c3.col(col).dot(qc.col(col));
      r.grad_c[j].bottomRows<3>().col(col) = 2.0 * w(col) * qc.col(col);
    }
    const Vec2 jerk = seg.pieces[j].transpose() * jb;
    end_rate += jerk.dot(w.cwiseProduct(jerk));
  }
  r.grad_T = end_rate / static_cast<double>(seg.pieces.size());
  return r;
}

}  // namespace flatplan
