#include "flatplan/reeds_shepp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace flatplan {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kZero = 10 * std::numeric_limits<double>::epsilon();

double mod2pi(double x) {
  double v = std::fmod(x, 2.0 * kPi);
  if (v < -kPi)
    v += 2.0 * kPi;
  else if (v > kPi)
    v -= 2.0 * kPi;
  return v;
}

void polar(double x, double y, double& r, double& theta) {
  r = std::hypot(x, y);
  theta = std::atan2(y, x);
}

void tauOmega(double u, double v, double xi, double eta, double phi, double& tau, double& omega) {
  const double delta = mod2pi(u - v);
  const double a = std::sin(u) - std::sin(delta);
  const double b = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = (t2 < 0) ? mod2pi(t1 + kPi) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

// Word solvers in the unit-radius frame. Each fills the free lengths (t, u, v).
bool LpSpLp(double x, double y, double phi, double& t, double& u, double& v) {
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kZero) {
    v = mod2pi(phi - t);
    return v >= -kZero;
  }
  return false;
}

bool LpSpRp(double x, double y, double phi, double& t, double& u, double& v) {
  double t1, u1;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 >= 4.0) {
    u = std::sqrt(u1 - 4.0);
    t = mod2pi(t1 + std::atan2(2.0, u));
    v = mod2pi(t - phi);
    return t >= -kZero && v >= -kZero;
  }
  return false;
}

bool LpRmL(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi), eta = y - 1.0 + std::cos(phi);
  double u1, theta;
  polar(xi, eta, u1, theta);
  if (u1 <= 4.0) {
    u = -2.0 * std::asin(0.25 * u1);
    t = mod2pi(theta + 0.5 * u + kPi);
    v = mod2pi(phi - t + u);
    return t >= -kZero && u <= kZero;
  }
  return false;
}

bool LpRupLumRm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::sqrt(xi * xi + eta * eta));
  if (rho <= 1.0) {
    u = std::acos(rho);
    tauOmega(u, -u, xi, eta, phi, t, v);
    return t >= -kZero && v <= kZero;
  }
  return false;
}

bool LpRumLumRp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho >= 0 && rho <= 1) {
    u = -std::acos(rho);
    if (u >= -0.5 * kPi) {
      tauOmega(u, u, xi, eta, phi, t, v);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

bool LpRmSmLm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi), eta = y - 1.0 + std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    const double r = std::sqrt(rho * rho - 4.0);
    u = 2.0 - r;
    t = mod2pi(theta + std::atan2(r, -2.0));
    v = mod2pi(phi - 0.5 * kPi - t);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool LpRmSmRm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(-eta, xi, rho, theta);
  if (rho >= 2.0) {
    t = theta;
    u = 2.0 - rho;
    v = mod2pi(t + 0.5 * kPi - phi);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool LpRmSLmRp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    u = 4.0 - std::sqrt(rho * rho - 4.0);
    if (u <= kZero) {
      t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
      v = mod2pi(t - phi);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

// Candidate accumulator in the unit-radius frame.
struct Best {
  RsPath path;
  double length = std::numeric_limits<double>::infinity();

  void offer(const char* word, std::initializer_list<double> lens, bool reflect) {
    double total = 0.0;
    for (double l : lens) total += std::abs(l);
    if (!(total < length)) return;
    RsPath p;
    int i = 0;
    for (double l : lens) {
      const char c = word[i];
      Steer s = c == 'S' ? Steer::Straight : (c == 'L' ? Steer::Left : Steer::Right);
      if (reflect && s != Steer::Straight) s = (s == Steer::Left) ? Steer::Right : Steer::Left;
      p.steer[i] = s;
      p.length[i] = l;
      ++i;
    }
    p.count = i;
    path = p;
    length = total;
  }
};

using Solver = bool (*)(double, double, double, double&, double&, double&);

RsPath shortestUnit(double x, double y, double phi) {
  Best best;
  const double hp = 0.5 * kPi;
  double t, u, v;
  auto csc = [&](Solver f, const char* word) {
    if (f(x, y, phi, t, u, v)) best.offer(word, {t, u, v}, false);
    if (f(-x, y, -phi, t, u, v)) best.offer(word, {-t, -u, -v}, false);
    if (f(x, -y, -phi, t, u, v)) best.offer(word, {t, u, v}, true);
    if (f(-x, -y, phi, t, u, v)) best.offer(word, {-t, -u, -v}, true);
  };
  csc(LpSpLp, "LSL");
  csc(LpSpRp, "LSR");

  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);

  // CCC
  csc(LpRmL, "LRL");
  if (LpRmL(xb, yb, phi, t, u, v)) best.offer("LRL", {v, u, t}, false);
  if (LpRmL(-xb, yb, -phi, t, u, v)) best.offer("LRL", {-v, -u, -t}, false);
  if (LpRmL(xb, -yb, -phi, t, u, v)) best.offer("LRL", {v, u, t}, true);
  if (LpRmL(-xb, -yb, phi, t, u, v)) best.offer("LRL", {-v, -u, -t}, true);

  // CCCC
  if (LpRupLumRm(x, y, phi, t, u, v)) best.offer("LRLR", {t, u, -u, v}, false);
  if (LpRupLumRm(-x, y, -phi, t, u, v)) best.offer("LRLR", {-t, -u, u, -v}, false);
  if (LpRupLumRm(x, -y, -phi, t, u, v)) best.offer("LRLR", {t, u, -u, v}, true);
  if (LpRupLumRm(-x, -y, phi, t, u, v)) best.offer("LRLR", {-t, -u, u, -v}, true);
  if (LpRumLumRp(x, y, phi, t, u, v)) best.offer("LRLR", {t, u, u, v}, false);
  if (LpRumLumRp(-x, y, -phi, t, u, v)) best.offer("LRLR", {-t, -u, -u, -v}, false);
  if (LpRumLumRp(x, -y, -phi, t, u, v)) best.offer("LRLR", {t, u, u, v}, true);
  if (LpRumLumRp(-x, -y, phi, t, u, v)) best.offer("LRLR", {-t, -u, -u, -v}, true);

  // CCSC and its reverse CSCC
  auto ccsc = [&](Solver f, const char* fwd, const char* bwd) {
    if (f(x, y, phi, t, u, v)) best.offer(fwd, {t, -hp, u, v}, false);
    if (f(-x, y, -phi, t, u, v)) best.offer(fwd, {-t, hp, -u, -v}, false);
    if (f(x, -y, -phi, t, u, v)) best.offer(fwd, {t, -hp, u, v}, true);
    if (f(-x, -y, phi, t, u, v)) best.offer(fwd, {-t, hp, -u, -v}, true);
    if (f(xb, yb, phi, t, u, v)) best.offer(bwd, {v, u, -hp, t}, false);
    if (f(-xb, yb, -phi, t, u, v)) best.offer(bwd, {-v, -u, hp, -t}, false);
    if (f(xb, -yb, -phi, t, u, v)) best.offer(bwd, {v, u, -hp, t}, true);
    if (f(-xb, -yb, phi, t, u, v)) best.offer(bwd, {-v, -u, hp, -t}, true);
  };
  ccsc(LpRmSmLm, "LRSL", "LSRL");
  ccsc(LpRmSmRm, "LRSR", "RSRL");

  // CCSCC
  if (LpRmSLmRp(x, y, phi, t, u, v)) best.offer("LRSLR", {t, -hp, u, -hp, v}, false);
  if (LpRmSLmRp(-x, y, -phi, t, u, v)) best.offer("LRSLR", {-t, hp, -u, hp, -v}, false);
  if (LpRmSLmRp(x, -y, -phi, t, u, v)) best.offer("LRSLR", {t, -hp, u, -hp, v}, true);
  if (LpRmSLmRp(-x, -y, phi, t, u, v)) best.offer("LRSLR", {-t, hp, -u, hp, -v}, true);
  return best.path;
}

// Advance a unit-radius pose along one piece by signed length l.
Pose2 advance(const Pose2& p, Steer s, double l) {
  Pose2 q = p;
  switch (s) {
    case Steer::Left:
      q.x += std::sin(p.theta + l) - std::sin(p.theta);
      q.y += -std::cos(p.theta + l) + std::cos(p.theta);
      q.theta = p.theta + l;
      break;
    case Steer::Right:
      q.x += -std::sin(p.theta - l) + std::sin(p.theta);
      q.y += std::cos(p.theta - l) - std::cos(p.theta);
      q.theta = p.theta - l;
      break;
    case Steer::Straight:
      q.x += l * std::cos(p.theta);
      q.y += l * std::sin(p.theta);
      break;
  }
  return q;
}

Pose2 advanceScaled(const Pose2& p, Steer s, double len_m, double radius) {
  Pose2 unit{p.x / radius, p.y / radius, p.theta};
  Pose2 q = advance(unit, s, len_m / radius);
  return {q.x * radius, q.y * radius, wrapAngle(q.theta)};
}

}  // namespace

double wrapAngle(double a) {
  double v = std::remainder(a, 2.0 * kPi);
  if (v <= -kPi) v += 2.0 * kPi;
  return v;
}

double RsPath::totalLength() const {
  double s = 0.0;
  for (int i = 0; i < count; ++i) s += std::abs(length[i]);
  return s;
}

RsPath rsShortest(const Pose2& from, const Pose2& to, double kappa_max) {
  const double radius = 1.0 / kappa_max;
  const double dx = to.x - from.x, dy = to.y - from.y;
  const double c = std::cos(from.theta), s = std::sin(from.theta);
  const double x = (c * dx + s * dy) / radius;
  const double y = (-s * dx + c * dy) / radius;
  RsPath p = shortestUnit(x, y, wrapAngle(to.theta - from.theta));
  for (int i = 0; i < p.count; ++i) p.length[i] *= radius;
  return p;
}

Pose2 rsInterpolate(const Pose2& from, const RsPath& path, double kappa_max, double s) {
  const double radius = 1.0 / kappa_max;
  Pose2 p = from;
  for (int i = 0; i < path.count && s > 0.0; ++i) {
    const double l = path.length[i];
    const double step = std::min(s, std::abs(l));
    p = advanceScaled(p, path.steer[i], l < 0 ? -step : step, radius);
    s -= step;
  }
  return p;
}

std::vector<PathPose> rsSample(const Pose2& from, const RsPath& path, double kappa_max,
                               double step) {
  const double radius = 1.0 / kappa_max;
  std::vector<PathPose> out;
  PathPose start;
  start.pose = from;
  out.push_back(start);
  Pose2 cur = from;
  for (int i = 0; i < path.count; ++i) {
    const double l = path.length[i];
    if (std::abs(l) < 1e-12) continue;
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(l) / step - 1e-9)));
    const Direction dir = l < 0 ? Direction::Backward : Direction::Forward;
    double k = 0.0;
    if (path.steer[i] == Steer::Left) k = kappa_max;
    if (path.steer[i] == Steer::Right) k = -kappa_max;
    // the piece start pose belongs to this piece's motion as well
    out.back().dir = out.size() == 1 ? dir : out.back().dir;
    if (out.size() == 1) out.back().kappa = k;
    for (int m = 1; m <= n; ++m) {
      PathPose pp;
      pp.pose = advanceScaled(cur, path.steer[i], l * m / n, radius);
      pp.dir = dir;
      pp.kappa = k;
      out.push_back(pp);
    }
    cur = out.back().pose;
  }
  return out;
}

}  // namespace flatplan
