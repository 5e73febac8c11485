#include "flatplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "flatplan/errors.hpp"

namespace flatplan {

double HPolygon::violation(const Vec2& p) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const HalfPlane& h : rows) worst = std::max(worst, h.normal.dot(p) - h.offset);
  return worst;
}

bool isConvexClockwise(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const Vec2& c = poly[(i + 2) % n];
    if (!(cross2(b - a, c - b) < -1e-12)) return false;
  }
  // Turning consistently right is not enough for self-intersecting stars;
  // the total turn must be exactly one revolution.
  double turn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = poly[(i + 1) % n] - poly[i];
    const Vec2 e1 = poly[(i + 2) % n] - poly[(i + 1) % n];
    turn += std::atan2(cross2(e0, e1), e0.dot(e1));
  }
  return std::abs(turn + 2.0 * std::numbers::pi) < 1e-6;
}

void validatePolygon(const Polygon& poly) {
  for (const Vec2& v : poly)
    if (!v.allFinite()) throw InvalidPolygon("polygon has a non-finite vertex");
  if (poly.size() < 3) throw InvalidPolygon("polygon needs at least 3 vertices");
  if (!isConvexClockwise(poly)) throw InvalidPolygon("polygon is not strictly convex and clockwise");
}

std::vector<HalfPlane> hrepFromVertices(const Polygon& poly) {
  const Mat2 b = auxB();
  const std::size_t n = poly.size();
  std::vector<HalfPlane> out(n);
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2 d = poly[(e + 1) % n] - poly[e];
    const double len = d.norm();
    if (len < 1e-9) throw DegenerateEdge("edge " + std::to_string(e) + " has zero length");
    out[e].normal = b * d / len;
    out[e].offset = out[e].normal.dot(poly[e]);
  }
  return out;
}

Polygon transformPolygon(const Polygon& body, const Mat2& R, const Vec2& t) {
  Polygon out(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) out[i] = t + R * body[i];
  return out;
}

namespace {

double pointSegmentDistance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (a + s * ab - p).norm();
}

// Largest separation of Q from P along P's outward edge normals.
double maxSeparation(const Polygon& P, const Polygon& Q) {
  const Mat2 b = auxB();
  const std::size_t n = P.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < n; ++e) {
    const Vec2 d = P[(e + 1) % n] - P[e];
    const Vec2 h = b * d / d.norm();
    double m = std::numeric_limits<double>::infinity();
    for (const Vec2& q : Q) m = std::min(m, h.dot(q - P[e]));
    best = std::max(best, m);
  }
  return best;
}

}  // namespace

double sdExact(const Polygon& P, const Polygon& Q) {
  const double sep = std::max(maxSeparation(P, Q), maxSeparation(Q, P));
  if (sep < 0.0) return sep;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < Q.size(); ++i)
    for (const Vec2& p : P) d = std::min(d, pointSegmentDistance(p, Q[i], Q[(i + 1) % Q.size()]));
  for (std::size_t i = 0; i < P.size(); ++i)
    for (const Vec2& q : Q) d = std::min(d, pointSegmentDistance(q, P[i], P[(i + 1) % P.size()]));
  // equal in exact arithmetic for vertex-edge contacts; keeps lbSd <= sdExact under rounding
  return std::max(d, sep);
}

double lbSd(const Polygon& ego, const Polygon& obs) {
  return std::max(maxSeparation(ego, obs), maxSeparation(obs, ego));
}

LseResult lse(const Eigen::VectorXd& values, double alpha) {
  // Shift by the extreme value itself so that lse >= max (alpha > 0) and
  // lse <= min (alpha < 0) hold in floating point, not only in exact math.
  Eigen::Index im = 0;
  const Eigen::VectorXd z = alpha * values;
  z.maxCoeff(&im);
  const double vm = values(im);
  LseResult r;
  r.weights = (alpha * (values.array() - vm)).exp();
  const double s = r.weights.sum();
  r.weights /= s;
  r.value = vm + std::log(s) / alpha;
  return r;
}

SmoothDistance smoothDistance(const Vec2& sigma, const Vec2& d_sigma, Direction eta,
                              const Polygon& ego_body, const Polygon& obs_body,
                              const ObstaclePose& pose, const SmoothDistanceConfig& cfg) {
  const Mat2 R = rotationFromFlat(d_sigma, eta);
  const Mat2 b = auxB();
  const int ne = static_cast<int>(ego_body.size());
  const int nu = static_cast<int>(obs_body.size());

  std::vector<Vec2> ve(ne), vo(nu), ue(ne), uo(nu), vo_rate(nu);
  for (int e = 0; e < ne; ++e) {
    ve[e] = sigma + R * ego_body[e];
    ue[e] = (b * (ego_body[(e + 1) % ne] - ego_body[e])).normalized();
  }
  for (int o = 0; o < nu; ++o) {
    vo[o] = pose.position + pose.rotation * obs_body[o];
    vo_rate[o] = pose.velocity + pose.rotation_rate * obs_body[o];
    uo[o] = (b * (obs_body[(o + 1) % nu] - obs_body[o])).normalized();
  }

  Eigen::VectorXd inner(ne + nu);
  std::vector<Eigen::VectorXd> inner_w(ne + nu);
  Eigen::VectorXd terms;
  for (int e = 0; e < ne; ++e) {
    const Vec2 h = R * ue[e];
    terms.resize(nu);
    for (int o = 0; o < nu; ++o) terms(o) = h.dot(vo[o] - ve[e]);
    LseResult r = lse(terms, cfg.alpha_min);
    inner(e) = r.value;
    inner_w[e] = std::move(r.weights);
  }
  for (int o = 0; o < nu; ++o) {
    const Vec2 g = pose.rotation * uo[o];
    terms.resize(ne);
    for (int e = 0; e < ne; ++e) terms(e) = g.dot(ve[e] - vo[o]);
    LseResult r = lse(terms, cfg.alpha_min);
    inner(ne + o) = r.value;
    inner_w[ne + o] = std::move(r.weights);
  }
  const LseResult outer = lse(inner, cfg.alpha_max);

  SmoothDistance out;
  out.value = outer.value - std::log(static_cast<double>(ne + nu)) / cfg.alpha_max;

  // a_{e,o} = (R u_e)^T (v_o - sigma) - u_e^T l_e, the last term constant.
  for (int e = 0; e < ne; ++e) {
    const double pe = outer.weights(e);
    if (pe == 0.0) continue;
    const Vec2 h = R * ue[e];
    const Mat2 Fu = rotationJacobianT(ue[e], d_sigma, eta);
    for (int o = 0; o < nu; ++o) {
      const double w = pe * inner_w[e](o);
      if (w == 0.0) continue;
      out.d_sigma -= w * h;
      out.d_dsigma += w * (Fu * (vo[o] - sigma));
      out.d_stamp += w * h.dot(vo_rate[o]);
    }
  }
  // b_{o,e} = (R_u u_o)^T (sigma + R l_e - w) - u_o^T l_o.
  for (int o = 0; o < nu; ++o) {
    const double po = outer.weights(ne + o);
    if (po == 0.0) continue;
    const Vec2 g = pose.rotation * uo[o];
    const Vec2 g_rate = pose.rotation_rate * uo[o];
    for (int e = 0; e < ne; ++e) {
      const double w = po * inner_w[ne + o](e);
      if (w == 0.0) continue;
      out.d_sigma += w * g;
      out.d_dsigma += w * (rotationJacobianT(ego_body[e], d_sigma, eta) * g);
      out.d_stamp += w * (g_rate.dot(ve[e] - pose.position) - g.dot(pose.velocity));
    }
  }
  return out;
}

double smoothDistanceLowerBound(const Vec2& sigma, const Vec2& d_sigma, Direction eta, const Polygon& ego_body,
                                const Polygon& obs_body, const ObstaclePose& pose, const SmoothDistanceConfig& cfg) {
  Vec2 c_body = Vec2::Zero();
  for (const Vec2& v : obs_body) c_body += v;
  c_body /= static_cast<double>(obs_body.size());
  double r = 0.0;
  for (const Vec2& v : obs_body) r = std::max(r, (v - c_body).norm());
  const Vec2 c = pose.position + pose.rotation * c_body;

  // inner_e >= min_o h_e.(v_o - v_e) - log(nu)/|alpha_min| >= h_e.(c - v_e) - r - ...
  const Mat2 R = rotationFromFlat(d_sigma, eta);
  const Mat2 b = auxB();
  const std::size_t ne = ego_body.size(), nu = obs_body.size();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < ne; ++e) {
    const Vec2 h = R * (b * (ego_body[(e + 1) % ne] - ego_body[e])).normalized();
    best = std::max(best, h.dot(c - sigma - R * ego_body[e]));
  }
  return best - r - std::log(static_cast<double>(nu)) / std::abs(cfg.alpha_min) -
         std::log(static_cast<double>(ne + nu)) / cfg.alpha_max;
}

}  // namespace flatplan
