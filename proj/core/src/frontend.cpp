#include "flatplan/frontend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "flatplan/errors.hpp"

namespace flatplan {

namespace {

constexpr double kPi = std::numbers::pi;

struct Node {
  Pose2 pose;
  double g = 0.0;
  int parent = -1;
  Direction dir = Direction::Forward;
  double kappa = 0.0;
};

struct OpenEntry {
  double f;
  std::uint64_t seq;
  int node;
};

struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    return a.seq > b.seq;
  }
};

// Substeps of one primitive, excluding the start pose.
std::vector<Pose2> primitivePoses(const Pose2& from, double kappa, double signed_len, double max_step) {
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(signed_len) / max_step - 1e-9)));
  std::vector<Pose2> out;
  out.reserve(n);
  for (int m = 1; m <= n; ++m) out.push_back(advanceArc(from, kappa, signed_len * m / n));
  return out;
}

}  // namespace

Pose2 advanceArc(const Pose2& p, double kappa, double s) {
  if (std::abs(kappa) < 1e-12) {
    return {p.x + s * std::cos(p.theta), p.y + s * std::sin(p.theta), p.theta};
  }
  const double th = p.theta + kappa * s;
  return {p.x + (std::sin(th) - std::sin(p.theta)) / kappa, p.y - (std::cos(th) - std::cos(p.theta)) / kappa,
          wrapAngle(th)};
}

std::optional<std::vector<PathPose>> reedsSheppShot(const CollisionChecker& checker, const Pose2& from,
                                                    const Pose2& to, double kappa_max) {
  const RsPath rs = rsShortest(from, to, kappa_max);
  std::vector<PathPose> samples = rsSample(from, rs, kappa_max, checker.grid().resolution());
  // Blockages tend to sit near the goal, so test from that end first.
  for (std::size_t i = samples.size(); i-- > 1;) {
    if (checker.collides(samples[i].pose)) return std::nullopt;
  }
  return samples;
}

SearchResult hybridAStar(const OccupancyGrid& grid, const Pose2& start, const Pose2& goal,
                         const Polygon& footprint, double kappa_max, const HybridAStarParams& params) {
  const CollisionChecker checker(grid, footprint);
  if (checker.collides(start)) throw NoPathFound("start pose is in collision");
  if (checker.collides(goal)) throw NoPathFound("goal pose is in collision");

  const double res = params.xy_resolution;
  const int bins = params.heading_bins;
  const double arc = params.arc_length > 0.0 ? params.arc_length : 1.5 * res;
  const double check_step = grid.resolution();
  const auto nx = static_cast<std::int64_t>(std::ceil(grid.width() * grid.resolution() / res)) + 2;
  const auto ny = static_cast<std::int64_t>(std::ceil(grid.height() * grid.resolution() / res)) + 2;

  auto keyOf = [&](const Pose2& p, Direction d) {
    const auto ix = static_cast<std::int64_t>(std::floor((p.x - grid.origin().x()) / res)) + 1;
    const auto iy = static_cast<std::int64_t>(std::floor((p.y - grid.origin().y()) / res)) + 1;
    auto ith = static_cast<std::int64_t>(std::floor((wrapAngle(p.theta) + kPi) / (2.0 * kPi) * bins));
    ith = ((ith % bins) + bins) % bins;
    const std::int64_t gear = d == Direction::Forward ? 0 : 1;
    return ((std::clamp<std::int64_t>(ix, 0, nx - 1) * ny + std::clamp<std::int64_t>(iy, 0, ny - 1)) * bins + ith) *
               2 + gear;
  };
  auto heuristic = [&](const Pose2& p) {
    return std::max(rsShortest(p, goal, kappa_max).totalLength(), std::hypot(goal.x - p.x, goal.y - p.y));
  };

  std::vector<Node> nodes;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  std::unordered_map<std::int64_t, double> best_g;
  std::unordered_set<std::int64_t> closed;
  std::uint64_t seq = 0;

  nodes.push_back(Node{start, 0.0, -1, Direction::Forward, 0.0});
  open.push({heuristic(start), seq++, 0});
  bool root_open = true;

  SearchResult result;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    const Node cur = nodes[top.node];
    const bool is_root = top.node == 0;
    const std::int64_t key = keyOf(cur.pose, cur.dir);
    if (!is_root) {
      if (closed.count(key)) continue;
      closed.insert(key);
    } else {
      if (!root_open) continue;
      root_open = false;
    }
    if (++result.expansions > params.max_expansions) {
      throw NoPathFound("hybrid A* expansion budget exhausted after " + std::to_string(params.max_expansions) +
                        " expansions");
    }

    if (auto shot = reedsSheppShot(checker, cur.pose, goal, kappa_max)) {
      std::vector<int> chain;
      for (int n = top.node; n >= 0; n = nodes[n].parent) chain.push_back(n);
      std::reverse(chain.begin(), chain.end());
      std::vector<PathPose>& path = result.path;
      path.push_back(PathPose{start, Direction::Forward, 0.0});
      for (std::size_t c = 1; c < chain.size(); ++c) {
        const Node& n = nodes[chain[c]];
        const Node& par = nodes[n.parent];
        const double len = n.dir == Direction::Forward ? arc : -arc;
        for (const Pose2& p : primitivePoses(par.pose, n.kappa, len, check_step)) {
          path.push_back(PathPose{p, n.dir, n.kappa});
        }
      }
      for (std::size_t i = 1; i < shot->size(); ++i) path.push_back((*shot)[i]);
      if (path.size() > 1) {
        path[0].dir = path[1].dir;
        path[0].kappa = path[1].kappa;
      }
      result.analytic_hit = true;
      return result;
    }

    for (Direction gear : {Direction::Forward, Direction::Backward}) {
      const double unit_cost = gear == Direction::Forward ? params.forward_cost : params.backward_cost;
      for (double kappa : {kappa_max, 0.0, -kappa_max}) {
        const double len = gear == Direction::Forward ? arc : -arc;
        const std::vector<Pose2> steps = primitivePoses(cur.pose, kappa, len, check_step);
        bool free = true;
        for (const Pose2& p : steps) {
          if (checker.collides(p)) {
            free = false;
            break;
          }
        }
        if (!free) continue;
        const Pose2& end = steps.back();
        const std::int64_t k = keyOf(end, gear);
        if (closed.count(k)) continue;
        double g = cur.g + arc * unit_cost;
        if (!is_root && gear != cur.dir) g += params.switch_cost;
        auto it = best_g.find(k);
        if (it != best_g.end() && it->second <= g) continue;
        best_g[k] = g;
        nodes.push_back(Node{end, g, top.node, gear, kappa});
        open.push({g + heuristic(end), seq++, static_cast<int>(nodes.size() - 1)});
      }
    }
  }
  throw NoPathFound("hybrid A* open set exhausted after " + std::to_string(result.expansions) + " expansions");
}

double pathLength(const std::vector<PathPose>& path) {
  double s = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    s += std::hypot(path[i].pose.x - path[i - 1].pose.x, path[i].pose.y - path[i - 1].pose.y);
  }
  return s;
}

int directionSwitches(const std::vector<PathPose>& path) {
  int n = 0;
  for (std::size_t i = 2; i < path.size(); ++i) n += path[i].dir != path[i - 1].dir;
  return n;
}

Pose2 PlanSegment::poseAt(double s) const {
  if (poses.size() == 1 || s <= 0.0) return poses.front();
  if (s >= arc.back()) return poses.back();
  const auto it = std::upper_bound(arc.begin(), arc.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - arc.begin());
  const double span = arc[i] - arc[i - 1];
  const double w = span > 0.0 ? (s - arc[i - 1]) / span : 0.0;
  const Pose2& a = poses[i - 1];
  const Pose2& b = poses[i];
  return {a.x + w * (b.x - a.x), a.y + w * (b.y - a.y), wrapAngle(a.theta + w * wrapAngle(b.theta - a.theta))};
}

InitialPlan segmentPlan(const std::vector<PathPose>& path, const SegmentPlanParams& params) {
  struct Run {
    Direction eta;
    std::vector<Pose2> poses;
  };
  auto runLength = [](const Run& r) {
    double s = 0.0;
    for (std::size_t i = 1; i < r.poses.size(); ++i) {
      s += std::hypot(r.poses[i].x - r.poses[i - 1].x, r.poses[i].y - r.poses[i - 1].y);
    }
    return s;
  };

  std::vector<Run> runs;
  runs.push_back(Run{path.size() > 1 ? path[1].dir : path.front().dir, {path.front().pose}});
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (path[i].dir != runs.back().eta) runs.push_back(Run{path[i].dir, {runs.back().poses.back()}});
    runs.back().poses.push_back(path[i].pose);
  }

  // Drop degenerate runs into a neighbour, then fuse neighbours of equal gear.
  bool changed = true;
  while (changed && runs.size() > 1) {
    changed = false;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      if (runLength(runs[r]) >= params.merge_length) continue;
      if (r + 1 < runs.size()) {
        Run& next = runs[r + 1];
        next.poses.front() = runs[r].poses.front();
      } else {
        Run& prev = runs[r - 1];
        prev.poses.back() = runs[r].poses.back();
      }
      runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(r));
      changed = true;
      break;
    }
    for (std::size_t r = 1; r < runs.size();) {
      if (runs[r].eta == runs[r - 1].eta) {
        runs[r - 1].poses.insert(runs[r - 1].poses.end(), runs[r].poses.begin() + 1, runs[r].poses.end());
        runs.erase(runs.begin() + static_cast<std::ptrdiff_t>(r));
        changed = true;
      } else {
        ++r;
      }
    }
  }

  InitialPlan plan;
  for (Run& run : runs) {
    if (run.poses.size() < 2) run.poses.push_back(run.poses.back());
    PlanSegment seg;
    seg.eta = run.eta;
    seg.poses = std::move(run.poses);
    seg.arc.assign(seg.poses.size(), 0.0);
    for (std::size_t i = 1; i < seg.poses.size(); ++i) {
      seg.arc[i] = seg.arc[i - 1] + std::hypot(seg.poses[i].x - seg.poses[i - 1].x, seg.poses[i].y - seg.poses[i - 1].y);
    }
    const double len = seg.length();
    seg.pieces = params.pieces > 0 ? params.pieces
                                   : std::max(1, static_cast<int>(std::ceil(len / params.piece_length - 1e-9)));
    for (int i = 1; i < seg.pieces; ++i) seg.waypoints.push_back(seg.poseAt(len * i / seg.pieces).position());
    seg.duration = std::max(len / params.v_ref, params.min_duration);
    plan.segments.push_back(std::move(seg));
  }
  for (std::size_t i = 0; i + 1 < plan.segments.size(); ++i) {
    const Pose2& p = plan.segments[i].poses.back();
    plan.shift_positions.push_back(p.position());
    plan.shift_headings.push_back(p.theta);
  }
  return plan;
}

}  // namespace flatplan
