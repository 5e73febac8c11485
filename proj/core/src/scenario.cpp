#include "flatplan/scenario.hpp"

#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "flatplan/errors.hpp"

namespace flatplan {

using nlohmann::json;

Polygon RectangleObstacle::polygon() const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const Vec2 ax(c, s), ay(-s, c);
  const double hl = 0.5 * length, hw = 0.5 * width;
  return {center - hl * ax + hw * ay, center + hl * ax + hw * ay, center + hl * ax - hw * ay,
          center - hl * ax - hw * ay};
}

OccupancyGrid Scenario::buildGrid() const {
  const int w = static_cast<int>(std::ceil(map.size_x / map.resolution - 1e-9));
  const int h = static_cast<int>(std::ceil(map.size_y / map.resolution - 1e-9));
  OccupancyGrid grid(map.resolution, map.origin, w, h);
  for (const Polygon& p : map.polygons) grid.rasterize(p);
  for (const RectangleObstacle& r : map.rectangles) grid.rasterize(r.polygon());
  for (const auto& c : map.occupied) grid.setOccupied(c[0], c[1]);
  return grid;
}

std::vector<DynamicObstacle> Scenario::obstacles() const {
  std::vector<DynamicObstacle> out;
  for (const DynamicObstacleSpec& d : dynamic_obstacles) out.push_back({d.body, d.trajectory});
  return out;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& rule) {
  throw ValidationError(field + ": " + rule);
}

void requirePositive(double v, const std::string& field) {
  if (!(v > 0.0) || !std::isfinite(v)) invalid(field, "must be a positive number");
}

void requireFinite(double v, const std::string& field) {
  if (!std::isfinite(v)) invalid(field, "must be finite");
}

bool clockwiseConvex(const Polygon& p) {
  const std::size_t n = p.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cross2(p[(i + 1) % n] - p[i], p[(i + 2) % n] - p[(i + 1) % n]) < -1e-12)) return false;
  }
  return true;
}

// Clockwise copy of a convex polygon given in either orientation.
Polygon normalizeConvex(Polygon p, const std::string& field) {
  if (clockwiseConvex(p)) return p;
  std::reverse(p.begin(), p.end());
  if (clockwiseConvex(p)) return p;
  invalid(field, "obstacle polygon must be convex with at least 3 distinct vertices");
}

// Object reader that records the path of each field and rejects unknown keys.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_ + ": expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ValidationError(field(k) + ": unknown field");
    }
  }

  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }

  const json* get(const std::string& k) {
    used_.insert(k);
    auto it = j_.find(k);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& k, double& out) {
    if (const json* v = get(k)) {
      if (!v->is_number()) throw ParseError(field(k) + ": expected a number");
      out = v->get<double>();
    }
  }
  void integer(const std::string& k, int& out) {
    if (const json* v = get(k)) {
      if (!v->is_number_integer()) throw ParseError(field(k) + ": expected an integer");
      out = v->get<int>();
    }
  }
  void count(const std::string& k, std::size_t& out) {
    if (const json* v = get(k)) {
      if (!v->is_number_unsigned()) throw ParseError(field(k) + ": expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void text(const std::string& k, std::string& out) {
    if (const json* v = get(k)) {
      if (!v->is_string()) throw ParseError(field(k) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void point(const std::string& k, Vec2& out) {
    if (const json* v = get(k)) out = toPoint(*v, field(k));
  }

  static Vec2 toPoint(const json& v, const std::string& f) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ParseError(f + ": expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
  }
  static Polygon toPolygon(const json& v, const std::string& f) {
    if (!v.is_array()) throw ParseError(f + ": expected a list of [x, y] vertices");
    Polygon p;
    for (std::size_t i = 0; i < v.size(); ++i) p.push_back(toPoint(v[i], f + "[" + std::to_string(i) + "]"));
    return p;
  }
  static Eigen::VectorXd toCoeffs(const json& v, const std::string& f) {
    if (!v.is_array() || v.empty()) throw ParseError(f + ": expected a non-empty list of coefficients");
    Eigen::VectorXd c(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ParseError(f + ": expected numbers");
      c(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return c;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

const json& requireArray(const json* v, const std::string& f) {
  if (!v->is_array()) throw ParseError(f + ": expected a list");
  return *v;
}

StateSpec readState(const json& j, const std::string& path) {
  Reader r(j, path);
  StateSpec s;
  if (!r.has("x") || !r.has("y") || !r.has("theta")) invalid(path, "x, y and theta are required");
  r.number("x", s.pose.x);
  r.number("y", s.pose.y);
  r.number("theta", s.pose.theta);
  r.number("v", s.v);
  r.number("a", s.a);
  return s;
}

VehicleGeometry readVehicle(const json& j) {
  Reader r(j, "vehicle");
  VehicleGeometry g;
  double wheelbase = 2.8, inflation = 0.0;
  r.number("wheelbase", wheelbase);
  r.number("inflation", inflation);
  if (const json* v = r.get("vertices")) {
    g.body_vertices = normalizeConvex(Reader::toPolygon(*v, "vehicle.vertices"), "vehicle.vertices");
    r.get("length");
    r.get("width");
    r.get("rear_overhang");
    if (r.has("length") || r.has("width") || r.has("rear_overhang"))
      invalid("vehicle", "give either vertices or length/width/rear_overhang");
  } else {
    double length = 4.6, width = 1.9, rear = 1.0;
    r.number("length", length);
    r.number("width", width);
    r.number("rear_overhang", rear);
    requirePositive(length, "vehicle.length");
    requirePositive(width, "vehicle.width");
    g = VehicleGeometry::box(length, width, rear, 1.0);
  }
  g.wheelbase = wheelbase;
  g.inflation = inflation;
  return g;
}

MapSpec readMap(const json& j) {
  Reader r(j, "map");
  MapSpec m;
  r.number("resolution", m.resolution);
  r.point("origin", m.origin);
  Vec2 size(m.size_x, m.size_y);
  r.point("size", size);
  m.size_x = size.x();
  m.size_y = size.y();
  if (const json* v = r.get("polygons")) {
    const json& a = requireArray(v, "map.polygons");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string f = "map.polygons[" + std::to_string(i) + "]";
      m.polygons.push_back(normalizeConvex(Reader::toPolygon(a[i], f), f));
    }
  }
  if (const json* v = r.get("rectangles")) {
    const json& a = requireArray(v, "map.rectangles");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string f = "map.rectangles[" + std::to_string(i) + "]";
      Reader rr(a[i], f);
      RectangleObstacle o;
      rr.point("center", o.center);
      rr.number("length", o.length);
      rr.number("width", o.width);
      rr.number("yaw", o.yaw);
      requirePositive(o.length, f + ".length");
      requirePositive(o.width, f + ".width");
      m.rectangles.push_back(o);
    }
  }
  if (const json* v = r.get("occupied")) {
    const json& a = requireArray(v, "map.occupied");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const json& c = a[i];
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer())
        throw ParseError("map.occupied[" + std::to_string(i) + "]: expected [ix, iy]");
      m.occupied.push_back({c[0].get<int>(), c[1].get<int>()});
    }
  }
  return m;
}

DynamicObstacleSpec readDynamic(const json& j, const std::string& path) {
  Reader r(j, path);
  DynamicObstacleSpec d;
  if (const json* v = r.get("vertices")) {
    d.body = normalizeConvex(Reader::toPolygon(*v, path + ".vertices"), path + ".vertices");
    r.get("length");
    r.get("width");
    if (r.has("length") || r.has("width")) invalid(path, "give either vertices or length/width");
  } else {
    double length = 4.0, width = 2.0;
    r.number("length", length);
    r.number("width", width);
    requirePositive(length, path + ".length");
    requirePositive(width, path + ".width");
    d.body = RectangleObstacle{Vec2::Zero(), length, width, 0.0}.polygon();
  }
  double t = 0.0;
  r.number("start_time", t);
  const json* pv = r.get("pieces");
  if (!pv) invalid(path + ".pieces", "at least one trajectory piece is required");
  const json& pieces = requireArray(pv, path + ".pieces");
  if (pieces.empty()) invalid(path + ".pieces", "at least one trajectory piece is required");
  std::vector<PosePiece> out;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const std::string f = path + ".pieces[" + std::to_string(i) + "]";
    Reader pr(pieces[i], f);
    double duration = 0.0;
    pr.number("duration", duration);
    requirePositive(duration, f + ".duration");
    PosePiece p;
    p.t0 = t;
    p.t1 = t + duration;
    for (const char* k : {"x", "y", "heading"}) {
      const json* c = pr.get(k);
      if (!c) invalid(f + "." + k, "coefficients are required");
      Eigen::VectorXd coeffs = Reader::toCoeffs(*c, f + "." + k);
      if (k[0] == 'x') p.x = coeffs;
      else if (k[0] == 'y') p.y = coeffs;
      else p.heading = coeffs;
    }
    out.push_back(std::move(p));
    t += duration;
  }
  d.trajectory = ObstacleTrajectory(std::move(out));
  return d;
}

void readFrontend(const json& j, FrontendConfig& f) {
  Reader r(j, "frontend");
  r.number("xy_resolution", f.search.xy_resolution);
  r.integer("heading_bins", f.search.heading_bins);
  r.number("arc_length", f.search.arc_length);
  r.number("forward_cost", f.search.forward_cost);
  r.number("backward_cost", f.search.backward_cost);
  r.number("switch_cost", f.search.switch_cost);
  r.count("max_expansions", f.search.max_expansions);
  r.number("v_ref", f.segments.v_ref);
  r.integer("pieces", f.segments.pieces);
  r.number("piece_length", f.segments.piece_length);
  r.number("min_duration", f.segments.min_duration);
  r.number("merge_length", f.segments.merge_length);
  r.number("corridor_max_extent", f.corridor_max_extent);
}

void readConstraints(const json& j, ConstraintConfig& c, double wheelbase) {
  Reader r(j, "constraints");
  r.number("v_m", c.v_max);
  r.number("a_tm", c.a_t_max);
  r.number("a_nm", c.a_n_max);
  if (r.has("kappa_m") && r.has("phi_m")) invalid("constraints", "give either kappa_m or phi_m");
  r.number("kappa_m", c.kappa_max);
  if (r.has("phi_m")) {
    double phi = 0.0;
    r.number("phi_m", phi);
    if (!(phi > 0.0 && phi < 1.5)) invalid("constraints.phi_m", "must lie in (0, 1.5) rad");
    c.kappa_max = std::tan(phi) / wheelbase;
  }
  r.number("d_m", c.d_safe);
  r.integer("lambda", c.lambda);
  r.number("w_T", c.w_T);
  r.number("alpha", c.alpha);
  if (const json* w = r.get("weights")) {
    Reader wr(*w, "constraints.weights");
    for (int k = 0; k < kNumConstraintClasses; ++k) wr.number(constraintClassName(static_cast<ConstraintClass>(k)), c.weights[k]);
  }
}

void readSolver(const json& j, SolverConfig& s) {
  Reader r(j, "solver");
  r.integer("memory", s.lbfgs.memory);
  r.integer("max_iterations", s.lbfgs.max_iterations);
  r.number("g_tol", s.lbfgs.g_tol);
  r.number("c1", s.lbfgs.c1);
  r.number("c2", s.lbfgs.c2);
  r.integer("max_line_search", s.lbfgs.max_line_search);
  r.number("v_bar", s.v_bar);
}

std::string lineColumn(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json pointJson(const Vec2& p) { return json::array({p.x(), p.y()}); }

json polygonJson(const Polygon& poly) {
  json a = json::array();
  for (const Vec2& v : poly) a.push_back(pointJson(v));
  return a;
}

json coeffJson(const Eigen::VectorXd& c) { return json(std::vector<double>(c.data(), c.data() + c.size())); }

json stateJson(const StateSpec& s) {
  return {{"x", s.pose.x}, {"y", s.pose.y}, {"theta", s.pose.theta}, {"v", s.v}, {"a", s.a}};
}

}  // namespace

void Scenario::validate() const {
  requirePositive(map.resolution, "map.resolution");
  requirePositive(map.size_x, "map.size");
  requirePositive(map.size_y, "map.size");
  requireFinite(map.origin.x(), "map.origin");
  requireFinite(map.origin.y(), "map.origin");
  for (std::size_t i = 0; i < map.polygons.size(); ++i) {
    if (!clockwiseConvex(map.polygons[i]))
      invalid("map.polygons[" + std::to_string(i) + "]", "obstacle polygon must be convex");
  }
  vehicle.validate();
  for (const auto& [st, name] : {std::pair{&start, "start"}, std::pair{&goal, "goal"}}) {
    requireFinite(st->pose.x, std::string(name) + ".x");
    requireFinite(st->pose.y, std::string(name) + ".y");
    requireFinite(st->pose.theta, std::string(name) + ".theta");
    requireFinite(st->v, std::string(name) + ".v");
    requireFinite(st->a, std::string(name) + ".a");
    const Vec2 rel = st->pose.position() - map.origin;
    if (rel.x() < 0.0 || rel.y() < 0.0 || rel.x() > map.size_x || rel.y() > map.size_y)
      invalid(name, "pose lies outside the map");
  }
  for (std::size_t i = 0; i < dynamic_obstacles.size(); ++i) {
    if (!clockwiseConvex(dynamic_obstacles[i].body))
      invalid("dynamic_obstacles[" + std::to_string(i) + "]", "body must be convex");
  }
  const auto& s = frontend.search;
  requirePositive(s.xy_resolution, "frontend.xy_resolution");
  if (s.heading_bins < 8) invalid("frontend.heading_bins", "must be at least 8");
  if (!(s.forward_cost > 0.0)) invalid("frontend.forward_cost", "must be > 0");
  if (!(s.backward_cost > 0.0)) invalid("frontend.backward_cost", "must be > 0");
  if (!(s.switch_cost >= 0.0)) invalid("frontend.switch_cost", "must be >= 0");
  if (s.max_expansions == 0) invalid("frontend.max_expansions", "must be > 0");
  requirePositive(frontend.segments.v_ref, "frontend.v_ref");
  requirePositive(frontend.segments.piece_length, "frontend.piece_length");
  requirePositive(frontend.segments.min_duration, "frontend.min_duration");
  if (!(frontend.segments.merge_length >= 0.0)) invalid("frontend.merge_length", "must be >= 0");
  requirePositive(frontend.corridor_max_extent, "frontend.corridor_max_extent");
  constraints.validate();
  const LbfgsConfig& l = solver.lbfgs;
  if (l.memory < 1) invalid("solver.memory", "must be >= 1");
  if (l.max_iterations < 0) invalid("solver.max_iterations", "must be >= 0");
  requirePositive(l.g_tol, "solver.g_tol");
  if (!(l.c1 > 0.0 && l.c1 < l.c2 && l.c2 < 1.0)) invalid("solver.c1", "line-search constants need 0 < c1 < c2 < 1");
  if (l.max_line_search < 1) invalid("solver.max_line_search", "must be >= 1");
  requirePositive(solver.v_bar, "solver.v_bar");
}

Scenario parseScenario(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ": " + lineColumn(text, e.byte > 0 ? e.byte - 1 : 0) + ": malformed scenario file");
  }
  Scenario s;
  {
    Reader r(j, "");
    r.text("name", s.name);
    const json* start = r.get("start");
    const json* goal = r.get("goal");
    if (!start) invalid("start", "start state is required");
    if (!goal) invalid("goal", "goal state is required");
    s.start = readState(*start, "start");
    s.goal = readState(*goal, "goal");
    if (const json* v = r.get("map")) s.map = readMap(*v);
    if (const json* v = r.get("vehicle")) s.vehicle = readVehicle(*v);
    if (const json* v = r.get("dynamic_obstacles")) {
      const json& a = requireArray(v, "dynamic_obstacles");
      for (std::size_t i = 0; i < a.size(); ++i)
        s.dynamic_obstacles.push_back(readDynamic(a[i], "dynamic_obstacles[" + std::to_string(i) + "]"));
    }
    if (const json* v = r.get("frontend")) readFrontend(*v, s.frontend);
    if (const json* v = r.get("constraints")) readConstraints(*v, s.constraints, s.vehicle.wheelbase);
    if (const json* v = r.get("solver")) readSolver(*v, s.solver);
  }
  s.validate();
  return s;
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open scenario file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parseScenario(ss.str(), path);
}

std::string dumpScenario(const Scenario& s) {
  json j;
  j["name"] = s.name;
  json map = {{"resolution", s.map.resolution}, {"origin", pointJson(s.map.origin)},
              {"size", json::array({s.map.size_x, s.map.size_y})}};
  map["polygons"] = json::array();
  for (const Polygon& p : s.map.polygons) map["polygons"].push_back(polygonJson(p));
  map["rectangles"] = json::array();
  for (const RectangleObstacle& r : s.map.rectangles) {
    map["rectangles"].push_back(
        {{"center", pointJson(r.center)}, {"length", r.length}, {"width", r.width}, {"yaw", r.yaw}});
  }
  map["occupied"] = json::array();
  for (const auto& c : s.map.occupied) map["occupied"].push_back(json::array({c[0], c[1]}));
  j["map"] = map;
  j["start"] = stateJson(s.start);
  j["goal"] = stateJson(s.goal);
  j["vehicle"] = {{"vertices", polygonJson(s.vehicle.body_vertices)},
                  {"wheelbase", s.vehicle.wheelbase},
                  {"inflation", s.vehicle.inflation}};
  j["dynamic_obstacles"] = json::array();
  for (const DynamicObstacleSpec& d : s.dynamic_obstacles) {
    json pieces = json::array();
    for (const PosePiece& p : d.trajectory.pieces()) {
      pieces.push_back({{"duration", p.t1 - p.t0},
                        {"x", coeffJson(p.x)},
                        {"y", coeffJson(p.y)},
                        {"heading", coeffJson(p.heading)}});
    }
    j["dynamic_obstacles"].push_back(
        {{"vertices", polygonJson(d.body)}, {"start_time", d.trajectory.start()}, {"pieces", pieces}});
  }
  const auto& f = s.frontend;
  j["frontend"] = {{"xy_resolution", f.search.xy_resolution},
                   {"heading_bins", f.search.heading_bins},
                   {"arc_length", f.search.arc_length},
                   {"forward_cost", f.search.forward_cost},
                   {"backward_cost", f.search.backward_cost},
                   {"switch_cost", f.search.switch_cost},
                   {"max_expansions", f.search.max_expansions},
                   {"v_ref", f.segments.v_ref},
                   {"pieces", f.segments.pieces},
                   {"piece_length", f.segments.piece_length},
                   {"min_duration", f.segments.min_duration},
                   {"merge_length", f.segments.merge_length},
                   {"corridor_max_extent", f.corridor_max_extent}};
  const auto& c = s.constraints;
  json weights;
  for (int k = 0; k < kNumConstraintClasses; ++k) weights[constraintClassName(static_cast<ConstraintClass>(k))] = c.weights[k];
  j["constraints"] = {{"v_m", c.v_max},     {"a_tm", c.a_t_max}, {"a_nm", c.a_n_max}, {"kappa_m", c.kappa_max},
                      {"d_m", c.d_safe},    {"lambda", c.lambda}, {"w_T", c.w_T},     {"alpha", c.alpha},
                      {"weights", weights}};
  const auto& l = s.solver.lbfgs;
  j["solver"] = {{"memory", l.memory}, {"max_iterations", l.max_iterations}, {"g_tol", l.g_tol}, {"c1", l.c1},
                 {"c2", l.c2},         {"max_line_search", l.max_line_search}, {"v_bar", s.solver.v_bar}};
  return j.dump(2) + "\n";
}

void saveScenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot write scenario file");
  out << dumpScenario(s);
}

}  // namespace flatplan
