#include "flatplan/io.hpp"

#include <Eigen/LU>
#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "flatplan/errors.hpp"
#include "flatplan/geometry.hpp"

namespace flatplan {

using nlohmann::json;

std::string formatNumber(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, r.ptr);
}

std::string trajectoryCsv(const FlatTrajectory& traj, const VehicleGeometry& geom, double rate_hz) {
  std::string out = "t,x,y,theta,v,a_t,a_n,kappa,phi,segment,eta\n";
  const double T = traj.totalDuration();
  const double h = 1.0 / rate_hz;
  std::vector<double> ts;
  const int n = static_cast<int>(std::floor(T / h + 1e-9));
  for (int k = 0; k <= n; ++k) ts.push_back(std::min(k * h, T));
  if (ts.back() < T - 1e-12) ts.push_back(T);
  double last_theta = 0.0;
  bool have_theta = false;
  for (double t : ts) {
    const TrajLocation loc = traj.locate(t);
    const Segment& seg = traj.segments()[loc.segment];
    const FlatPoint fp = traj.flatPoint(t);
    VehicleState st;
    st.position = fp.sigma;
    if (fp.d_sigma.norm() >= kEpsSpeed) {
      st = recoverState(fp, seg.eta, geom);
      last_theta = st.theta;
      have_theta = true;
    } else {
      st.theta = have_theta ? last_theta : 0.0;
    }
    const double cols[] = {t, st.position.x(), st.position.y(), st.theta, st.v, st.a_t, st.a_n, st.kappa, st.phi};
    for (double c : cols) {
      out += formatNumber(c);
      out += ',';
    }
    out += std::to_string(loc.segment);
    out += ',';
    out += std::to_string(static_cast<int>(seg.eta));
    out += '\n';
  }
  return out;
}

std::string dumpTrajectory(const StoredTrajectory& t) {
  json segs = json::array();
  for (const Segment& s : t.trajectory.segments()) {
    json pieces = json::array();
    for (const PieceCoeffs& c : s.pieces) {
      json cols = json::array();
      for (int d = 0; d < 2; ++d) {
        std::vector<double> col(kNumCoeffs);
        for (int r = 0; r < kNumCoeffs; ++r) col[r] = c(r, d);
        cols.push_back(col);
      }
      pieces.push_back(cols);
    }
    segs.push_back({{"eta", static_cast<int>(s.eta)}, {"delta_T", s.delta_T}, {"pieces", pieces}});
  }
  json cells = json::array();
  for (const HPolygon& cell : t.cells) {
    json rows = json::array();
    for (const HalfPlane& h : cell.rows) rows.push_back(json::array({h.normal.x(), h.normal.y(), h.offset}));
    cells.push_back(rows);
  }
  json j = {{"lambda", t.lambda}, {"segments", segs}, {"cells", cells}};
  return j.dump() + "\n";
}

StoredTrajectory parseTrajectory(const std::string& text, const std::string& source) {
  StoredTrajectory out;
  try {
    const json j = json::parse(text);
    out.lambda = j.at("lambda").get<int>();
    std::vector<Segment> segs;
    for (const json& s : j.at("segments")) {
      Segment seg;
      const int eta = s.at("eta").get<int>();
      if (eta != 1 && eta != -1) throw ParseError(source + ": segment eta must be 1 or -1");
      seg.eta = static_cast<Direction>(eta);
      seg.delta_T = s.at("delta_T").get<double>();
      if (!(seg.delta_T > 0.0)) throw ParseError(source + ": piece duration must be positive");
      for (const json& p : s.at("pieces")) {
        PieceCoeffs c;
        for (int d = 0; d < 2; ++d) {
          const auto col = p.at(d).get<std::vector<double>>();
          if (col.size() != static_cast<std::size_t>(kNumCoeffs)) throw ParseError(source + ": expected 6 coefficients");
          for (int r = 0; r < kNumCoeffs; ++r) c(r, d) = col[r];
        }
        seg.pieces.push_back(c);
      }
      if (seg.pieces.empty()) throw ParseError(source + ": segment without pieces");
      segs.push_back(std::move(seg));
    }
    if (segs.empty()) throw ParseError(source + ": trajectory without segments");
    out.trajectory = FlatTrajectory(std::move(segs));
    for (const json& cell : j.at("cells")) {
      HPolygon h;
      for (const json& r : cell) h.rows.push_back({Vec2(r.at(0).get<double>(), r.at(1).get<double>()), r.at(2).get<double>()});
      out.cells.push_back(std::move(h));
    }
  } catch (const json::exception& e) {
    throw ParseError(source + ": malformed trajectory file (" + e.what() + ")");
  }
  return out;
}

namespace {

class Svg {
 public:
  Svg(const MapSpec& m, double px_per_m) : m_(m), s_(px_per_m) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << formatNumber(m.size_x * s_) << "\" height=\""
         << formatNumber(m.size_y * s_) << "\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  std::string x(double v) const { return formatNumber((v - m_.origin.x()) * s_); }
  std::string y(double v) const { return formatNumber((m_.origin.y() + m_.size_y - v) * s_); }

  void polygon(const Polygon& p, const char* style) {
    out_ << "<polygon points=\"";
    for (const Vec2& v : p) out_ << x(v.x()) << ',' << y(v.y()) << ' ';
    out_ << "\" " << style << "/>\n";
  }
  void polyline(const std::vector<Vec2>& pts, const char* style) {
    if (pts.size() < 2) return;
    out_ << "<polyline fill=\"none\" points=\"";
    for (const Vec2& v : pts) out_ << x(v.x()) << ',' << y(v.y()) << ' ';
    out_ << "\" " << style << "/>\n";
  }
  void raw(const std::string& s) { out_ << s; }
  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  const MapSpec& m_;
  double s_;
  std::ostringstream out_;
};

}  // namespace

std::string renderSvg(const Scenario& sc, const PlotLayers& layers) {
  const double scale = std::max(4.0, std::min(20.0, 1200.0 / std::max(sc.map.size_x, sc.map.size_y)));
  Svg svg(sc.map, scale);

  // occupied cells, merged into horizontal runs
  const OccupancyGrid grid = sc.buildGrid();
  const double res = grid.resolution();
  for (int iy = 0; iy < grid.height(); ++iy) {
    for (int ix = 0; ix < grid.width();) {
      if (!grid.occupied(ix, iy)) {
        ++ix;
        continue;
      }
      int end = ix;
      while (end < grid.width() && grid.occupied(end, iy)) ++end;
      const Vec2 lo = grid.origin() + Vec2(ix * res, iy * res);
      const Vec2 hi = grid.origin() + Vec2(end * res, (iy + 1) * res);
      svg.polygon({lo, Vec2(lo.x(), hi.y()), hi, Vec2(hi.x(), lo.y())}, "fill=\"#555\"");
      ix = end;
    }
  }

  if (layers.cells) {
    for (const HPolygon& cell : *layers.cells) {
      Polygon corners;
      const std::size_t n = cell.rows.size();
      for (std::size_t i = 0; i < n; ++i) {
        const HalfPlane& a = cell.rows[i];
        const HalfPlane& b = cell.rows[(i + 1) % n];
        Mat2 A;
        A << a.normal.transpose(), b.normal.transpose();
        if (std::abs(A.determinant()) < 1e-12) continue;
        corners.push_back(A.inverse() * Vec2(a.offset, b.offset));
      }
      if (corners.size() < 3) continue;
      svg.polygon(corners,
                  "fill=\"#3a7bd5\" fill-opacity=\"0.03\" stroke=\"#3a7bd5\" stroke-opacity=\"0.15\" stroke-width=\"0.5\"");
    }
  }

  const double T = layers.trajectory ? layers.trajectory->totalDuration() : 10.0;
  for (const DynamicObstacleSpec& d : sc.dynamic_obstacles) {
    std::vector<Vec2> trace;
    const double t1 = std::max(T, 1.0);
    for (int k = 0; k <= 100; ++k) trace.push_back(d.trajectory.at(t1 * k / 100.0).position);
    svg.polyline(trace, "stroke=\"#d62728\" stroke-dasharray=\"4 3\" stroke-width=\"1\"");
    for (int k = 0; k <= 4; ++k) {
      const ObstaclePose p = d.trajectory.at(t1 * k / 4.0);
      svg.polygon(transformPolygon(d.body, p.rotation, p.position),
                  "fill=\"#d62728\" fill-opacity=\"0.15\" stroke=\"#d62728\" stroke-width=\"0.8\"");
    }
  }

  if (layers.path) {
    std::vector<Vec2> pts;
    for (const PathPose& p : *layers.path) pts.push_back(p.pose.position());
    svg.polyline(pts, "stroke=\"#999\" stroke-dasharray=\"3 3\" stroke-width=\"1\"");
  }

  if (layers.trajectory) {
    const FlatTrajectory& tr = *layers.trajectory;
    const Polygon fp = sc.vehicle.footprint();
    for (std::size_t si = 0; si < tr.segments().size(); ++si) {
      const Segment& seg = tr.segments()[si];
      const int n = std::max(20, 10 * seg.pieceCount());
      std::vector<Vec2> pts;
      for (int k = 0; k <= n; ++k) {
        const double t = seg.duration() * k / n;
        pts.push_back(seg.eval(t, 0));
        const Vec2 v = seg.eval(t, 1);
        if (layers.footprint_every > 0 && k % layers.footprint_every == 0 && v.norm() >= kEpsSpeed) {
          svg.polygon(transformPolygon(fp, rotationFromFlat(v, seg.eta), pts.back()),
                      "fill=\"none\" stroke=\"#2ca02c\" stroke-opacity=\"0.5\" stroke-width=\"0.6\"");
        }
      }
      svg.polyline(pts, seg.eta == Direction::Forward ? "stroke=\"#2ca02c\" stroke-width=\"2\""
                                                      : "stroke=\"#ff7f0e\" stroke-width=\"2\"");
    }
  }

  const Vec2 s = sc.start.pose.position(), g = sc.goal.pose.position();
  svg.raw("<circle cx=\"" + svg.x(s.x()) + "\" cy=\"" + svg.y(s.y()) + "\" r=\"4\" fill=\"#2ca02c\"/>\n");
  svg.raw("<circle cx=\"" + svg.x(g.x()) + "\" cy=\"" + svg.y(g.y()) + "\" r=\"4\" fill=\"#9467bd\"/>\n");
  return svg.finish();
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot open file for writing");
  out << content;
  if (!out) throw ValidationError(path + ": write failed");
}

}  // namespace flatplan
