#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "flatplan/audit.hpp"
#include "flatplan/errors.hpp"
#include "flatplan/io.hpp"
#include "flatplan/planner.hpp"
#include "flatplan/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace flatplan::cli {

namespace {

// Boundary mismatch allowed by `check`, meters and m/s.
constexpr double kBoundaryTol = 1e-6;

json auditJson(const AuditReport& a) {
  json classes = json::object();
  for (int c = 0; c < kNumAuditClasses; ++c) {
    const ClassAudit& ca = a.classes[c];
    if (!ca.present) continue;
    classes[auditClassName(static_cast<AuditClass>(c))] = {
        {"max_violation", ca.max_violation}, {"worst_time", ca.worst_time}, {"samples", ca.samples}};
  }
  json j = {{"samples", a.samples}, {"singular_samples", a.singular_samples}, {"classes", classes}};
  if (std::isfinite(a.min_dynamic_distance)) {
    j["min_dynamic_distance"] = a.min_dynamic_distance;
    j["min_dynamic_time"] = a.min_dynamic_time;
  }
  return j;
}

AuditReport audit(const Scenario& sc, const FlatTrajectory& traj, const std::vector<HPolygon>& cells,
                  const OccupancyGrid& grid, const std::vector<DynamicObstacle>& obstacles, int oversample) {
  AuditInput in;
  in.trajectory = &traj;
  in.constraints = &sc.constraints;
  in.footprint = sc.vehicle.footprint();
  in.grid = &grid;
  in.cells = &cells;
  in.obstacles = &obstacles;
  return checkTrajectory(in, oversample);
}

std::string traceCsv(const std::vector<double>& trace) {
  std::string out = "iteration,objective\n";
  for (std::size_t i = 0; i < trace.size(); ++i) out += std::to_string(i) + "," + formatNumber(trace[i]) + "\n";
  return out;
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const std::size_t rank = static_cast<std::size_t>(std::ceil(q * v.size()));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

}  // namespace

int runPlan(const PlanOptions& o) {
  const Scenario sc = loadScenario(o.scenario);
  spdlog::info("planning '{}'", sc.name);
  const PlanResult r = plan(sc);
  spdlog::info("front end: {} expansions, {} segments; solver: {} iterations, {} ({:.3f} s)", r.search.expansions,
               r.trajectory.segments().size(), r.iterations, lbfgsStatusName(r.status), r.solve_time);
  for (std::size_t i = 0; i < r.trace.size(); ++i) spdlog::debug("iterate {} objective {}", i, r.trace[i]);
  if (r.status != LbfgsStatus::Converged)
    spdlog::warn("solver stopped with status {} at gradient norm {}", lbfgsStatusName(r.status), r.grad_norm);

  const OccupancyGrid grid = sc.buildGrid();
  const std::vector<DynamicObstacle> obstacles = sc.obstacles();
  const AuditReport rep = audit(sc, r.trajectory, r.corridor.cells, grid, obstacles, 10);
  const Metrics m = computeMetrics(r.trajectory, r.solve_time);

  fs::create_directories(o.out);
  const fs::path out(o.out);
  writeFile((out / "trajectory.csv").string(), trajectoryCsv(r.trajectory, sc.vehicle));
  writeFile((out / "trajectory.json").string(), dumpTrajectory({r.trajectory, sc.constraints.lambda, r.corridor.cells}));
  writeFile((out / "trace.csv").string(), traceCsv(r.trace));
  PlotLayers layers;
  layers.trajectory = &r.trajectory;
  layers.cells = &r.corridor.cells;
  layers.path = &r.search.path;
  writeFile((out / "plot.svg").string(), renderSvg(sc, layers));

  json mj = {{"scenario", sc.name},
             {"seed", o.seed},
             {"status", lbfgsStatusName(r.status)},
             {"iterations", r.iterations},
             {"evaluations", r.evaluations},
             {"grad_norm", r.grad_norm},
             {"segments", r.trajectory.segments().size()},
             {"expansions", r.search.expansions},
             {"objective",
              {{"effort", r.objective.effort},
               {"time", r.objective.time},
               {"penalty", r.objective.penalty},
               {"total", r.objective.total}}},
             {"metrics",
              {{"mean_acceleration", m.mean_acceleration},
               {"mean_jerk", m.mean_jerk},
               {"duration", m.duration},
               {"length", m.length},
               {"solve_time", m.solve_time},
               {"wall_time", r.wall_time}}},
             {"audit", auditJson(rep)}};
  writeFile((out / "metrics.json").string(), mj.dump(2) + "\n");
  std::cout << sc.name << ": " << lbfgsStatusName(r.status) << " in " << r.iterations << " iterations, duration "
            << formatNumber(m.duration) << " s, length " << formatNumber(m.length) << " m, max violation "
            << formatNumber(rep.maxViolation()) << "\n";
  return 0;
}

int runCheck(const CheckOptions& o) {
  const Scenario sc = loadScenario(o.scenario);
  const StoredTrajectory st = parseTrajectory(readFile(o.trajectory), o.trajectory);
  if (st.lambda != sc.constraints.lambda)
    throw ValidationError("trajectory was planned with lambda " + std::to_string(st.lambda) +
                          " but the scenario uses " + std::to_string(sc.constraints.lambda));
  const OccupancyGrid grid = sc.buildGrid();
  const std::vector<DynamicObstacle> obstacles = sc.obstacles();
  const AuditReport rep = audit(sc, st.trajectory, st.cells, grid, obstacles, o.oversample);

  const FlatTrajectory& tr = st.trajectory;
  const double T = tr.totalDuration();
  const BoundaryState b0 = boundaryFromState(sc.start, tr.segments().front().eta, sc.solver.v_bar);
  const BoundaryState b1 = boundaryFromState(sc.goal, tr.segments().back().eta, sc.solver.v_bar);
  double boundary = 0.0;
  for (int d = 0; d < 3; ++d) {
    boundary = std::max(boundary, (tr.eval(0.0, d) - b0[d]).lpNorm<Eigen::Infinity>());
    boundary = std::max(boundary, (tr.eval(T, d) - b1[d]).lpNorm<Eigen::Infinity>());
  }

  json j = auditJson(rep);
  j["boundary_error"] = boundary;
  const bool ok = rep.maxViolation() <= o.tolerance && boundary <= kBoundaryTol;
  j["ok"] = ok;
  std::cout << j.dump(2) << "\n";
  return ok ? 0 : 1;
}

int runPlot(const PlotOptions& o) {
  const Scenario sc = loadScenario(o.scenario);
  PlotLayers layers;
  StoredTrajectory st;
  if (!o.trajectory.empty()) {
    st = parseTrajectory(readFile(o.trajectory), o.trajectory);
    layers.trajectory = &st.trajectory;
    layers.cells = &st.cells;
  }
  writeFile(o.out, renderSvg(sc, layers));
  return 0;
}

int runBench(const BenchOptions& o) {
  std::vector<std::string> files;
  if (fs::is_directory(o.scenarios)) {
    for (const auto& e : fs::directory_iterator(o.scenarios))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(o.scenarios);
  }
  if (files.empty()) throw ValidationError(o.scenarios + ": no scenario files found");

  struct Row {
    std::string name;
    std::string error;
    std::vector<double> solve, wall;
    int iterations = 0;
    std::string status;
    double grad_norm = 0.0;
    Metrics metrics;
    double violation = 0.0;
  };
  std::vector<Row> rows(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < files.size(); i = next++) {
      Row& row = rows[i];
      row.name = fs::path(files[i]).stem().string();
      try {
        const Scenario sc = loadScenario(files[i]);
        row.name = sc.name;
        PlanResult r;
        for (int k = 0; k < o.repeats; ++k) {
          r = plan(sc);
          row.solve.push_back(r.solve_time);
          row.wall.push_back(r.wall_time);
        }
        row.iterations = r.iterations;
        row.status = lbfgsStatusName(r.status);
        row.grad_norm = r.grad_norm;
        row.metrics = computeMetrics(r.trajectory, r.solve_time);
        const OccupancyGrid grid = sc.buildGrid();
        row.violation = audit(sc, r.trajectory, r.corridor.cells, grid, sc.obstacles(), 10).maxViolation();
      } catch (const Error& e) {
        row.error = e.kind();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(o.threads, static_cast<int>(files.size())); ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  std::ostringstream table;
  table << "scenario,status,iterations,grad_norm,solve_p50,solve_p90,solve_min,solve_max,wall_p50,duration,length,"
           "mean_acc,mean_jerk,max_violation\n";
  bool failed = false;
  for (const Row& r : rows) {
    if (!r.error.empty()) {
      failed = true;
      table << r.name << ",error:" << r.error << ",,,,,,,,,,,,\n";
      continue;
    }
    table << r.name << ',' << r.status << ',' << r.iterations << ',' << formatNumber(r.grad_norm) << ','
          << formatNumber(percentile(r.solve, 0.5)) << ',' << formatNumber(percentile(r.solve, 0.9)) << ','
          << formatNumber(*std::min_element(r.solve.begin(), r.solve.end())) << ','
          << formatNumber(*std::max_element(r.solve.begin(), r.solve.end())) << ','
          << formatNumber(percentile(r.wall, 0.5)) << ',' << formatNumber(r.metrics.duration) << ','
          << formatNumber(r.metrics.length) << ',' << formatNumber(r.metrics.mean_acceleration) << ','
          << formatNumber(r.metrics.mean_jerk) << ',' << formatNumber(r.violation) << '\n';
  }
  std::cout << table.str();
  if (!o.out.empty()) writeFile(o.out, table.str());
  return failed ? 1 : 0;
}

}  // namespace flatplan::cli
