#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "flatplan/errors.hpp"

namespace {

void configureLogging() {
  spdlog::set_default_logger(spdlog::default_logger()->clone("flatplan"));
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("FLATPLAN_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
}

int errorRecord(const std::string& kind, const std::string& stage, const std::string& message) {
  nlohmann::json j = {{"error", kind}, {"message", message}};
  if (!stage.empty()) j["stage"] = stage;
  std::cerr << j.dump() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace flatplan::cli;
  configureLogging();

  CLI::App app{"Trajectory planner for car-like vehicles"};
  app.require_subcommand(1);

  PlanOptions plan;
  auto* p = app.add_subcommand("plan", "Plan a trajectory for a scenario");
  p->add_option("--scenario", plan.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  p->add_option("--out", plan.out, "Output directory")->required();
  p->add_option("--seed", plan.seed, "Recorded in the metrics; planning is deterministic");

  CheckOptions check;
  auto* c = app.add_subcommand("check", "Audit a stored trajectory against a scenario");
  c->add_option("--scenario", check.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  c->add_option("--trajectory", check.trajectory, "trajectory.json written by plan")->required()->check(CLI::ExistingFile);
  c->add_option("--oversample", check.oversample, "Samples per constraint interval")->check(CLI::PositiveNumber);
  c->add_option("--tolerance", check.tolerance, "Allowed violation in native units");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Plan every scenario in a directory repeatedly");
  b->add_option("--scenario", bench.scenarios, "Scenario directory or file")->required()->check(CLI::ExistingPath);
  b->add_option("--out", bench.out, "Write the table to this file as well");
  b->add_option("--repeats", bench.repeats, "Solves per scenario")->check(CLI::PositiveNumber);
  b->add_option("--threads", bench.threads, "Scenarios planned concurrently")->check(CLI::PositiveNumber);

  GradCheckOptions grad;
  auto* g = app.add_subcommand("grad-check", "Compare analytic gradients with central differences");
  g->add_option("--scenario", grad.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  g->add_option("--seed", grad.seed, "Random seed for perturbations");
  g->add_option("--instances", grad.instances, "Instances per class")->check(CLI::PositiveNumber);
  g->add_option("--tolerance", grad.tolerance, "Maximum relative error");

  PlotOptions plot;
  auto* v = app.add_subcommand("plot", "Render a scenario and optionally a trajectory to SVG");
  v->add_option("--scenario", plot.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  v->add_option("--trajectory", plot.trajectory, "trajectory.json written by plan")->check(CLI::ExistingFile);
  v->add_option("--out", plot.out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return errorRecord("UsageError", "", e.what());
  }

  try {
    if (p->parsed()) return runPlan(plan);
    if (c->parsed()) return runCheck(check);
    if (b->parsed()) return runBench(bench);
    if (g->parsed()) return runGradCheck(grad);
    if (v->parsed()) return runPlot(plot);
  } catch (const flatplan::StageError& e) {
    return errorRecord(e.kind(), e.stage(), e.what());
  } catch (const flatplan::Error& e) {
    return errorRecord(e.kind(), "", e.what());
  } catch (const std::exception& e) {
    return errorRecord("InternalError", "", e.what());
  }
  return 2;
}
