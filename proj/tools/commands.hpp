#pragma once

#include <cstdint>
#include <string>

namespace flatplan::cli {

struct PlanOptions {
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
};

struct CheckOptions {
  std::string scenario;
  std::string trajectory;
  int oversample = 10;
  double tolerance = 1e-2;
};

struct BenchOptions {
  std::string scenarios;  // directory of *.json files, or a single file
  std::string out;        // optional table path
  int repeats = 10;
  int threads = 1;
};

struct GradCheckOptions {
  std::string scenario;
  std::uint64_t seed = 0;
  int instances = 50;
  double tolerance = 1e-5;
};

struct PlotOptions {
  std::string scenario;
  std::string trajectory;  // optional
  std::string out;
};

// Each returns the process exit status.
int runPlan(const PlanOptions& o);
int runCheck(const CheckOptions& o);
int runBench(const BenchOptions& o);
int runGradCheck(const GradCheckOptions& o);
int runPlot(const PlotOptions& o);

}  // namespace flatplan::cli
