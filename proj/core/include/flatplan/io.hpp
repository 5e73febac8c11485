#pragma once

#include <string>
#include <vector>

#include "flatplan/corridor.hpp"
#include "flatplan/poly_traj.hpp"
#include "flatplan/scenario.hpp"

namespace flatplan {

// Number formatting used by every text artifact: 9 significant digits,
// shortest general form, '.' separator regardless of locale.
std::string formatNumber(double v);

// Samples at multiples of 1/rate_hz plus the final instant. Columns:
// t,x,y,theta,v,a_t,a_n,kappa,phi,segment,eta
std::string trajectoryCsv(const FlatTrajectory& traj, const VehicleGeometry& geom, double rate_hz = 20.0);

// Polynomial trajectory with the corridor and constraint density it was
// planned with, so that it can be audited later.
struct StoredTrajectory {
  FlatTrajectory trajectory;
  int lambda = 16;
  std::vector<HPolygon> cells;
};

std::string dumpTrajectory(const StoredTrajectory& t);
// Throws ParseError.
StoredTrajectory parseTrajectory(const std::string& text, const std::string& source = "<string>");

struct PlotLayers {
  const FlatTrajectory* trajectory = nullptr;
  const std::vector<HPolygon>* cells = nullptr;  // rows in cyclic edge order
  const std::vector<PathPose>* path = nullptr;
  int footprint_every = 10;  // draw a footprint every this many trajectory samples
};

std::string renderSvg(const Scenario& scenario, const PlotLayers& layers);

std::string readFile(const std::string& path);
void writeFile(const std::string& path, const std::string& content);

}  // namespace flatplan
