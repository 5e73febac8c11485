#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../common/instances.hpp"
#include "flatplan/errors.hpp"
#include "flatplan/io.hpp"

using namespace flatplan;
using namespace flatplan::testing;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Io, NumberFormat) {
  EXPECT_EQ(formatNumber(0.0), "0");
  EXPECT_EQ(formatNumber(1.5), "1.5");
  EXPECT_EQ(formatNumber(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(formatNumber(-2.0e-7), "-2e-07");
  EXPECT_EQ(formatNumber(123456789.4), "123456789");
}

TEST(Io, CsvLayout) {
  const BoundaryState a{Vec2(0, 0), Vec2(1, 0), Vec2::Zero()};
  const BoundaryState b{Vec2(3, 1), Vec2(1, 0), Vec2::Zero()};
  const FlatTrajectory tr({mincoSolve(a, b, {Vec2(1.5, 0.4)}, 3.03)});
  const std::string csv = trajectoryCsv(tr, VehicleGeometry::box(4.6, 1.9, 1.0, 2.8));
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  ASSERT_EQ(csv.back(), '\n');
  const auto ls = lines(csv);
  EXPECT_EQ(ls.front(), "t,x,y,theta,v,a_t,a_n,kappa,phi,segment,eta");
  // 0, 0.05, ..., 3.0 and the final instant
  ASSERT_EQ(ls.size(), 1u + 61u + 1u);
  EXPECT_EQ(ls[1].substr(0, 6), "0,0,0,");
  EXPECT_EQ(ls[2].substr(0, 5), "0.05,");
  EXPECT_EQ(ls.back().substr(0, 5), "3.03,");
  for (std::size_t i = 1; i < ls.size(); ++i) {
    EXPECT_EQ(std::count(ls[i].begin(), ls[i].end(), ','), 10) << ls[i];
    EXPECT_EQ(ls[i].substr(ls[i].size() - 4), ",0,1");
  }
  EXPECT_EQ(trajectoryCsv(tr, VehicleGeometry::box(4.6, 1.9, 1.0, 2.8)), csv);
}

TEST(Io, TrajectoryRoundTrip) {
  std::mt19937 rng(3);
  const Segment s0 = randomSegment(rng, Vec2(1, 2), 0.4, Direction::Forward, 3, 2.5);
  const Segment s1 = randomSegment(rng, s0.eval(s0.duration(), 0), 0.4, Direction::Backward, 2, 1.7);
  StoredTrajectory st;
  st.trajectory = FlatTrajectory({s0, s1});
  st.lambda = 4;
  st.cells = jitteredCells(rng, st.trajectory, st.lambda, testFootprint());
  const std::string text = dumpTrajectory(st);
  const StoredTrajectory back = parseTrajectory(text);
  EXPECT_EQ(back.lambda, 4);
  ASSERT_EQ(back.trajectory.segments().size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const Segment& a = st.trajectory.segments()[i];
    const Segment& b = back.trajectory.segments()[i];
    EXPECT_EQ(a.eta, b.eta);
    EXPECT_EQ(a.delta_T, b.delta_T);
    ASSERT_EQ(a.pieces.size(), b.pieces.size());
    for (std::size_t j = 0; j < a.pieces.size(); ++j) EXPECT_EQ(a.pieces[j], b.pieces[j]);
  }
  ASSERT_EQ(back.cells.size(), st.cells.size());
  for (std::size_t i = 0; i < st.cells.size(); ++i) {
    for (std::size_t r = 0; r < 4; ++r) {
      EXPECT_EQ(back.cells[i].rows[r].normal, st.cells[i].rows[r].normal);
      EXPECT_EQ(back.cells[i].rows[r].offset, st.cells[i].rows[r].offset);
    }
  }
  EXPECT_EQ(dumpTrajectory(back), text);
}

TEST(Io, MalformedTrajectoryRejected) {
  EXPECT_THROW(parseTrajectory("{\"lambda\": 4}"), ParseError);
  EXPECT_THROW(parseTrajectory("not json"), ParseError);
  EXPECT_THROW(parseTrajectory(R"({"lambda": 4, "cells": [], "segments": [
      {"eta": 2, "delta_T": 1, "pieces": [[[0,0,0,0,0,0],[0,0,0,0,0,0]]]}]})"),
               ParseError);
  EXPECT_THROW(parseTrajectory(R"({"lambda": 4, "cells": [], "segments": [
      {"eta": 1, "delta_T": 1, "pieces": [[[0,0,0,0,0],[0,0,0,0,0,0]]]}]})"),
               ParseError);
}
