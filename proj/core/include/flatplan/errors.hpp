#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flatplan {

// Base of every error raised by the library. `kind()` is a stable token
// used by the CLI's machine-readable error records.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define FLATPLAN_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    using Error::Error;                                               \
    const char* kind() const noexcept override { return #Name; }      \
  }

FLATPLAN_DEFINE_ERROR(SpeedSingularity);
FLATPLAN_DEFINE_ERROR(OutOfRange);
FLATPLAN_DEFINE_ERROR(SingularSystem);
FLATPLAN_DEFINE_ERROR(DegenerateEdge);
FLATPLAN_DEFINE_ERROR(InvalidPolygon);
FLATPLAN_DEFINE_ERROR(StampOutOfHorizon);
FLATPLAN_DEFINE_ERROR(NoPathFound);
FLATPLAN_DEFINE_ERROR(ParseError);
FLATPLAN_DEFINE_ERROR(ValidationError);

#undef FLATPLAN_DEFINE_ERROR

class SeedInCollision : public Error {
 public:
  SeedInCollision(std::size_t seed_index, const std::string& what)
      : Error(what), seed_index_(seed_index) {}
  const char* kind() const noexcept override { return "SeedInCollision"; }
  std::size_t seedIndex() const noexcept { return seed_index_; }

 private:
  std::size_t seed_index_;
};

// Raised when no step satisfying the line-search conditions is found. Carries
// the best iterate seen so far.
class LineSearchFailure : public Error {
 public:
  LineSearchFailure(std::vector<double> best_x, double best_f, int iterations, const std::string& what)
      : Error(what), best_x_(std::move(best_x)), best_f_(best_f), iterations_(iterations) {}
  const char* kind() const noexcept override { return "LineSearchFailure"; }
  const std::vector<double>& bestX() const noexcept { return best_x_; }
  double bestValue() const noexcept { return best_f_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::vector<double> best_x_;
  double best_f_;
  int iterations_;
};

// Wraps a lower-level error with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, std::string inner_kind, const std::string& what)
      : Error(what), stage_(std::move(stage)), inner_kind_(std::move(inner_kind)) {}
  const char* kind() const noexcept override { return inner_kind_.c_str(); }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
  std::string inner_kind_;
};

}  // namespace flatplan
