#pragma once

#include <stdexcept>
#include <string>

namespace racetraj {

// Thrown when a banded factorization meets a (numerically) zero pivot.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long pivot)
      : std::runtime_error(what), pivot_(pivot) {}
  long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

// Thrust vector vanishes: attitude is undefined at free fall.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Objective evaluation failed at a specific constraint point (segment, sample).
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, int segment, int sample)
      : std::runtime_error(what), segment_(segment), sample_(sample) {}
  int segment() const noexcept { return segment_; }
  int sample() const noexcept { return sample_; }

 private:
  int segment_;
  int sample_;
};

// Dimension or shape mismatch between cooperating objects.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace racetraj
