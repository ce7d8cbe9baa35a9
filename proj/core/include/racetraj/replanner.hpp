#pragma once

#include "racetraj/planner.hpp"
#include "racetraj/scenario.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>

namespace racetraj {

/// Receding-horizon replanning over the next N gates. Single-writer: one call
/// in flight at a time.
class Replanner {
 public:
  explicit Replanner(Scenario scenario);

  /// Plans from `state` (3 x s) at time `now` through gates
  /// [nextGate, nextGate + N). A horizon that stops short of the last gate takes
  /// its terminal derivatives from the global plan. Warm-starts from the previous plan, falling back
  /// to the global trajectory. When the deadline passes, the previous plan is
  /// returned with `stale` set.
  PlanResult replanStep(double now, const Eigen::MatrixXd& state, int nextGate);

  const Scenario& scenario() const { return scenario_; }
  const SegmentedTrajectory& global() const { return global_; }
  const std::optional<PlanResult>& current() const { return current_; }
  int currentFirstGate() const { return currentFirstGate_; }
  void reset();
  void setDeadlineMs(double ms) { scenario_.config.deadlineMs = ms; }

 private:
  std::vector<double> warmArrivals(double now, int firstGate, int count) const;
  ReferencePath warmReference(double now, int firstGate, const std::vector<double>& arrivals,
                              const Eigen::MatrixXd& state) const;

  Scenario scenario_;
  std::shared_ptr<const UniformMincoCacheSet> caches_;
  SegmentedTrajectory global_;
  std::vector<double> globalArrivals_;
  std::optional<PlanResult> current_;
  int currentFirstGate_ = 0;
};

}  // namespace racetraj
