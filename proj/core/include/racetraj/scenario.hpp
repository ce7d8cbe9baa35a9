#pragma once

#include "racetraj/planner.hpp"
#include "racetraj/world.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace racetraj {

inline constexpr const char* kScenarioSchema = "racetraj-scenario/v1";
inline constexpr const char* kPlanSchema = "racetraj-plan/v1";

/// Malformed scenario or plan document. The message starts with the JSON path.
class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A full course: world, boundary states and planner configuration.
struct Scenario {
  std::string name;
  std::string description;
  bool reconstruction = false;  // geometry rebuilt from qualitative figures
  double startTime = 0.0;
  Eigen::MatrixXd startState;           // 3 x s
  Eigen::MatrixXd terminalDerivatives;  // 3 x (s-1)
  World world;
  PlannerConfig config;

  int gateCount() const { return static_cast<int>(world.gates.size()); }
  void validate() const;
};

/// Every gate in one problem, starting from the scenario start state.
ProblemSetup fullSetup(const Scenario& scenario);

/// Gates [firstGate, firstGate + count) from an arbitrary state. The gap gate is
/// re-indexed into the horizon and dropped once it is behind the horizon start.
ProblemSetup horizonSetup(const Scenario& scenario, double startTime, const Eigen::MatrixXd& state,
                          int firstGate, int count);

Scenario parseScenario(const std::string& text);
Scenario loadScenario(const std::filesystem::path& path);
std::string scenarioToJson(const Scenario& scenario);

std::string planToJson(const PlanResult& plan);
/// Reads the trajectory part of a plan document.
SegmentedTrajectory parsePlanTrajectory(const std::string& text);

}  // namespace racetraj
