#pragma once

#include "racetraj/planner.hpp"
#include "racetraj/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace racetraj::experiments {

// ---- timing sweep -------------------------------------------------------

struct TimingOptions {
  std::vector<int> segments{2, 3, 4, 5};
  std::vector<int> pieces{2, 4, 6, 8, 10};
  int order = 3;
  int repetitions = 1000;
  std::uint32_t seed = 1;
};

struct TimingRow {
  int segments = 0;
  int pieces = 0;
  double uniformUs = 0.0;  // median solve + backprop over all segments
  double generalUs = 0.0;
  double reductionPct = 0.0;
  double maxCoeffDiff = 0.0;  // relative, uniform vs general on the same input
};

/// Median per-iteration cost of N segments of M pieces each, once through the
/// cached uniform mapping and once through an online-factorized general MINCO
/// with equal piece durations. Always runs single-threaded.
std::vector<TimingRow> runTimingSweep(const TimingOptions& options);

// ---- gate-constraint sweep ----------------------------------------------

struct GateSweepOptions {
  std::vector<double> rhos{1e3, 1e4, 1e5};
  std::vector<double> softWeights{0.0, 1e2, 1e3, 1e4};
  int threads = 1;
};

struct GateSweepRow {
  std::string method;  // "hard" or "soft"
  double rho = 0.0;
  double softWeight = 0.0;
  double meanGateDistance = 0.0;
  double maxGateDistance = 0.0;
  double flightTime = 0.0;
  int iterations = 0;
  std::string status;
  bool converged = false;
};

/// Full plans from the global seed for every (method, rho, lambda) cell.
std::vector<GateSweepRow> runGateSweep(const Scenario& scenario, const GateSweepOptions& options);

// ---- topology study -----------------------------------------------------

struct TopologyRow {
  std::string label;
  double executionTime = 0.0;
  double length = 0.0;
  bool feasible = false;
  bool selected = false;
  int iterations = 0;
  std::string status;
  PenaltyResiduals residuals;
};

struct TopologyStudy {
  std::vector<TopologyRow> rows;
  TopologyResult result;
};

/// Multi-topology plan around the scenario's first obstacle. Throws
/// PlanningError when no candidate is feasible.
TopologyStudy runTopologyStudy(const Scenario& scenario, int threads);

// ---- single plan --------------------------------------------------------

/// Global seed, then multi-topology around obstacle 0 when the world has
/// obstacles, otherwise one local optimization.
PlanResult planScenario(const Scenario& scenario, int threads = 0);

/// Every check of the feasibility audit against the nominal limits.
struct FeasibilityBounds {
  double thrust = 1e-3;    // m/s^2 outside [f_min, f_max]
  double bodyRate = 1e-3;  // rad/s above omega_max
  double gap = 1e-4;
  double obstacle = 1e-4;
};
bool withinBounds(const PenaltyResiduals& r, const FeasibilityBounds& b = {});

// ---- replanning simulation ----------------------------------------------

struct ReplanSimOptions {
  double rateHz = 20.0;
  double positionNoise = 0.0;  // m, per-axis standard deviation
  double velocityNoise = 0.0;  // m/s
  double commitWindow = 0.1;   // s; a gate counts as passed this close to its arrival
  double maxDuration = 30.0;   // s of simulated time
  std::uint32_t seed = 1;
};

struct ReplanSimRow {
  int step = 0;
  double time = 0.0;
  int nextGate = 0;
  double latencyMs = 0.0;
  int iterations = 0;
  std::string status;
  bool stale = false;
  double thrustResidual = 0.0;
  double bodyRateResidual = 0.0;
  double gapResidual = 0.0;
  double obstacleResidual = 0.0;
  int crossedGate = -1;           // gate passed during this step, or -1
  double crossingDistance = 0.0;  // ||sigma(t_n) - g_n(t_n)|| of the plan that flew it
};

struct ReplanSimResult {
  std::vector<ReplanSimRow> rows;
  bool finished = false;  // every gate passed within maxDuration
  int staleEvents = 0;
  double medianLatencyMs = 0.0;
};

/// Steps simulated time at a fixed rate, replanning from the state read off the
/// current plan plus optional Gaussian noise.
ReplanSimResult runReplanSim(const Scenario& scenario, const ReplanSimOptions& options);

// ---- gradient check -----------------------------------------------------

/// Two moving gates, drag on, tight limits, a gap and an obstacle near the path,
/// so every penalty family is active at the returned point.
struct GradientCase {
  ProblemSetup setup;
  Eigen::VectorXd point;
};
GradientCase randomGradientCase(std::uint32_t seed, GateMode mode = GateMode::Hard);

struct GradientCheck {
  double worstRelative = 0.0;  // over entries whose absolute error exceeds absTol
  bool allPenaltiesActive = false;
  bool agree = false;
};
GradientCheck checkGradient(GradientCase& gc, double relTol = 1e-4, double absTol = 1e-7);

// ---- output -------------------------------------------------------------

/// Creates the directory (and parents) or throws with the path.
void ensureDirectory(const std::filesystem::path& dir);

void writeTimingCsv(const std::filesystem::path& path, const std::vector<TimingRow>& rows);
void writeGateSweepCsv(const std::filesystem::path& path, const std::vector<GateSweepRow>& rows);
void writeTopologyCsv(const std::filesystem::path& path, const std::vector<TopologyRow>& rows);
void writeReplanSimCsv(const std::filesystem::path& path, const ReplanSimResult& result);
/// Samples position, velocity, acceleration, thrust and body rate.
void writeTrajectoryCsv(const std::filesystem::path& path, const SegmentedTrajectory& traj,
                        const DragModel& drag, double dt = 0.01);

/// Whitespace-separated data plus a gnuplot script that renders it to PNG.
void writeTimingPlot(const std::filesystem::path& dir, const std::vector<TimingRow>& rows);
void writeGateSweepPlot(const std::filesystem::path& dir, const std::vector<GateSweepRow>& rows);
void writeTopologyPlot(const std::filesystem::path& dir, const TopologyStudy& study);

double median(std::vector<double> values);

}  // namespace racetraj::experiments
