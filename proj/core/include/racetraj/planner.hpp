#pragma once

#include "racetraj/costs.hpp"
#include "racetraj/lbfgs.hpp"
#include "racetraj/minco_uniform.hpp"
#include "racetraj/polynomial.hpp"
#include "racetraj/world.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace racetraj {

enum class GateMode {
  Hard,  // junction positions pinned to the gate trajectory
  Soft,  // junction positions free, lambda_gate ||x_n - g_n(t_n)||^2 penalty
};

/// Limits used during optimization are tightened by these amounts; feasibility
/// is always judged against the untightened limits.
struct ConstraintMargins {
  double thrust = 0.0;    // m/s^2, applied to both f_min and f_max
  double bodyRate = 0.0;  // rad/s
  double gap = 0.0;       // subtracted from theta_tol
  double obstacle = 0.0;  // added to d_thr
};

struct PlannerConfig {
  int order = 3;
  std::vector<int> pieces{4};  // M_n; a single entry applies to every segment
  double rho = 1000.0;
  PenaltyConfig penalty;
  ConstraintMargins margins;
  LbfgsParams lbfgs;
  GateMode gateMode = GateMode::Hard;
  double softGateWeight = 0.0;
  double feasibilityTolerance = 1e-4;
  int horizon = 2;
  double deadlineMs = 50.0;
  double nominalSpeed = 5.0;
  double globalTotalTime = 0.0;  // <= 0: path length / nominal speed
  double topologyClearance = 0.5;
  int threads = 0;               // 0: one per candidate

  int piecesFor(int segment) const;
  PenaltyConfig effectivePenalty() const;
  void validate() const;
};

/// One optimization instance: the next N gates, boundary states and world.
struct ProblemSetup {
  double startTime = 0.0;
  Eigen::MatrixXd startState;           // 3 x s, derivatives 0..s-1
  Eigen::MatrixXd terminalDerivatives;  // 3 x (s-1), derivatives 1..s-1 at the last gate
  std::vector<Gate> gates;
  std::vector<EllipsoidObstacle> obstacles;
  std::optional<GapSpec> gap;  // gate index relative to `gates`
  PlannerConfig config;

  int segmentCount() const { return static_cast<int>(gates.size()); }
  void validate() const;
};

/// Decision variables (Z_*, tau, Q) with T_n = exp(tau_n). Junction positions
/// are not variables in hard mode; in soft mode they live in junctionPositions.
struct DecisionVariables {
  std::vector<Eigen::MatrixXd> junctionDerivatives;  // N-1 blocks, 3 x (s-1)
  Eigen::VectorXd logDurations;                      // tau, N entries
  std::vector<Eigen::MatrixXd> waypoints;            // N blocks, 3 x (M_n - 1)
  Eigen::MatrixXd junctionPositions;                 // 3 x N, soft mode only

  Eigen::VectorXd durations() const { return logDurations.array().exp(); }
};

struct CostBreakdown {
  double total = 0.0;
  double smoothnessTime = 0.0;
  double penalties = 0.0;
  double softGate = 0.0;
};

/// Unconstrained objective J(Z_*, tau, Q) with the gate-through constraint
/// eliminated. Holds per-segment workspaces, so one instance per thread.
class PlanningProblem {
 public:
  PlanningProblem(ProblemSetup setup, std::shared_ptr<const UniformMincoCacheSet> caches);

  const ProblemSetup& setup() const { return setup_; }
  int segmentCount() const { return setup_.segmentCount(); }
  int variableCount() const { return variableCount_; }

  Eigen::VectorXd pack(const DecisionVariables& vars) const;
  DecisionVariables unpack(const Eigen::VectorXd& x) const;

  /// J and dJ/dx. Throws EvaluationError on a flatness singularity.
  double evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& grad);
  CostBreakdown evaluateDetailed(const Eigen::VectorXd& x, Eigen::VectorXd* grad);

  TrajectoryParams trajectoryParams(const Eigen::VectorXd& x);
  SegmentedTrajectory trajectory(const Eigen::VectorXd& x) { return trajectoryParams(x).toTrajectory(); }

  /// Arrival time t_n at each gate.
  std::vector<double> arrivalTimes(const Eigen::VectorXd& x) const;
  /// ||sigma(t_n) - g_n(t_n)|| per gate.
  std::vector<double> gateDistances(const Eigen::VectorXd& x);
  /// Sampled violations against the untightened limits.
  PenaltyResiduals residuals(const Eigen::VectorXd& x);
  PenaltyResult penaltyReport(const Eigen::VectorXd& x, bool records);

 private:
  void solveSegments(const Eigen::VectorXd& x);

  ProblemSetup setup_;
  std::shared_ptr<const UniformMincoCacheSet> caches_;
  PenaltyConfig penalty_;
  World penaltyWorld_;
  int variableCount_ = 0;
  int offsetTau_ = 0;
  int offsetQ_ = 0;
  int offsetP_ = 0;
  std::vector<int> offsetQn_;

  // Per-evaluation state.
  std::vector<UniformMinco> segments_;
  Eigen::VectorXd durations_;
  std::vector<double> arrivals_;
  Eigen::MatrixXd junctionPos_;   // 3 x N actually used
  Eigen::MatrixXd gateVel_;       // 3 x N, gate velocity at arrival
  Eigen::MatrixXd gatePos_;       // 3 x N, gate position at arrival
  TrajectoryParams params_;
};

struct PlanResult {
  SegmentedTrajectory trajectory;
  TrajectoryParams params;
  DecisionVariables variables;
  std::vector<double> arrivalTimes;
  std::vector<double> gateDistances;
  double totalTime = 0.0;
  double cost = 0.0;
  int iterations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  PenaltyResiduals residuals;
  bool stale = false;
  double latencyMs = 0.0;

  bool converged() const {
    return status == LbfgsStatus::Converged || status == LbfgsStatus::Stalled;
  }
  bool feasible(double tolerance) const { return residuals.max() <= tolerance; }
};

struct OptimizeOptions {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Receives every accepted iterate.
  std::function<void(const Eigen::VectorXd&, double)> onIterate;
};

/// Runs L-BFGS from `initial`. Trial points where the objective cannot be
/// evaluated are rejected by the line search. Throws PlanningError when the
/// initial iterate is not finite.
PlanResult optimize(PlanningProblem& problem, const DecisionVariables& initial,
                    const OptimizeOptions& options = {});

/// Precomputes the uniform MINCO caches needed by `config` for up to
/// `segments` segments.
std::shared_ptr<const UniformMincoCacheSet> makeCaches(const PlannerConfig& config, int segments);

/// Reference used for seeding: derivative k of a path at absolute time t.
using ReferencePath = std::function<Eigen::Vector3d(double t, int k)>;

/// Builds decision variables from arrival times and a reference path.
DecisionVariables seedFromReference(const ProblemSetup& setup, const std::vector<double>& arrivals,
                                    const ReferencePath& reference);

/// Straight lines between gates traversed at the nominal speed.
DecisionVariables straightLineSeed(const ProblemSetup& setup);

/// Samples a reference trajectory whose piece boundaries are the gate times.
DecisionVariables seedFromTrajectory(const ProblemSetup& setup, const SegmentedTrajectory& reference,
                                     const std::vector<double>& arrivals);

/// One-segment general MINCO through every gate's nominal center, piece
/// durations proportional to distance and summing to the configured total.
SegmentedTrajectory planGlobal(const ProblemSetup& setup);

/// Gate arrival times of a global trajectory (its piece boundaries).
std::vector<double> globalArrivalTimes(const SegmentedTrajectory& global);

struct TopologyCandidate {
  std::string label;
  DecisionVariables initial;
  PlanResult result;
  bool feasible = false;
  double length = 0.0;
  std::string error;
};

struct TopologyResult {
  std::vector<TopologyCandidate> candidates;
  int selected = -1;
  const PlanResult& best() const { return candidates.at(static_cast<std::size_t>(selected)).result; }
};

/// Candidate initializations around `obstacleIndex`: the unmodified seed plus
/// left/right/up/down detours centred on the closest-approach time. Each detour
/// is blended into the seed with a smooth window and keeps the seed's arrivals.
std::vector<TopologyCandidate> topologyCandidates(const ProblemSetup& setup, const DecisionVariables& seed,
                                                  int obstacleIndex);

/// Index of the feasible candidate with minimum total time, or -1.
int selectFastest(const std::vector<TopologyCandidate>& candidates);

/// Optimizes every candidate (concurrently) and picks the fastest feasible one.
/// Throws PlanningError listing residuals when no candidate is feasible.
TopologyResult planMultiTopology(const ProblemSetup& setup, const DecisionVariables& seed,
                                 int obstacleIndex,
                                 std::shared_ptr<const UniformMincoCacheSet> caches = nullptr);

double trajectoryLength(const SegmentedTrajectory& traj, int samplesPerSecond = 200);

}  // namespace racetraj
