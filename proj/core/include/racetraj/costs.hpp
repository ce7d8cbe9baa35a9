#pragma once

#include "racetraj/flatness.hpp"
#include "racetraj/polynomial.hpp"
#include "racetraj/world.hpp"

#include <Eigen/Dense>

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace racetraj {

struct PenaltyWeights {
  double thrust = 100.0;
  double bodyRate = 100.0;
  double gap = 1e4;
  double obstacle = 1e4;
};

struct PenaltyConfig {
  PenaltyWeights weights;
  std::vector<int> samples{16};  // kappa_n; a single entry applies to every segment
  double thrustMin = 2.0;        // m/s^2, mass-normalized
  double thrustMax = 20.0;
  double bodyRateMax = 6.0;      // rad/s
  double obstacleThreshold = 1.0;
  DragModel drag;

  int samplesFor(int segment) const;
  void validate() const;
};

/// Coefficient view of a segmented trajectory: segment n holds a stacked
/// (2s * M_n) x 3 block, piece durations T_n / M_n.
struct TrajectoryParams {
  int order = 3;
  double startTime = 0.0;
  std::vector<Eigen::MatrixXd> coeffs;
  std::vector<int> pieces;
  Eigen::VectorXd durations;

  int segmentCount() const { return static_cast<int>(coeffs.size()); }
  SegmentedTrajectory toTrajectory() const;
  static TrajectoryParams fromTrajectory(const SegmentedTrajectory& traj);
};

/// dJ/dC per segment plus dJ/dT_n.
struct CostGradient {
  std::vector<Eigen::MatrixXd> coeffs;
  Eigen::VectorXd durations;

  static CostGradient zerosLike(const TrajectoryParams& params);
  CostGradient& operator+=(const CostGradient& other);
};

/// A sample p̊_{n,j} = sigma_n((j/kappa_n) T_n) with derivatives 0..4.
struct ConstraintPoint {
  int segment = 0;
  int sample = 0;
  int samples = 1;   // kappa_n
  double time = 0.0; // absolute timestamp t_{n-1} + (j/kappa_n) T_n
  std::array<Eigen::Vector3d, 5> deriv;

  const Eigen::Vector3d& position() const { return deriv[0]; }
  const Eigen::Vector3d& velocity() const { return deriv[1]; }
  const Eigen::Vector3d& acceleration() const { return deriv[2]; }
  const Eigen::Vector3d& jerk() const { return deriv[3]; }
};

/// Trapezoid weights (1/2, 1, ..., 1, 1/2) for kappa + 1 samples.
Eigen::VectorXd trapezoidWeights(int kappa);

struct SmoothnessCost {
  double value = 0.0;
  CostGradient gradient;
};

/// J_o = sum over pieces of the integral of ||p^(s)||^2 plus rho * sum_n T_n.
SmoothnessCost smoothnessTimeCost(const TrajectoryParams& params, double rho);
SmoothnessCost smoothnessTimeCost(const SegmentedTrajectory& traj, double rho);

struct ThrustRatePenalty {
  double thrust = 0.0;    // G_t = (f - f_m)^2 - f_r^2
  double bodyRate = 0.0;  // G_b = ||omega||^2 - omega_max^2
  std::array<Eigen::Vector3d, 3> thrustGrad;    // wrt vel, acc, jerk
  std::array<Eigen::Vector3d, 3> bodyRateGrad;
  FlatState state;
};

/// Throws SingularityError from the flatness map.
ThrustRatePenalty penaltyThrustBodyRate(const ConstraintPoint& point, const PenaltyConfig& config);

struct GapPenalty {
  double value = 0.0;  // G_g = ||R e3 - z_des||^2 - theta_tol
  std::array<Eigen::Vector3d, 3> grad;  // wrt vel, acc, jerk (jerk term is zero)
};

/// Whether the sample (n, j) lies in the attitude window around the gap gate.
bool gapApplies(const GapSpec& gap, int segment, int sample, int samples);

/// nullopt when (n, j) is outside the window.
std::optional<GapPenalty> penaltyGap(const ConstraintPoint& point, const GapSpec& gap,
                                     const DragModel& drag);

struct ObstaclePenalty {
  double value = 0.0;            // G_d = d_thr - E(p, p_d(t))
  Eigen::Vector3d positionGrad;  // -2 H (p - p_d)
  double timeGrad = 0.0;         // dG_d/dt through the obstacle motion
  Eigen::VectorXd durationGrad;  // dG_d/dT_k, zero for k > n
};

ObstaclePenalty penaltyObstacle(const ConstraintPoint& point, const EllipsoidObstacle& obstacle,
                                double threshold, int segmentCount);

/// Largest sampled violation per family, in each family's native unit:
/// thrust and body rate as excess over the bound, gap and obstacle as max(G, 0).
struct PenaltyResiduals {
  double thrust = 0.0;
  double bodyRate = 0.0;
  double gap = 0.0;
  double obstacle = 0.0;

  double max() const;
};

struct ConstraintRecord {
  int segment = 0;
  int sample = 0;
  double time = 0.0;
  double thrust = 0.0;
  double bodyRateNorm = 0.0;
  double gThrust = 0.0;
  double gBodyRate = 0.0;
  double gGap = 0.0;       // NaN outside the gap window
  double gObstacle = 0.0;  // max over obstacles, NaN without obstacles
};

struct PenaltyResult {
  double value = 0.0;  // sum_x lambda_x J_x
  std::array<double, 4> familyCosts{};  // J_t, J_b, J_g, J_d (unweighted)
  CostGradient gradient;
  PenaltyResiduals residuals;
  std::vector<ConstraintRecord> records;
};

struct PenaltyOptions {
  bool gradient = true;
  bool records = false;
};

/// Samples kappa_n + 1 constraint points per segment and accumulates the
/// trapezoid-weighted cubic hinge penalties. Throws EvaluationError carrying
/// (segment, sample) on a flatness singularity.
PenaltyResult penaltySum(const TrajectoryParams& params, const PenaltyConfig& config,
                         const World& world, PenaltyOptions options = {});

inline constexpr const char* kConstraintCsvSchema = "racetraj-constraints/v1";
void writeConstraintCsv(std::ostream& out, const std::vector<ConstraintRecord>& records);

}  // namespace racetraj
