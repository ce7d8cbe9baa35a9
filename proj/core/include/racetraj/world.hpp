#pragma once

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace racetraj {

struct StaticMotion {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
};

struct LinearMotion {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();
};

/// center + axis * amplitude * sin(omega t + phase); peak speed amplitude * omega.
struct SinusoidMotion {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();  // unit norm
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

using Motion = std::variant<StaticMotion, LinearMotion, SinusoidMotion>;

struct MotionSample {
  Eigen::Vector3d position;
  Eigen::Vector3d velocity;
};

MotionSample evaluateMotion(const Motion& motion, double t);
bool isStatic(const Motion& motion);
/// Throws std::invalid_argument on a non-unit sinusoid axis.
void validateMotion(const Motion& motion);

struct Gate {
  Motion motion;
  double radius = 1.0;

  MotionSample evaluate(double t) const { return evaluateMotion(motion, t); }
  /// Center of the motion model (the rest position of a moving gate).
  Eigen::Vector3d nominalCenter() const;
};

struct EllipsoidObstacle {
  Eigen::Vector3d semiAxes = Eigen::Vector3d::Ones();  // a, b, c
  Eigen::Matrix3d orientation = Eigen::Matrix3d::Identity();  // R_E
  Motion motion;

  /// H = R_E^T diag(1/a^2, 1/b^2, 1/c^2) R_E.
  Eigen::Matrix3d shapeMatrix() const;
  MotionSample center(double t) const { return evaluateMotion(motion, t); }
  void validate() const;
};

struct ObstacleSample {
  Eigen::Vector3d center;
  Eigen::Matrix3d shape;
};

/// Level-set value E(x, y) = (x - y)^T H (x - y).
double ellipsoidLevel(const Eigen::Matrix3d& shape, const Eigen::Vector3d& x,
                      const Eigen::Vector3d& center);

std::pair<Eigen::Vector3d, Eigen::Vector3d> gateEval(const Gate& gate, double t);
ObstacleSample obstacleEval(const EllipsoidObstacle& obstacle, double t);

/// Attitude requirement around one gate. `gate` is the 0-based index of the
/// gate; it is crossed at the end of segment `gate`, so the constraint covers
/// the last `sampleRange` samples of that segment and the first `sampleRange`
/// samples of the next one.
struct GapSpec {
  int gate = 0;
  Eigen::Vector3d zDesired = Eigen::Vector3d::UnitZ();
  double thetaTol = 0.3;  // in (0, 1)
  int sampleRange = 3;

  void validate() const;
};

/// Everything the planner treats as ground truth about the environment.
struct World {
  std::vector<Gate> gates;
  std::vector<EllipsoidObstacle> obstacles;
  std::optional<GapSpec> gap;
};

}  // namespace racetraj
