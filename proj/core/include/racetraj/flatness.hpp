#pragma once

#include <Eigen/Dense>

namespace racetraj {

/// Isotropic world-frame linear drag: the thrust vector must cancel
/// gravity, the commanded acceleration and kd * velocity.
struct DragModel {
  double kd = 0.0;        // 1/s
  double gravity = 9.81;  // m/s^2
};

/// Mass-normalized thrust, body rate and attitude of the vehicle.
struct FlatState {
  double thrust = 0.0;
  Eigen::Vector3d bodyRate = Eigen::Vector3d::Zero();
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();

  Eigen::Vector3d zAxis() const { return rotation.col(2); }
};

/// Jacobians of (f, omega, R e3) with respect to velocity, acceleration, jerk.
struct FlatJacobian {
  Eigen::RowVector3d thrustVel, thrustAcc, thrustJerk;
  Eigen::Matrix3d rateVel, rateAcc, rateJerk;
  Eigen::Matrix3d zVel, zAcc, zJerk;
};

/// Flatness map with yaw fixed at zero. The body x-axis is the world x-axis
/// projected onto the plane orthogonal to z_B (world y when z_B is within 1e-6
/// of +/- world x). omega_z is zero by this convention.
/// Throws SingularityError when the thrust vector norm drops below 1e-6.
FlatState flatMap(const Eigen::Vector3d& vel, const Eigen::Vector3d& acc,
                  const Eigen::Vector3d& jerk, const DragModel& drag);

FlatJacobian flatMapJacobian(const Eigen::Vector3d& vel, const Eigen::Vector3d& acc,
                             const Eigen::Vector3d& jerk, const DragModel& drag);

/// Both at once; shares the intermediate terms.
FlatState flatMapWithJacobian(const Eigen::Vector3d& vel, const Eigen::Vector3d& acc,
                              const Eigen::Vector3d& jerk, const DragModel& drag,
                              FlatJacobian& jac);

}  // namespace racetraj
