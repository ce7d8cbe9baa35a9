#include "racetraj/flatness.hpp"

#include "racetraj/errors.hpp"

#include <cmath>

namespace racetraj {
namespace {

constexpr double kSingularThrust = 1e-6;
constexpr double kAxisFallback = 1e-6;

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d S;
  S << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return S;
}

struct Frame {
  double f;
  Eigen::Vector3d z, x, y, zdot;
  Eigen::Vector3d ref;  // world axis used for the x completion
  Eigen::Vector3d w;    // unnormalized projection of ref
  Eigen::Vector3d tau, taudot;
};

Frame buildFrame(const Eigen::Vector3d& vel, const Eigen::Vector3d& acc,
                 const Eigen::Vector3d& jerk, const DragModel& drag) {
  Frame fr;
  fr.tau = acc + drag.kd * vel;
  fr.tau.z() += drag.gravity;
  fr.f = fr.tau.norm();
  if (!(fr.f >= kSingularThrust)) {
    throw SingularityError("flatness: thrust vector norm below 1e-6 (free fall)");
  }
  fr.z = fr.tau / fr.f;
  fr.taudot = jerk + drag.kd * acc;
  fr.zdot = (fr.taudot - fr.z.dot(fr.taudot) * fr.z) / fr.f;
  fr.ref = Eigen::Vector3d::UnitX();
  if (std::abs(std::abs(fr.z.x()) - 1.0) < kAxisFallback) fr.ref = Eigen::Vector3d::UnitY();
  fr.w = fr.ref - fr.ref.dot(fr.z) * fr.z;
  fr.x = fr.w.normalized();
  fr.y = fr.z.cross(fr.x);
  return fr;
}

FlatState toState(const Frame& fr) {
  FlatState st;
  st.thrust = fr.f;
  st.rotation.col(0) = fr.x;
  st.rotation.col(1) = fr.y;
  st.rotation.col(2) = fr.z;
  st.bodyRate = Eigen::Vector3d(-fr.y.dot(fr.zdot), fr.x.dot(fr.zdot), 0.0);
  return st;
}

FlatJacobian jacobian(const Frame& fr, const DragModel& drag) {
  const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d P = I - fr.z * fr.z.transpose();
  const double f = fr.f;
  const Eigen::Vector3d& u = fr.taudot;

  const Eigen::RowVector3d dfdtau = fr.z.transpose();
  const Eigen::Matrix3d dzdtau = P / f;
  const Eigen::Matrix3d dzdotdtau =
      -(fr.z * (u.transpose() * P) + fr.z.dot(u) * P + (P * u) * fr.z.transpose()) / (f * f);
  const Eigen::Matrix3d dzdotdu = P / f;

  const double wn = fr.w.norm();
  const Eigen::Matrix3d dxdz =
      (I - fr.x * fr.x.transpose()) / wn * (-fr.ref.dot(fr.z) * I - fr.z * fr.ref.transpose());
  const Eigen::Matrix3d dydz = skew(fr.z) * dxdz - skew(fr.x);

  Eigen::Matrix3d dwdtau = Eigen::Matrix3d::Zero();
  dwdtau.row(0) = -(fr.zdot.transpose() * dydz * dzdtau + fr.y.transpose() * dzdotdtau);
  dwdtau.row(1) = fr.zdot.transpose() * dxdz * dzdtau + fr.x.transpose() * dzdotdtau;
  Eigen::Matrix3d dwdu = Eigen::Matrix3d::Zero();
  dwdu.row(0) = -fr.y.transpose() * dzdotdu;
  dwdu.row(1) = fr.x.transpose() * dzdotdu;

  const double k = drag.kd;
  FlatJacobian J;
  J.thrustVel = k * dfdtau;
  J.thrustAcc = dfdtau;
  J.thrustJerk.setZero();
  J.zVel = k * dzdtau;
  J.zAcc = dzdtau;
  J.zJerk.setZero();
  J.rateVel = k * dwdtau;
  J.rateAcc = dwdtau + k * dwdu;
  J.rateJerk = dwdu;
  return J;
}

}  // namespace

FlatState flatMap(const Eigen::Vector3d& vel, const Eigen::Vector3d& acc,
                  const Eigen::Vector3d& jerk, const DragModel& drag) {
  return toState(buildFrame(vel, acc, jerk, drag));
}

FlatJacobian flatMapJacobian(const Eigen::Vector3d& vel, const Eigen::Vector3d& acc,
                             const Eigen::Vector3d& jerk, const DragModel& drag) {
  return jacobian(buildFrame(vel, acc, jerk, drag), drag);
}

FlatState flatMapWithJacobian(const Eigen::Vector3d& vel, const Eigen::Vector3d& acc,
                              const Eigen::Vector3d& jerk, const DragModel& drag,
                              FlatJacobian& jac) {
  const Frame fr = buildFrame(vel, acc, jerk, drag);
  jac = jacobian(fr, drag);
  return toState(fr);
}

}  // namespace racetraj
