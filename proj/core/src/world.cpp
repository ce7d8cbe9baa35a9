#include "racetraj/world.hpp"

#include <cmath>
#include <stdexcept>

namespace racetraj {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

MotionSample evaluateMotion(const Motion& motion, double t) {
  return std::visit(
      Overloaded{
          [](const StaticMotion& m) {
            return MotionSample{m.center, Eigen::Vector3d::Zero()};
          },
          [t](const LinearMotion& m) {
            return MotionSample{m.center + m.velocity * t, m.velocity};
          },
          [t](const SinusoidMotion& m) {
            const double arg = m.omega * t + m.phase;
            return MotionSample{m.center + m.axis * (m.amplitude * std::sin(arg)),
                                m.axis * (m.amplitude * m.omega * std::cos(arg))};
          },
      },
      motion);
}

bool isStatic(const Motion& motion) {
  if (std::holds_alternative<StaticMotion>(motion)) return true;
  if (const auto* l = std::get_if<LinearMotion>(&motion)) return l->velocity.isZero(0.0);
  const auto& s = std::get<SinusoidMotion>(motion);
  return s.amplitude == 0.0 || s.omega == 0.0;
}

void validateMotion(const Motion& motion) {
  if (const auto* s = std::get_if<SinusoidMotion>(&motion)) {
    if (std::abs(s->axis.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("sinusoid motion axis must be unit norm");
    }
  }
}

Eigen::Vector3d Gate::nominalCenter() const {
  return std::visit([](const auto& m) -> Eigen::Vector3d { return m.center; }, motion);
}

Eigen::Matrix3d EllipsoidObstacle::shapeMatrix() const {
  const Eigen::Vector3d inv = semiAxes.cwiseProduct(semiAxes).cwiseInverse();
  return orientation.transpose() * inv.asDiagonal() * orientation;
}

void EllipsoidObstacle::validate() const {
  if (!(semiAxes.minCoeff() > 0.0)) throw std::invalid_argument("ellipsoid semi-axes must be positive");
  const Eigen::Matrix3d err = orientation.transpose() * orientation - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > 1e-9 || orientation.determinant() < 0.0) {
    throw std::invalid_argument("ellipsoid orientation must be a rotation");
  }
  validateMotion(motion);
}

double ellipsoidLevel(const Eigen::Matrix3d& shape, const Eigen::Vector3d& x,
                      const Eigen::Vector3d& center) {
  const Eigen::Vector3d d = x - center;
  return d.dot(shape * d);
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> gateEval(const Gate& gate, double t) {
  const auto s = gate.evaluate(t);
  return {s.position, s.velocity};
}

ObstacleSample obstacleEval(const EllipsoidObstacle& obstacle, double t) {
  return {obstacle.center(t).position, obstacle.shapeMatrix()};
}

void GapSpec::validate() const {
  if (std::abs(zDesired.norm() - 1.0) > 1e-9) throw std::invalid_argument("gap z_des must be unit norm");
  if (!(thetaTol > 0.0 && thetaTol < 1.0)) throw std::invalid_argument("gap theta_tol must lie in (0, 1)");
  if (sampleRange < 0) throw std::invalid_argument("gap sample range must be non-negative");
  if (gate < 0) throw std::invalid_argument("gap gate index must be non-negative");
}

}  // namespace racetraj
