#include "racetraj/costs.hpp"

#include "racetraj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace racetraj {

int PenaltyConfig::samplesFor(int segment) const {
  if (samples.empty()) throw ContractError("PenaltyConfig: no sample counts");
  if (samples.size() == 1) return samples.front();
  return samples.at(static_cast<std::size_t>(segment));
}

void PenaltyConfig::validate() const {
  if (weights.thrust < 0 || weights.bodyRate < 0 || weights.gap < 0 || weights.obstacle < 0) {
    throw std::invalid_argument("PenaltyConfig: weights must be non-negative");
  }
  if (!(thrustMax > thrustMin && thrustMin >= 0.0)) {
    throw std::invalid_argument("PenaltyConfig: need f_max > f_min >= 0");
  }
  if (!(bodyRateMax > 0.0)) throw std::invalid_argument("PenaltyConfig: omega_max must be positive");
  for (int k : samples) {
    if (k < 2) throw std::invalid_argument("PenaltyConfig: kappa must be >= 2");
  }
  if (drag.kd < 0.0 || !(drag.gravity > 0.0)) throw std::invalid_argument("PenaltyConfig: invalid drag model");
}

SegmentedTrajectory TrajectoryParams::toTrajectory() const {
  return SegmentedTrajectory::fromCoefficients(startTime, order, coeffs, pieces, durations);
}

TrajectoryParams TrajectoryParams::fromTrajectory(const SegmentedTrajectory& traj) {
  TrajectoryParams p;
  p.order = traj.order();
  p.startTime = traj.startTime();
  const int d = 2 * p.order;
  const int N = traj.segmentCount();
  p.durations.resize(N);
  for (int n = 0; n < N; ++n) {
    const auto& seg = traj.segment(n);
    const int M = static_cast<int>(seg.size());
    Eigen::MatrixXd block(d * M, traj.dimension());
    for (int i = 0; i < M; ++i) block.middleRows(d * i, d) = seg[i].coeffs();
    p.coeffs.push_back(std::move(block));
    p.pieces.push_back(M);
    p.durations(n) = traj.segmentDuration(n);
  }
  return p;
}

CostGradient CostGradient::zerosLike(const TrajectoryParams& params) {
  CostGradient g;
  g.coeffs.reserve(params.coeffs.size());
  for (const auto& c : params.coeffs) g.coeffs.push_back(Eigen::MatrixXd::Zero(c.rows(), c.cols()));
  g.durations = Eigen::VectorXd::Zero(params.durations.size());
  return g;
}

CostGradient& CostGradient::operator+=(const CostGradient& other) {
  for (std::size_t n = 0; n < coeffs.size(); ++n) coeffs[n] += other.coeffs[n];
  durations += other.durations;
  return *this;
}

Eigen::VectorXd trapezoidWeights(int kappa) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(kappa + 1);
  w(0) = 0.5;
  w(kappa) = 0.5;
  return w;
}

SmoothnessCost smoothnessTimeCost(const TrajectoryParams& params, double rho) {
  const int s = params.order;
  const int d = 2 * s;
  SmoothnessCost out;
  out.gradient = CostGradient::zerosLike(params);

  std::vector<double> w(d, 0.0);
  for (int a = s; a < d; ++a) w[a] = fallingFactorial(a, s);

  for (int n = 0; n < params.segmentCount(); ++n) {
    const int M = params.pieces[n];
    const double h = params.durations(n) / M;
    // powers h^0 .. h^(2d)
    std::vector<double> hp(2 * d + 1, 1.0);
    for (std::size_t k = 1; k < hp.size(); ++k) hp[k] = hp[k - 1] * h;
    const auto& C = params.coeffs[n];
    auto& G = out.gradient.coeffs[n];
    double gradH = 0.0;
    for (int i = 0; i < M; ++i) {
      for (int a = s; a < d; ++a) {
        for (int b = s; b < d; ++b) {
          const int e = a + b - 2 * s;
          const double ww = w[a] * w[b];
          const double dot = C.row(d * i + a).dot(C.row(d * i + b));
          out.value += ww * dot * hp[e + 1] / (e + 1);
          gradH += ww * dot * hp[e];
          G.row(d * i + a) += 2.0 * ww * hp[e + 1] / (e + 1) * C.row(d * i + b);
        }
      }
    }
    out.gradient.durations(n) = gradH / M + rho;
    out.value += rho * params.durations(n);
  }
  return out;
}

SmoothnessCost smoothnessTimeCost(const SegmentedTrajectory& traj, double rho) {
  return smoothnessTimeCost(TrajectoryParams::fromTrajectory(traj), rho);
}

ThrustRatePenalty penaltyThrustBodyRate(const ConstraintPoint& point, const PenaltyConfig& config) {
  FlatJacobian J;
  ThrustRatePenalty out;
  out.state = flatMapWithJacobian(point.velocity(), point.acceleration(), point.jerk(),
                                  config.drag, J);
  const double fm = 0.5 * (config.thrustMax + config.thrustMin);
  const double fr = 0.5 * (config.thrustMax - config.thrustMin);
  const double df = out.state.thrust - fm;
  out.thrust = df * df - fr * fr;
  out.thrustGrad[0] = 2.0 * df * J.thrustVel.transpose();
  out.thrustGrad[1] = 2.0 * df * J.thrustAcc.transpose();
  out.thrustGrad[2] = 2.0 * df * J.thrustJerk.transpose();

  const Eigen::Vector3d& w = out.state.bodyRate;
  out.bodyRate = w.squaredNorm() - config.bodyRateMax * config.bodyRateMax;
  out.bodyRateGrad[0] = 2.0 * J.rateVel.transpose() * w;
  out.bodyRateGrad[1] = 2.0 * J.rateAcc.transpose() * w;
  out.bodyRateGrad[2] = 2.0 * J.rateJerk.transpose() * w;
  return out;
}

bool gapApplies(const GapSpec& gap, int segment, int sample, int samples) {
  if (segment == gap.gate) return sample >= samples - gap.sampleRange;
  if (segment == gap.gate + 1) return sample <= gap.sampleRange;
  return false;
}

std::optional<GapPenalty> penaltyGap(const ConstraintPoint& point, const GapSpec& gap,
                                     const DragModel& drag) {
  if (!gapApplies(gap, point.segment, point.sample, point.samples)) return std::nullopt;
  FlatJacobian J;
  const FlatState st = flatMapWithJacobian(point.velocity(), point.acceleration(), point.jerk(), drag, J);
  const Eigen::Vector3d diff = st.zAxis() - gap.zDesired;
  GapPenalty out;
  out.value = diff.squaredNorm() - gap.thetaTol;
  out.grad[0] = 2.0 * J.zVel.transpose() * diff;
  out.grad[1] = 2.0 * J.zAcc.transpose() * diff;
  out.grad[2] = 2.0 * J.zJerk.transpose() * diff;
  return out;
}

ObstaclePenalty penaltyObstacle(const ConstraintPoint& point, const EllipsoidObstacle& obstacle,
                                double threshold, int segmentCount) {
  const MotionSample c = obstacle.center(point.time);
  const Eigen::Matrix3d H = obstacle.shapeMatrix();
  const Eigen::Vector3d diff = point.position() - c.position;
  const Eigen::Vector3d Hd = H * diff;
  ObstaclePenalty out;
  out.value = threshold - diff.dot(Hd);
  out.positionGrad = -2.0 * Hd;
  out.timeGrad = 2.0 * Hd.dot(c.velocity);
  out.durationGrad = Eigen::VectorXd::Zero(segmentCount);
  for (int k = 0; k < point.segment; ++k) out.durationGrad(k) = out.timeGrad;
  out.durationGrad(point.segment) =
      out.timeGrad * static_cast<double>(point.sample) / point.samples;
  return out;
}

double PenaltyResiduals::max() const { return std::max({thrust, bodyRate, gap, obstacle}); }

namespace {

// Derivatives 0..4 of piece `piece` at local time t from the stacked block.
void pieceDerivatives(const Eigen::MatrixXd& C, int d, int piece, double t,
                      std::array<Eigen::Vector3d, 5>& out) {
  for (int k = 0; k < 5; ++k) {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();
    for (int j = d - 1; j >= k; --j) {
      v = v * t + fallingFactorial(j, k) * C.row(d * piece + j).transpose();
    }
    out[k] = v;
  }
}

}  // namespace

PenaltyResult penaltySum(const TrajectoryParams& params, const PenaltyConfig& config,
                         const World& world, PenaltyOptions options) {
  const int s = params.order;
  const int d = 2 * s;
  const int N = params.segmentCount();
  const auto& wts = config.weights;

  PenaltyResult out;
  if (options.gradient) out.gradient = CostGradient::zerosLike(params);

  std::vector<Eigen::Matrix3d> shapes;
  shapes.reserve(world.obstacles.size());
  for (const auto& obs : world.obstacles) shapes.push_back(obs.shapeMatrix());

  double segStart = params.startTime;
  ConstraintPoint pt;
  for (int n = 0; n < N; ++n) {
    const int kappa = config.samplesFor(n);
    const int M = params.pieces[n];
    const double T = params.durations(n);
    const auto& C = params.coeffs[n];
    pt.segment = n;
    pt.samples = kappa;

    for (int j = 0; j <= kappa; ++j) {
      const int piece = std::min((j * M) / kappa, M - 1);
      const double frac = static_cast<double>(j * M - piece * kappa) / (static_cast<double>(kappa) * M);
      const double tau = frac * T;
      const double omegaBar = (j == 0 || j == kappa) ? 0.5 : 1.0;
      const double quad = T / kappa * omegaBar;
      pt.sample = j;
      pt.time = segStart + static_cast<double>(j) / kappa * T;
      pieceDerivatives(C, d, piece, tau, pt.deriv);

      // Upstream gradient dL/dp^(k) for this point, k = 0..3, and dL/dt_abs.
      std::array<Eigen::Vector3d, 4> gp;
      for (auto& g : gp) g.setZero();
      double gTime = 0.0;
      double hingeSum = 0.0;  // sum_x lambda_x max(G_x, 0)^3, for the quadrature factor

      ConstraintRecord rec;
      rec.segment = n;
      rec.sample = j;
      rec.time = pt.time;
      rec.gGap = std::numeric_limits<double>::quiet_NaN();
      rec.gObstacle = std::numeric_limits<double>::quiet_NaN();

      ThrustRatePenalty tr;
      try {
        tr = penaltyThrustBodyRate(pt, config);
      } catch (const SingularityError& e) {
        throw EvaluationError(std::string(e.what()) + " at segment " + std::to_string(n) +
                                  ", sample " + std::to_string(j),
                              n, j);
      }
      rec.thrust = tr.state.thrust;
      rec.bodyRateNorm = tr.state.bodyRate.norm();
      rec.gThrust = tr.thrust;
      rec.gBodyRate = tr.bodyRate;
      out.residuals.thrust = std::max(
          {out.residuals.thrust, tr.state.thrust - config.thrustMax, config.thrustMin - tr.state.thrust});
      out.residuals.bodyRate = std::max(out.residuals.bodyRate, rec.bodyRateNorm - config.bodyRateMax);

      auto accumulate = [&](double G, double weight, int family,
                            const std::array<Eigen::Vector3d, 3>* dvaj) {
        if (G <= 0.0) return;
        const double h3 = G * G * G;
        out.familyCosts[family] += quad * h3;
        hingeSum += weight * h3;
        if (!options.gradient || weight == 0.0) return;
        const double scale = weight * quad * 3.0 * G * G;
        if (dvaj) {
          for (int k = 0; k < 3; ++k) gp[k + 1] += scale * (*dvaj)[k];
        }
      };
      accumulate(tr.thrust, wts.thrust, 0, &tr.thrustGrad);
      accumulate(tr.bodyRate, wts.bodyRate, 1, &tr.bodyRateGrad);

      if (world.gap) {
        if (auto gg = penaltyGap(pt, *world.gap, config.drag)) {
          rec.gGap = gg->value;
          out.residuals.gap = std::max(out.residuals.gap, gg->value);
          accumulate(gg->value, wts.gap, 2, &gg->grad);
        }
      }

      for (std::size_t o = 0; o < world.obstacles.size(); ++o) {
        const MotionSample c = world.obstacles[o].center(pt.time);
        const Eigen::Vector3d diff = pt.position() - c.position;
        const Eigen::Vector3d Hd = shapes[o] * diff;
        const double G = config.obstacleThreshold - diff.dot(Hd);
        rec.gObstacle = std::isnan(rec.gObstacle) ? G : std::max(rec.gObstacle, G);
        out.residuals.obstacle = std::max(out.residuals.obstacle, G);
        if (G > 0.0) {
          const double h3 = G * G * G;
          out.familyCosts[3] += quad * h3;
          hingeSum += wts.obstacle * h3;
          if (options.gradient) {
            const double scale = wts.obstacle * quad * 3.0 * G * G;
            gp[0] += scale * (-2.0 * Hd);
            gTime += scale * 2.0 * Hd.dot(c.velocity);
          }
        }
      }

      if (options.records) out.records.push_back(rec);
      if (hingeSum == 0.0) continue;
      out.value += quad * hingeSum;
      if (!options.gradient) continue;

      auto& GC = out.gradient.coeffs[n];
      for (int k = 0; k < 4; ++k) {
        if (gp[k].isZero(0.0)) continue;
        const Eigen::VectorXd b = basisDerivative(tau, d - 1, k);
        GC.middleRows(d * piece, d).noalias() += b * gp[k].transpose();
      }
      double gT = omegaBar / kappa * hingeSum;
      for (int k = 0; k < 4; ++k) gT += gp[k].dot(pt.deriv[k + 1]) * frac;
      gT += gTime * static_cast<double>(j) / kappa;
      out.gradient.durations(n) += gT;
      for (int k = 0; k < n; ++k) out.gradient.durations(k) += gTime;
    }
    segStart += T;
  }
  out.residuals.thrust = std::max(0.0, out.residuals.thrust);
  out.residuals.bodyRate = std::max(0.0, out.residuals.bodyRate);
  out.residuals.gap = std::max(0.0, out.residuals.gap);
  out.residuals.obstacle = std::max(0.0, out.residuals.obstacle);
  return out;
}

void writeConstraintCsv(std::ostream& out, const std::vector<ConstraintRecord>& records) {
  out << "# schema: " << kConstraintCsvSchema << "\n";
  out << "t,segment,sample,f,omega_norm,G_t,G_b,G_g,G_d\n";
  out << std::setprecision(10);
  auto num = [&](double v) -> std::ostream& {
    if (std::isnan(v)) return out << "";
    return out << v;
  };
  for (const auto& r : records) {
    out << r.time << ',' << r.segment << ',' << r.sample << ',' << r.thrust << ',' << r.bodyRateNorm
        << ',' << r.gThrust << ',' << r.gBodyRate << ',';
    num(r.gGap) << ',';
    num(r.gObstacle) << '\n';
  }
}

}  // namespace racetraj
