#include "racetraj/costs.hpp"
#include "racetraj/minco_uniform.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace racetraj;
using racetraj::testkit::randomMatrix;

namespace {

// Two time-uniform segments (M = 2, 3) built with MINCO so derivatives are moderate.
TrajectoryParams randomParams(std::mt19937& rng) {
  TrajectoryParams p;
  p.order = 3;
  p.startTime = 0.4;
  p.pieces = {2, 3};
  p.durations = Eigen::Vector2d(testkit::uniform(rng, 2.0, 2.6), testkit::uniform(rng, 2.4, 3.0));
  Eigen::MatrixXd head = randomMatrix(rng, 3, 3, 1.0);
  head.col(0) = Eigen::Vector3d(0, 0, 1);
  Eigen::MatrixXd mid = randomMatrix(rng, 3, 3, 1.0);
  mid.col(0) = Eigen::Vector3d(4, 1, 1.5);
  Eigen::MatrixXd tail = randomMatrix(rng, 3, 3, 1.0);
  tail.col(0) = Eigen::Vector3d(9, -1, 1);
  for (int n = 0; n < 2; ++n) {
    UniformMinco u(std::make_shared<UniformMincoCache>(3, p.pieces[n]));
    const Eigen::MatrixXd Q = randomMatrix(rng, 3, p.pieces[n] - 1, 0.5) +
                              (n == 0 ? Eigen::Vector3d(2, 0.5, 1.2) : Eigen::Vector3d(6, 0, 1.3)).replicate(1, p.pieces[n] - 1);
    u.solve(p.durations(n), n == 0 ? head : mid, n == 0 ? mid : tail, Q);
    p.coeffs.push_back(u.coefficients());
  }
  return p;
}

Eigen::VectorXd flatten(const TrajectoryParams& p) {
  Eigen::Index size = p.durations.size();
  for (const auto& c : p.coeffs) size += c.size();
  Eigen::VectorXd x(size);
  Eigen::Index o = 0;
  for (const auto& c : p.coeffs) {
    x.segment(o, c.size()) = c.reshaped();
    o += c.size();
  }
  x.tail(p.durations.size()) = p.durations;
  return x;
}

TrajectoryParams unflatten(const TrajectoryParams& shape, const Eigen::VectorXd& x) {
  TrajectoryParams p = shape;
  Eigen::Index o = 0;
  for (auto& c : p.coeffs) {
    c = x.segment(o, c.size()).reshaped(c.rows(), c.cols());
    o += c.size();
  }
  p.durations = x.tail(p.durations.size());
  return p;
}

Eigen::VectorXd flatten(const CostGradient& g) {
  Eigen::Index size = g.durations.size();
  for (const auto& c : g.coeffs) size += c.size();
  Eigen::VectorXd x(size);
  Eigen::Index o = 0;
  for (const auto& c : g.coeffs) {
    x.segment(o, c.size()) = c.reshaped();
    o += c.size();
  }
  x.tail(g.durations.size()) = g.durations;
  return x;
}

ConstraintPoint pointAt(const Eigen::Vector3d& p, const Eigen::Vector3d& v, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& j) {
  ConstraintPoint pt;
  pt.deriv = {p, v, a, j, Eigen::Vector3d::Zero()};
  return pt;
}

}  // namespace

TEST(TrapezoidWeights, HalfEnds) {
  const Eigen::VectorXd w = trapezoidWeights(4);
  ASSERT_EQ(w.size(), 5);
  EXPECT_EQ(w, (Eigen::VectorXd(5) << 0.5, 1, 1, 1, 0.5).finished());
}

TEST(SmoothnessCost, ConstantVelocityLine) {
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(12, 3);
  C.row(0) << 1, 2, 3;
  C.row(1) << 2, 0, -1;
  C.row(6) = C.row(0) + 1.5 * C.row(1);
  C.row(7) = C.row(1);
  TrajectoryParams p;
  p.coeffs = {C};
  p.pieces = {2};
  p.durations = Eigen::VectorXd::Constant(1, 3.0);
  EXPECT_NEAR(smoothnessTimeCost(p, 7.0).value, 21.0, 1e-12);
  const double a = smoothnessTimeCost(p, 2.0).value, b = smoothnessTimeCost(p, 4.0).value;
  EXPECT_DOUBLE_EQ(b - 2 * a, 0.0 * a);
}

TEST(SmoothnessCost, QuadratureOracle) {
  std::mt19937 rng(70);
  const Eigen::MatrixXd C = randomMatrix(rng, 6, 3);
  TrajectoryParams p;
  p.coeffs = {C};
  p.pieces = {1};
  p.durations = Eigen::VectorXd::Constant(1, 1.3);
  const PolynomialPiece piece(C, 1.3);
  const int n = 10000;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    integral += w * piece.evaluate(1.3 * i / n, 3).squaredNorm();
  }
  integral *= 1.3 / n;
  EXPECT_NEAR(smoothnessTimeCost(p, 0.0).value, integral, 1e-6 * integral);
}

TEST(SmoothnessCost, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(71);
  const TrajectoryParams p = randomParams(rng);
  const SmoothnessCost sc = smoothnessTimeCost(p, 3.0);
  auto F = [&](const Eigen::VectorXd& x) { return smoothnessTimeCost(unflatten(p, x), 3.0).value; };
  const Eigen::VectorXd fd = testkit::centralDifference(F, flatten(p), 1e-6);
  EXPECT_TRUE(testkit::gradientsAgree(flatten(sc.gradient), fd, 1e-5, 1e-6));
}

TEST(ThrustRatePenalty, BoundaryAndHover) {
  PenaltyConfig cfg;
  cfg.thrustMax = 9.81;
  cfg.thrustMin = 1.0;
  const auto hover = pointAt(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
  const ThrustRatePenalty r = penaltyThrustBodyRate(hover, cfg);
  EXPECT_NEAR(r.thrust, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.bodyRate, -cfg.bodyRateMax * cfg.bodyRateMax);
}

TEST(ThrustRatePenalty, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(72);
  PenaltyConfig cfg;
  cfg.drag.kd = 0.3;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(9);
    x << randomMatrix(rng, 3, 1, 4), randomMatrix(rng, 3, 1, 8), randomMatrix(rng, 3, 1, 20);
    auto point = [&](const Eigen::VectorXd& y) {
      return pointAt(Eigen::Vector3d::Zero(), y.segment<3>(0), y.segment<3>(3), y.segment<3>(6));
    };
    const ThrustRatePenalty r = penaltyThrustBodyRate(point(x), cfg);
    Eigen::VectorXd gt(9), gb(9);
    gt << r.thrustGrad[0], r.thrustGrad[1], r.thrustGrad[2];
    gb << r.bodyRateGrad[0], r.bodyRateGrad[1], r.bodyRateGrad[2];
    auto ft = [&](const Eigen::VectorXd& y) { return penaltyThrustBodyRate(point(y), cfg).thrust; };
    auto fb = [&](const Eigen::VectorXd& y) { return penaltyThrustBodyRate(point(y), cfg).bodyRate; };
    EXPECT_TRUE(testkit::gradientsAgree(gt, testkit::centralDifference(ft, x, 1e-6), 1e-5, 1e-7)) << trial;
    EXPECT_TRUE(testkit::gradientsAgree(gb, testkit::centralDifference(fb, x, 1e-6), 1e-5, 1e-7)) << trial;
  }
}

TEST(GapPenalty, AlignedAndOrthogonal) {
  GapSpec gap;
  gap.thetaTol = 0.3;
  const auto hover = pointAt(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
  gap.zDesired = Eigen::Vector3d::UnitZ();
  EXPECT_NEAR(penaltyGap(hover, gap, {})->value, -0.3, 1e-15);
  gap.zDesired = Eigen::Vector3d::UnitY();
  EXPECT_NEAR(penaltyGap(hover, gap, {})->value, 2.0 - 0.3, 1e-15);
}

TEST(GapPenalty, SampleWindow) {
  GapSpec gap;
  gap.gate = 1;
  gap.sampleRange = 3;
  EXPECT_TRUE(gapApplies(gap, 1, 16, 16));
  EXPECT_TRUE(gapApplies(gap, 1, 13, 16));
  EXPECT_FALSE(gapApplies(gap, 1, 12, 16));
  EXPECT_TRUE(gapApplies(gap, 2, 0, 16));
  EXPECT_TRUE(gapApplies(gap, 2, 3, 16));
  EXPECT_FALSE(gapApplies(gap, 2, 4, 16));
  EXPECT_FALSE(gapApplies(gap, 0, 16, 16));
  ConstraintPoint pt = pointAt(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
  pt.segment = 0;
  pt.sample = 5;
  pt.samples = 16;
  EXPECT_FALSE(penaltyGap(pt, gap, {}).has_value());
}

TEST(GapPenalty, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(73);
  GapSpec gap;
  gap.gate = 0;
  gap.zDesired = Eigen::Vector3d(0.3, -0.2, 1).normalized();
  DragModel drag{0.25, 9.81};
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(9);
    x << randomMatrix(rng, 3, 1, 4), randomMatrix(rng, 3, 1, 8), randomMatrix(rng, 3, 1, 20);
    auto point = [&](const Eigen::VectorXd& y) {
      ConstraintPoint pt = pointAt(Eigen::Vector3d::Zero(), y.segment<3>(0), y.segment<3>(3), y.segment<3>(6));
      pt.samples = 16;
      pt.sample = 16;
      return pt;
    };
    const GapPenalty g = *penaltyGap(point(x), gap, drag);
    Eigen::VectorXd ga(9);
    ga << g.grad[0], g.grad[1], g.grad[2];
    auto f = [&](const Eigen::VectorXd& y) { return penaltyGap(point(y), gap, drag)->value; };
    EXPECT_TRUE(testkit::gradientsAgree(ga, testkit::centralDifference(f, x, 1e-6), 1e-5, 1e-8)) << trial;
  }
}

TEST(ObstaclePenalty, CenterBoundaryAndTimeChannel) {
  EllipsoidObstacle obs;
  obs.semiAxes = Eigen::Vector3d(2, 1, 0.5);
  obs.orientation = Eigen::AngleAxisd(0.3, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  obs.motion = LinearMotion{{1, 2, 1}, {0.7, -0.4, 0.2}};
  const double thr = 1.5;
  ConstraintPoint pt = pointAt(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
  pt.segment = 1;
  pt.sample = 5;
  pt.samples = 16;

  const Eigen::Vector2d T(1.2, 2.0);
  auto at = [&](const Eigen::Vector2d& d, const Eigen::Vector3d& p) {
    ConstraintPoint q = pt;
    q.time = 0.3 + d(0) + d(1) * 5.0 / 16.0;
    q.deriv[0] = p;
    return q;
  };
  const ConstraintPoint c = at(T, Eigen::Vector3d::Zero());
  ConstraintPoint atCenter = c;
  atCenter.deriv[0] = obs.center(c.time).position;
  EXPECT_DOUBLE_EQ(penaltyObstacle(atCenter, obs, thr, 3).value, thr);
  ConstraintPoint onLevel = c;
  onLevel.deriv[0] = obs.center(c.time).position + std::sqrt(thr) * obs.orientation.transpose() * Eigen::Vector3d(2, 0, 0);
  EXPECT_NEAR(penaltyObstacle(onLevel, obs, thr, 3).value, 0.0, 1e-12);

  const Eigen::Vector3d p(1.8, 2.0, 1.3);
  const ObstaclePenalty g = penaltyObstacle(at(T, p), obs, thr, 3);
  EXPECT_EQ(g.durationGrad(2), 0.0);
  for (int k = 0; k < 2; ++k) {
    auto f = [&](const Eigen::VectorXd& d) { return penaltyObstacle(at(d, p), obs, thr, 3).value; };
    const double fd = testkit::centralDifference(f, T, 1e-6)(k);
    EXPECT_NEAR(g.durationGrad(k), fd, 1e-5 * std::max(1.0, std::abs(fd)));
  }
  auto fp = [&](const Eigen::VectorXd& y) { return penaltyObstacle(at(T, y), obs, thr, 3).value; };
  EXPECT_TRUE(testkit::gradientsAgree(g.positionGrad, testkit::centralDifference(fp, p, 1e-6), 1e-5, 1e-8));
}

namespace {

PenaltyConfig activeConfig() {
  PenaltyConfig cfg;
  cfg.samples = {12, 9};
  cfg.thrustMin = 6.0;
  cfg.thrustMax = 13.0;
  cfg.bodyRateMax = 2.5;
  cfg.obstacleThreshold = 1.2;
  cfg.drag.kd = 0.3;
  cfg.weights = {1.0, 1.0, 5.0, 5.0};
  return cfg;
}

World activeWorld() {
  World w;
  EllipsoidObstacle obs;
  obs.semiAxes = Eigen::Vector3d(1.5, 1.0, 0.8);
  obs.orientation = Eigen::AngleAxisd(0.5, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  obs.motion = LinearMotion{{2.5, 0.2, 1.1}, {0.8, 0.1, 0.0}};
  w.obstacles.push_back(obs);
  GapSpec gap;
  gap.gate = 0;
  gap.zDesired = Eigen::Vector3d(0.4, 0.0, 1.0).normalized();
  gap.thetaTol = 0.05;
  gap.sampleRange = 3;
  w.gap = gap;
  return w;
}

}  // namespace

TEST(PenaltySum, InactiveIsZero) {
  std::mt19937 rng(74);
  const TrajectoryParams p = randomParams(rng);
  PenaltyConfig cfg;
  cfg.thrustMin = 0.0;
  cfg.thrustMax = 1e4;
  cfg.bodyRateMax = 1e4;
  const PenaltyResult r = penaltySum(p, cfg, World{});
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(flatten(r.gradient).isZero(0.0));
  EXPECT_EQ(r.residuals.max(), 0.0);
}

TEST(PenaltySum, AllFamiliesActive) {
  std::mt19937 rng(75);
  const PenaltyResult r = penaltySum(randomParams(rng), activeConfig(), activeWorld());
  for (double j : r.familyCosts) EXPECT_GT(j, 0.0);
}

TEST(PenaltySum, GradientMatchesFiniteDifferences) {
  std::mt19937 rng(76);
  const PenaltyConfig cfg = activeConfig();
  const World world = activeWorld();
  for (int trial = 0; trial < 5; ++trial) {
    const TrajectoryParams p = randomParams(rng);
    const PenaltyResult r = penaltySum(p, cfg, world);
    auto F = [&](const Eigen::VectorXd& x) {
      PenaltyOptions o;
      o.gradient = false;
      return penaltySum(unflatten(p, x), cfg, world, o).value;
    };
    const Eigen::VectorXd fd = testkit::centralDifference(F, flatten(p), 1e-4);
    const Eigen::VectorXd an = flatten(r.gradient);
    EXPECT_TRUE(testkit::gradientsAgree(an, fd, 1e-4, 1e-6)) << "trial " << trial;
  }
}

TEST(PenaltySum, QuadratureConvergesQuadratically) {
  std::mt19937 rng(77);
  const TrajectoryParams p = randomParams(rng);
  PenaltyConfig cfg;
  cfg.thrustMin = 0.5;
  cfg.thrustMax = 1.0;  // violated everywhere
  cfg.weights = {1.0, 0.0, 0.0, 0.0};
  std::vector<double> J;
  for (int k : {8, 16, 32, 64}) {
    cfg.samples = {k};
    J.push_back(penaltySum(p, cfg, World{}).familyCosts[0]);
  }
  const double order1 = std::log2(std::abs(J[1] - J[0]) / std::abs(J[2] - J[1]));
  const double order2 = std::log2(std::abs(J[2] - J[1]) / std::abs(J[3] - J[2]));
  EXPECT_GE(order1, 1.8);
  EXPECT_GE(order2, 1.8);
}

TEST(PenaltySum, HingeIsSmoothAcrossActivation) {
  // Slide f_max through the thrust range: value and its derivative stay continuous.
  std::mt19937 rng(78);
  const TrajectoryParams p = randomParams(rng);
  PenaltyConfig cfg;
  cfg.weights = {1.0, 0.0, 0.0, 0.0};
  cfg.thrustMin = 0.0;
  auto J = [&](double fmax) {
    cfg.thrustMax = fmax;
    return penaltySum(p, cfg, World{}).value;
  };
  double prevSlope = std::nan("");
  for (double f = 9.0; f <= 14.0; f += 0.01) {
    const double h = 1e-5;
    const double slope = (J(f + h) - J(f - h)) / (2 * h);
    if (!std::isnan(prevSlope)) EXPECT_LE(std::abs(slope - prevSlope), 0.05 * std::max(1.0, std::abs(slope)));
    prevSlope = slope;
  }
}

TEST(PenaltySum, RecordsAndCsv) {
  std::mt19937 rng(79);
  PenaltyOptions o;
  o.records = true;
  const PenaltyResult r = penaltySum(randomParams(rng), activeConfig(), activeWorld(), o);
  EXPECT_EQ(r.records.size(), 13u + 10u);
  std::ostringstream out;
  writeConstraintCsv(out, r.records);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# schema: racetraj-constraints/v1");
  std::getline(in, line);
  EXPECT_EQ(line, "t,segment,sample,f,omega_norm,G_t,G_b,G_g,G_d");
}
