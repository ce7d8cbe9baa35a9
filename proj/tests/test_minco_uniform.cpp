#include "racetraj/costs.hpp"
#include "racetraj/errors.hpp"
#include "racetraj/minco_uniform.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <stdexcept>

using namespace racetraj;
using racetraj::testkit::randomMatrix;
using racetraj::testkit::randomMinco;

TEST(ScaleDiagonal, Values) {
  EXPECT_EQ(scaleDiagonal(1.0, 6), Eigen::VectorXd::Ones(6));
  EXPECT_EQ(scaleDiagonal(2.0, 3), Eigen::Vector3d(1, 2, 4));
  const Eigen::VectorXd prod = scaleDiagonal(0.37, 3).cwiseProduct(scaleDiagonal(1.0 / 0.37, 3));
  EXPECT_LE((prod - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(scaleDiagonal(1.0, 0), std::invalid_argument);
}

TEST(ScaleDiagonal, RoundTrip) {
  std::mt19937 rng(40);
  const Eigen::VectorXd block = randomMatrix(rng, 6, 1);
  const double h = 0.83;
  const Eigen::VectorXd back = block.cwiseProduct(scaleDiagonal(h, 6)).cwiseProduct(scaleDiagonal(1.0 / h, 6));
  EXPECT_LE((back - block).cwiseAbs().maxCoeff(), 1e-13);
}

namespace {

MincoProblem uniformProblem(std::mt19937& rng, int s, int M, double T) {
  MincoProblem p = randomMinco(rng, s, M);
  p.durations = Eigen::VectorXd::Constant(M, T / M);
  return p;
}

}  // namespace

TEST(UniformMinco, UnitScaleLeavesCoefficientsUnchanged) {
  std::mt19937 rng(41);
  const int M = 4;
  const MincoProblem p = uniformProblem(rng, 3, M, M);
  UniformMinco u(std::make_shared<UniformMincoCache>(3, M));
  u.solve(M, p.head, p.tail, p.waypoints);
  EXPECT_LE((u.coefficients() - u.normalizedCoefficients()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(UniformMinco, MatchesGeneralSolve) {
  std::mt19937 rng(42);
  const MincoProblem p = uniformProblem(rng, 3, 4, 2.7);
  const UniformMincoCache cache(3, 4);
  const Eigen::MatrixXd C = solveUniform(cache, 2.7, p.head, p.tail, p.waypoints);
  const Eigen::MatrixXd G = solveMinco(p);
  EXPECT_LE((C - G).cwiseAbs().maxCoeff(), 1e-9 * G.cwiseAbs().maxCoeff());
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE((pieceDerivative(C, 3, i, 2.7 / 4, 0) - p.waypoints.col(i)).norm(), 1e-9);
  }
}

TEST(UniformMinco, RejectsBadInputs) {
  std::mt19937 rng(43);
  const MincoProblem p = uniformProblem(rng, 3, 3, 1.0);
  UniformMinco u(std::make_shared<UniformMincoCache>(3, 3));
  EXPECT_THROW(u.solve(0.0, p.head, p.tail, p.waypoints), std::domain_error);
  EXPECT_THROW(u.solve(-2.0, p.head, p.tail, p.waypoints), std::domain_error);
  EXPECT_THROW(u.solve(1.0, p.head, p.tail, Eigen::MatrixXd::Zero(3, 1)), ContractError);
  u.solve(1.0, p.head, p.tail, p.waypoints);
  EXPECT_THROW(u.backprop(Eigen::MatrixXd::Zero(6, 3), 0.0), ContractError);
}

TEST(UniformMinco, ZeroTrajectoryHasZeroTimeGradient) {
  UniformMinco u(std::make_shared<UniformMincoCache>(3, 4));
  u.solve(1.3, Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3));
  std::mt19937 rng(44);
  const UniformMincoGradient g = u.backprop(randomMatrix(rng, 24, 3), 0.0);
  EXPECT_EQ(g.duration, 0.0);
}

TEST(UniformMinco, SmoothnessTimeGradient) {
  std::mt19937 rng(45);
  const int M = 4;
  const MincoProblem p = uniformProblem(rng, 3, M, 3.1);
  auto cache = std::make_shared<UniformMincoCache>(3, M);
  auto cost = [&](double T, UniformMincoGradient* grad) {
    UniformMinco u(cache);
    u.solve(T, p.head, p.tail, p.waypoints);
    TrajectoryParams tp;
    tp.order = 3;
    tp.coeffs = {u.coefficients()};
    tp.pieces = {M};
    tp.durations = Eigen::VectorXd::Constant(1, T);
    const SmoothnessCost sc = smoothnessTimeCost(tp, 0.0);
    if (grad) *grad = u.backprop(sc.gradient.coeffs[0], sc.gradient.durations(0));
    return sc.value;
  };
  UniformMincoGradient g;
  cost(3.1, &g);
  const double h = 1e-6;
  const double fd = (cost(3.1 + h, nullptr) - cost(3.1 - h, nullptr)) / (2 * h);
  EXPECT_NEAR(g.duration, fd, 1e-4 * std::abs(fd));
}

TEST(UniformMinco, BackpropMatchesGeneral) {
  std::mt19937 rng(46);
  for (int trial = 0; trial < 200; ++trial) {
    const int s = 3 + trial % 2;
    const int M = 2 + trial % 7;
    const double T = testkit::uniform(rng, 0.5, 6.0);
    const MincoProblem p = uniformProblem(rng, s, M, T);
    UniformMinco u(std::make_shared<UniformMincoCache>(s, M));
    u.solve(T, p.head, p.tail, p.waypoints);
    Minco general(p);
    const double scale = general.coefficients().cwiseAbs().maxCoeff();
    ASSERT_LE((u.coefficients() - general.coefficients()).cwiseAbs().maxCoeff(), 1e-9 * scale) << trial;

    const Eigen::MatrixXd W = randomMatrix(rng, 2 * s * M, 3);
    const double wT = testkit::uniform(rng, -1, 1);
    const UniformMincoGradient gu = u.backprop(W, wT);
    const MincoGradient gg = general.backprop(W, Eigen::VectorXd::Constant(M, wT));
    const double gscale = std::max(1.0, gg.head.cwiseAbs().maxCoeff());
    EXPECT_LE((gu.head - gg.head).cwiseAbs().maxCoeff(), 1e-6 * gscale) << trial;
    EXPECT_LE((gu.tail - gg.tail).cwiseAbs().maxCoeff(), 1e-6 * gscale) << trial;
    EXPECT_LE((gu.waypoints - gg.waypoints).cwiseAbs().maxCoeff(), 1e-6 * gscale) << trial;
    // Every piece lasts T/M and the explicit term wT * T equals wT * sum_i T_i.
    const double expectT = gg.durations.sum() / M;
    EXPECT_NEAR(gu.duration, expectT, 1e-6 * std::max(1.0, std::abs(expectT))) << trial;
  }
}

TEST(UniformMincoCacheSet, ReusesEntries) {
  UniformMincoCacheSet set;
  const auto a = set.get(3, 4);
  EXPECT_EQ(a, set.get(3, 4));
  EXPECT_EQ(a, set.find(3, 4));
  EXPECT_EQ(nullptr, set.find(3, 5));
}
