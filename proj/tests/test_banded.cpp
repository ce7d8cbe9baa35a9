#include "racetraj/banded.hpp"
#include "racetraj/errors.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace racetraj;

namespace {

BandedMatrix randomBanded(std::mt19937& rng, int n, int kl, int ku) {
  BandedMatrix A(n, kl, ku);
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i) A(i, j) = testkit::uniform(rng, -1, 1);
  return A;
}

}  // namespace

TEST(BandedLU, SmallBackwardError) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 5 + trial, kl = 1 + trial % 4, ku = trial % 3;
    const BandedMatrix A = randomBanded(rng, n, kl, ku);
    const Eigen::MatrixXd dense = A.toDense();
    const Eigen::MatrixXd b = testkit::randomMatrix(rng, n, 3);
    const BandedLU lu(A);
    const Eigen::MatrixXd x = lu.solve(b);
    const Eigen::MatrixXd y = lu.solveTransposed(b);
    const double scale = dense.cwiseAbs().maxCoeff();
    EXPECT_LE((dense * x - b).cwiseAbs().maxCoeff(), 1e-12 * scale * std::max(1.0, x.cwiseAbs().maxCoeff()));
    EXPECT_LE((dense.transpose() * y - b).cwiseAbs().maxCoeff(), 1e-12 * scale * std::max(1.0, y.cwiseAbs().maxCoeff()));
  }
}

TEST(BandedLU, MatchesDenseLUWhenWellConditioned) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 5 + trial, kl = 1 + trial % 4, ku = trial % 3;
    BandedMatrix A = randomBanded(rng, n, kl, ku);
    for (int i = 0; i < n; ++i) A(i, i) += (i % 2 ? 4.0 : -4.0);
    const Eigen::MatrixXd dense = A.toDense();
    const Eigen::MatrixXd b = testkit::randomMatrix(rng, n, 3);
    const BandedLU lu(A);
    EXPECT_LE((lu.solve(b) - dense.partialPivLu().solve(b)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((lu.solveTransposed(b) - dense.transpose().partialPivLu().solve(b)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BandedMatrix, MultiplyMatchesDense) {
  std::mt19937 rng(12);
  const BandedMatrix A = randomBanded(rng, 9, 3, 2);
  const Eigen::MatrixXd x = testkit::randomMatrix(rng, 9, 2);
  EXPECT_TRUE(A.multiply(x).isApprox(A.toDense() * x, 1e-14));
  EXPECT_FALSE(A.inBand(0, 3));
  EXPECT_TRUE(A.inBand(3, 0));
}

TEST(BandedLU, NeedsPivoting) {
  BandedMatrix A(3, 1, 1);
  A(0, 0) = 0.0;
  A(0, 1) = 1.0;
  A(1, 0) = 1.0;
  A(1, 1) = 0.0;
  A(1, 2) = 1.0;
  A(2, 1) = 1.0;
  A(2, 2) = 1.0;
  const Eigen::Vector3d b(1, 2, 3);
  const Eigen::VectorXd x = BandedLU(A).solve(b);
  EXPECT_TRUE((A.toDense() * x).isApprox(b, 1e-14));
}

TEST(BandedLU, SingularReportsPivot) {
  BandedMatrix A(4, 1, 1);
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  A(3, 3) = 1.0;
  try {
    BandedLU lu(A);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.pivot(), 2);
  }
}
