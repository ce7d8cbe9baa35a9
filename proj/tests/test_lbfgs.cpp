#include "racetraj/lbfgs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

using namespace racetraj;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  g.setZero(x.size());
  double f = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i), b = 1.0 - x(i);
    f += 100.0 * a * a + b * b;
    g(i) += -400.0 * a * x(i) - 2.0 * b;
    g(i + 1) += 200.0 * a;
  }
  return f;
}

}  // namespace

TEST(Lbfgs, Rosenbrock) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(10, -1.2);
  LbfgsParams params;
  params.gradTolerance = 1e-8;
  params.deltaTolerance = 0.0;
  params.maxIterations = 2000;
  const LbfgsResult r = lbfgsMinimize(x, rosenbrock, params);
  EXPECT_EQ(r.status, LbfgsStatus::Converged);
  EXPECT_LE((x - Eigen::VectorXd::Ones(10)).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Lbfgs, MonotoneAcceptedCosts) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(6, 2.0);
  std::vector<double> costs;
  lbfgsMinimize(x, rosenbrock, {}, [&](const Eigen::VectorXd&, double f, const Eigen::VectorXd&, int) {
    costs.push_back(f);
    return true;
  });
  ASSERT_GT(costs.size(), 2u);
  for (std::size_t i = 1; i < costs.size(); ++i) EXPECT_LE(costs[i], costs[i - 1]);
}

TEST(Lbfgs, StationaryStart) {
  Eigen::VectorXd x = Eigen::VectorXd::Ones(4);
  const LbfgsResult r = lbfgsMinimize(x, rosenbrock);
  EXPECT_EQ(r.status, LbfgsStatus::Converged);
  EXPECT_EQ(r.iterations, 0);
}

TEST(Lbfgs, RejectsInfiniteTrialPoints) {
  // Barrier objective; trial points with x >= 2 are rejected.
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    if (x(0) >= 2.0) return std::numeric_limits<double>::infinity();
    g.resize(1);
    g(0) = 2.0 * (x(0) - 3.0) + 1.0 / (2.0 - x(0));
    return (x(0) - 3.0) * (x(0) - 3.0) - std::log(2.0 - x(0));
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  const LbfgsResult r = lbfgsMinimize(x, f);
  EXPECT_TRUE(std::isfinite(r.cost));
  EXPECT_LT(x(0), 2.0);
  EXPECT_NEAR(x(0), (5.0 - std::sqrt(3.0)) / 2.0, 1e-5);
}

TEST(Lbfgs, NonFiniteStartThrows) {
  auto f = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
    g.setZero(1);
    return std::nan("");
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  EXPECT_THROW(lbfgsMinimize(x, f), std::runtime_error);
}

TEST(Lbfgs, CancelledByProgress) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(6, -1.2);
  const LbfgsResult r =
      lbfgsMinimize(x, rosenbrock, {}, [](const Eigen::VectorXd&, double, const Eigen::VectorXd&, int it) { return it < 3; });
  EXPECT_EQ(r.status, LbfgsStatus::Cancelled);
  EXPECT_EQ(toString(r.status), "cancelled");
}
