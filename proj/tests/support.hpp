#pragma once

#include "racetraj/minco.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>

namespace racetraj::testkit {

inline Eigen::MatrixXd randomMatrix(std::mt19937& rng, int rows, int cols, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline MincoProblem randomMinco(std::mt19937& rng, int s, int M, bool uniformTimes = false) {
  MincoProblem p;
  p.order = s;
  p.head = randomMatrix(rng, 3, s, 2.0);
  p.tail = randomMatrix(rng, 3, s, 2.0);
  p.waypoints = randomMatrix(rng, 3, M - 1, 5.0);
  p.durations.resize(M);
  const double h = uniform(rng, 0.3, 2.0);
  for (int i = 0; i < M; ++i) p.durations(i) = uniformTimes ? h : uniform(rng, 0.3, 2.0);
  return p;
}

/// Central difference of f along every entry of x.
inline Eigen::VectorXd centralDifference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    xp(i) = xi + h;
    const double fp = f(xp);
    xp(i) = xi - h;
    const double fm = f(xp);
    xp(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - b_i| / max(|b_i|, floor).
inline double maxRelativeError(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1.0) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a(i) - b(i)) / std::max(std::abs(b(i)), floor));
  }
  return worst;
}

/// True when every entry agrees within rel relative or abs absolute, whichever is looser.
inline bool gradientsAgree(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double rel, double abs) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double err = std::abs(a(i) - b(i));
    if (err > abs && err > rel * std::abs(b(i))) return false;
  }
  return true;
}

}  // namespace racetraj::testkit
