#include "racetraj/minco.hpp"

#include "racetraj/errors.hpp"
#include "racetraj/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace racetraj {

void MincoProblem::validate() const {
  const int s = order;
  const int M = pieces();
  if (s < 1) throw ContractError("MincoProblem: order must be >= 1");
  if (M < 1) throw ContractError("MincoProblem: at least one piece required");
  const int m = dimension();
  if (m < 1 || head.cols() != s || tail.rows() != m || tail.cols() != s) {
    throw ContractError("MincoProblem: boundary states must be m x s");
  }
  if (waypoints.rows() != (M > 1 ? m : waypoints.rows()) || waypoints.cols() != M - 1) {
    throw ContractError("MincoProblem: waypoints must be m x (M-1)");
  }
  for (int i = 0; i < M; ++i) {
    if (!(durations(i) > 0.0) || !std::isfinite(durations(i))) {
      throw std::domain_error("MincoProblem: piece duration T_" + std::to_string(i) +
                              " must be positive and finite");
    }
  }
}

int mincoLowerBandwidth(int order) { return order + 1; }
int mincoUpperBandwidth(int order) { return order - 1; }

void fillMincoMatrix(int order, const Eigen::VectorXd& durations, BandedMatrix& A) {
  const int s = order;
  const int d = 2 * s;
  const int M = static_cast<int>(durations.size());
  const int n = d * M;
  if (A.size() != n || A.lower() != s + 1 || A.upper() != s - 1) {
    A.reset(n, s + 1, s - 1);
  } else {
    A.setZero();
  }
  for (int k = 0; k < s; ++k) A(k, k) = fallingFactorial(k, k);

  for (int i = 0; i + 1 < M; ++i) {
    const int row = s + d * i;
    const int left = d * i;
    const int right = d * (i + 1);
    const double T = durations(i);
    double p = 1.0;
    for (int j = 0; j < d; ++j) {
      A(row, left + j) = p;
      p *= T;
    }
    for (int k = 0; k <= d - 2; ++k) {
      const int r = row + 1 + k;
      double q = 1.0;
      for (int j = k; j < d; ++j) {
        A(r, left + j) = fallingFactorial(j, k) * q;
        q *= T;
      }
      A(r, right + k) = -fallingFactorial(k, k);
    }
  }

  const int row = n - s;
  const int left = d * (M - 1);
  const double T = durations(M - 1);
  for (int k = 0; k < s; ++k) {
    double q = 1.0;
    for (int j = k; j < d; ++j) {
      A(row + k, left + j) = fallingFactorial(j, k) * q;
      q *= T;
    }
  }
}

void fillMincoRhs(int order, const Eigen::MatrixXd& head, const Eigen::MatrixXd& tail,
                  const Eigen::MatrixXd& waypoints, Eigen::MatrixXd& rhs) {
  const int s = order;
  const int d = 2 * s;
  const int M = static_cast<int>(waypoints.cols()) + 1;
  const int m = static_cast<int>(head.rows());
  rhs.setZero(d * M, m);
  rhs.topRows(s) = head.transpose();
  for (int i = 0; i + 1 < M; ++i) rhs.row(s + d * i) = waypoints.col(i).transpose();
  rhs.bottomRows(s) = tail.transpose();
}

MincoSystem assemble(const MincoProblem& problem) {
  problem.validate();
  MincoSystem sys;
  fillMincoMatrix(problem.order, problem.durations, sys.matrix);
  fillMincoRhs(problem.order, problem.head, problem.tail, problem.waypoints, sys.rhs);
  return sys;
}

void Minco::setProblem(const MincoProblem& problem) {
  problem.validate();
  problem_ = problem;
  BandedMatrix A;
  fillMincoMatrix(problem.order, problem.durations, A);
  fillMincoRhs(problem.order, problem.head, problem.tail, problem.waypoints, coeffs_);
  lu_.factorize(std::move(A));
  lu_.solveInPlace(coeffs_);
}

Eigen::VectorXd pieceDerivative(const Eigen::MatrixXd& coeffs, int order, int piece,
                                double t, int k) {
  const int d = 2 * order;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.cols());
  for (int j = d - 1; j >= k; --j) {
    out = out * t + fallingFactorial(j, k) * coeffs.row(d * piece + j).transpose();
  }
  return out;
}

MincoGradient Minco::backprop(const Eigen::MatrixXd& gradCoeffs,
                              const Eigen::VectorXd& gradDurations) const {
  const int s = problem_.order;
  const int d = 2 * s;
  const int M = problem_.pieces();
  const int m = problem_.dimension();
  if (gradCoeffs.rows() != d * M || gradCoeffs.cols() != m ||
      gradDurations.size() != M) {
    throw ContractError("Minco::backprop: gradient dimensions do not match the problem");
  }
  Eigen::MatrixXd adj = gradCoeffs;
  lu_.solveTransposedInPlace(adj);

  MincoGradient g;
  g.head = adj.topRows(s).transpose();
  g.tail = adj.bottomRows(s).transpose();
  g.waypoints.resize(m, M - 1);
  for (int i = 0; i + 1 < M; ++i) g.waypoints.col(i) = adj.row(s + d * i).transpose();

  // dF/dT_i = explicit - sum_r adj_r . (dM/dT_i C)_r ; the rows touched by T_i
  // evaluate piece i at its end, and d/dT of beta^(k)(T)^T c is p^(k+1)(T).
  g.durations = gradDurations;
  for (int i = 0; i + 1 < M; ++i) {
    const int row = s + d * i;
    const double T = problem_.durations(i);
    double acc = adj.row(row).dot(pieceDerivative(coeffs_, s, i, T, 1).transpose());
    for (int k = 0; k <= d - 2; ++k) {
      acc += adj.row(row + 1 + k).dot(pieceDerivative(coeffs_, s, i, T, k + 1).transpose());
    }
    g.durations(i) -= acc;
  }
  {
    const double T = problem_.durations(M - 1);
    double acc = 0.0;
    for (int k = 0; k < s; ++k) {
      acc += adj.row(d * M - s + k).dot(pieceDerivative(coeffs_, s, M - 1, T, k + 1).transpose());
    }
    g.durations(M - 1) -= acc;
  }
  return g;
}

Eigen::MatrixXd solveMinco(const MincoProblem& problem) {
  return Minco(problem).coefficients();
}

}  // namespace racetraj
