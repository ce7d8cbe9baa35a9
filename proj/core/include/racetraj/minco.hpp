#pragma once

#include "racetraj/banded.hpp"

#include <Eigen/Dense>

namespace racetraj {

/// Inputs of the MINCO linear mapping M(T) C = b(Q, z^o, z^f).
///
/// Coefficients are stacked per piece: rows [2s*i, 2s*i + 2s) of C hold the
/// power-basis coefficients of piece i, one column per spatial dimension.
struct MincoProblem {
  int order = 3;                 // s; pieces have degree 2s-1
  Eigen::MatrixXd head;          // m x s, derivatives 0..s-1 at the start
  Eigen::MatrixXd tail;          // m x s, derivatives 0..s-1 at the end
  Eigen::MatrixXd waypoints;     // m x (M-1), positions at interior junctions
  Eigen::VectorXd durations;     // M piece durations

  int pieces() const { return static_cast<int>(durations.size()); }
  int dimension() const { return static_cast<int>(head.rows()); }
  /// Throws ContractError on inconsistent shapes, std::domain_error on T_i <= 0.
  void validate() const;
};

/// Gradients of F(C(z^o, z^f, Q, T), T) with respect to the mapping inputs.
struct MincoGradient {
  Eigen::MatrixXd head;       // m x s
  Eigen::MatrixXd tail;       // m x s
  Eigen::MatrixXd waypoints;  // m x (M-1)
  Eigen::VectorXd durations;  // M
};

/// Row layout, per interior junction i: one waypoint pin, then continuity of
/// derivative orders 0..2s-2. The head block has s rows, the tail block s rows.
/// Bandwidths: lower s+1, upper s-1.
int mincoLowerBandwidth(int order);
int mincoUpperBandwidth(int order);

/// Fills the 2Ms x 2Ms mapping matrix for the given piece durations.
void fillMincoMatrix(int order, const Eigen::VectorXd& durations, BandedMatrix& matrix);
/// Fills the 2Ms x m right-hand side from boundary states and waypoints.
void fillMincoRhs(int order, const Eigen::MatrixXd& head, const Eigen::MatrixXd& tail,
                  const Eigen::MatrixXd& waypoints, Eigen::MatrixXd& rhs);

struct MincoSystem {
  BandedMatrix matrix;
  Eigen::MatrixXd rhs;
};

MincoSystem assemble(const MincoProblem& problem);

/// General MINCO: assembles, factorizes (online banded PLU) and solves for C.
/// Keeps the factorization for adjoint solves.
class Minco {
 public:
  Minco() = default;
  explicit Minco(const MincoProblem& problem) { setProblem(problem); }

  void setProblem(const MincoProblem& problem);

  const MincoProblem& problem() const { return problem_; }
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }

  /// Chains dF/dC (2Ms x m) and explicit dF/dT (M) back to the inputs using
  /// transpose solves with the stored factorization.
  MincoGradient backprop(const Eigen::MatrixXd& gradCoeffs,
                         const Eigen::VectorXd& gradDurations) const;

 private:
  MincoProblem problem_;
  BandedLU lu_;
  Eigen::MatrixXd coeffs_;
};

/// Convenience wrapper around Minco.
Eigen::MatrixXd solveMinco(const MincoProblem& problem);

/// Derivative `k` of piece `piece` at local time t, read from stacked coefficients.
Eigen::VectorXd pieceDerivative(const Eigen::MatrixXd& coeffs, int order, int piece,
                                double t, int k);

}  // namespace racetraj
