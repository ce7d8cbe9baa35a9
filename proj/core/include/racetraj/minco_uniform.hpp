#pragma once

#include "racetraj/banded.hpp"
#include "racetraj/minco.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <utility>

namespace racetraj {

/// Diagonal of S_y(x) = Diag(1, x, ..., x^{y-1}).
Eigen::VectorXd scaleDiagonal(double x, int size);

/// Offline banded PLU factors of the unit-duration mapping matrix M(1) for one
/// (order, pieces) pair. Immutable; share freely across threads.
class UniformMincoCache {
 public:
  UniformMincoCache(int order, int pieces);

  int order() const { return order_; }
  int pieces() const { return pieces_; }
  const BandedLU& factors() const { return lu_; }

 private:
  int order_;
  int pieces_;
  BandedLU lu_;
};

using UniformMincoCachePtr = std::shared_ptr<const UniformMincoCache>;

/// Read-only set of caches keyed by (order, pieces).
class UniformMincoCacheSet {
 public:
  UniformMincoCachePtr get(int order, int pieces);
  UniformMincoCachePtr find(int order, int pieces) const;

 private:
  std::map<std::pair<int, int>, UniformMincoCachePtr> caches_;
};

struct UniformMincoGradient {
  Eigen::MatrixXd head;       // m x s
  Eigen::MatrixXd tail;       // m x s
  Eigen::MatrixXd waypoints;  // m x (M-1)
  double duration = 0.0;      // dF/dT for the whole segment
};

/// Time-uniform MINCO segment of total duration T split into M equal pieces.
///
/// Boundary derivatives are normalized to unit piece duration, the constant
/// system M(1) C̄ = b(Q, z̄^o, z̄^f) is solved with the cached factors, and each
/// piece block is rescaled by S_{2s}(M/T). No factorization happens online.
class UniformMinco {
 public:
  UniformMinco() = default;
  explicit UniformMinco(UniformMincoCachePtr cache) : cache_(std::move(cache)) {}

  /// Throws std::domain_error when T <= 0, ContractError on shape mismatch.
  void solve(double duration, const Eigen::MatrixXd& head, const Eigen::MatrixXd& tail,
             const Eigen::MatrixXd& waypoints);

  const Eigen::MatrixXd& coefficients() const { return coeffs_; }
  const Eigen::MatrixXd& normalizedCoefficients() const { return normalized_; }
  double duration() const { return duration_; }
  const UniformMincoCache& cache() const { return *cache_; }

  /// gradCoeffs is dF/dĈ (2Ms x m); gradDuration is the explicit dF/dT.
  UniformMincoGradient backprop(const Eigen::MatrixXd& gradCoeffs, double gradDuration) const;

 private:
  UniformMincoCachePtr cache_;
  double duration_ = 0.0;
  Eigen::MatrixXd head_;
  Eigen::MatrixXd tail_;
  Eigen::MatrixXd normalized_;
  Eigen::MatrixXd coeffs_;
  mutable Eigen::MatrixXd work_;
};

/// One-shot helper: Ĉ for a uniform segment using the given cache.
Eigen::MatrixXd solveUniform(const UniformMincoCache& cache, double duration,
                             const Eigen::MatrixXd& head, const Eigen::MatrixXd& tail,
                             const Eigen::MatrixXd& waypoints);

}  // namespace racetraj
