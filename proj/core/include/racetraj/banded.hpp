#pragma once

#include <Eigen/Dense>

#include <vector>

namespace racetraj {

/// Square banded matrix in LAPACK-style band storage, with room for the
/// fill-in created by partial pivoting (kl extra superdiagonals).
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int n, int lower, int upper);

  void reset(int n, int lower, int upper);
  void setZero();

  int size() const { return n_; }
  int lower() const { return kl_; }
  int upper() const { return ku_; }

  /// Entry (i, j). Only |i - j| inside the declared band may be written.
  double& operator()(int i, int j) { return band_(kl_ + ku_ + i - j, j); }
  double operator()(int i, int j) const;
  bool inBand(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

  Eigen::MatrixXd multiply(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd toDense() const;

 private:
  friend class BandedLU;
  int n_ = 0;
  int kl_ = 0;
  int ku_ = 0;
  // (2 kl + ku + 1) x n; column j holds rows j-(kl+ku) .. j+kl.
  Eigen::MatrixXd band_;
};

/// Banded PLU factorization with partial pivoting confined to the band.
/// Solves cost O(n (kl + ku)) per right-hand-side column.
class BandedLU {
 public:
  BandedLU() = default;
  /// Factorizes in place. Throws SolverError carrying the failing pivot index.
  explicit BandedLU(BandedMatrix matrix);

  void factorize(BandedMatrix matrix);

  int size() const { return lu_.n_; }

  /// Overwrites B with A^{-1} B.
  void solveInPlace(Eigen::MatrixXd& b) const;
  /// Overwrites B with A^{-T} B.
  void solveTransposedInPlace(Eigen::MatrixXd& b) const;

  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;
  Eigen::MatrixXd solveTransposed(const Eigen::MatrixXd& b) const;

 private:
  double at(int i, int j) const { return lu_.band_(lu_.kl_ + lu_.ku_ + i - j, j); }

  BandedMatrix lu_;
  std::vector<int> pivots_;
};

}  // namespace racetraj
