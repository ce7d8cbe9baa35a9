#include "racetraj/banded.hpp"

#include "racetraj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace racetraj {

BandedMatrix::BandedMatrix(int n, int lower, int upper) { reset(n, lower, upper); }

void BandedMatrix::reset(int n, int lower, int upper) {
  if (n <= 0 || lower < 0 || upper < 0) {
    throw std::invalid_argument("BandedMatrix: invalid shape");
  }
  n_ = n;
  kl_ = lower;
  ku_ = upper;
  band_.setZero(2 * kl_ + ku_ + 1, n_);
}

void BandedMatrix::setZero() { band_.setZero(); }

double BandedMatrix::operator()(int i, int j) const {
  const int r = kl_ + ku_ + i - j;
  if (r < 0 || r >= band_.rows()) return 0.0;
  return band_(r, j);
}

Eigen::MatrixXd BandedMatrix::multiply(const Eigen::MatrixXd& x) const {
  if (x.rows() != n_) throw ContractError("BandedMatrix::multiply: size mismatch");
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n_, x.cols());
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - kl_);
    const int j1 = std::min(n_ - 1, i + ku_);
    for (int j = j0; j <= j1; ++j) y.row(i) += (*this)(i, j) * x.row(j);
  }
  return y;
}

Eigen::MatrixXd BandedMatrix::toDense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - kl_);
    const int j1 = std::min(n_ - 1, i + ku_);
    for (int j = j0; j <= j1; ++j) d(i, j) = (*this)(i, j);
  }
  return d;
}

BandedLU::BandedLU(BandedMatrix matrix) { factorize(std::move(matrix)); }

void BandedLU::factorize(BandedMatrix matrix) {
  lu_ = std::move(matrix);
  const int n = lu_.n_;
  const int kl = lu_.kl_;
  const int kv = lu_.kl_ + lu_.ku_;
  auto& ab = lu_.band_;
  auto a = [&](int i, int j) -> double& { return ab(kv + i - j, j); };

  double scale = ab.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) scale = 1.0;
  const double tiny = 1e-14 * scale;

  pivots_.assign(n, 0);
  int ju = 0;  // last column touched by U so far
  for (int j = 0; j < n; ++j) {
    const int km = std::min(kl, n - 1 - j);
    int jp = 0;
    double best = std::abs(a(j, j));
    for (int p = 1; p <= km; ++p) {
      const double v = std::abs(a(j + p, j));
      if (v > best) {
        best = v;
        jp = p;
      }
    }
    pivots_[j] = j + jp;
    if (!(best > tiny) || !std::isfinite(best)) {
      throw SolverError("banded PLU: singular pivot at index " + std::to_string(j), j);
    }
    ju = std::max(ju, std::min(j + lu_.ku_ + jp, n - 1));
    if (jp != 0) {
      for (int c = j; c <= ju; ++c) std::swap(a(j, c), a(j + jp, c));
    }
    if (km > 0) {
      const double inv = 1.0 / a(j, j);
      for (int r = 1; r <= km; ++r) a(j + r, j) *= inv;
      for (int c = j + 1; c <= ju; ++c) {
        const double u = a(j, c);
        if (u == 0.0) continue;
        for (int r = 1; r <= km; ++r) a(j + r, c) -= a(j + r, j) * u;
      }
    }
  }
}

void BandedLU::solveInPlace(Eigen::MatrixXd& b) const {
  const int n = lu_.n_;
  if (b.rows() != n) throw ContractError("BandedLU::solve: size mismatch");
  const int kl = lu_.kl_;
  const int kv = lu_.kl_ + lu_.ku_;
  for (int j = 0; j + 1 < n; ++j) {
    const int lm = std::min(kl, n - 1 - j);
    if (pivots_[j] != j) b.row(j).swap(b.row(pivots_[j]));
    for (int r = 1; r <= lm; ++r) {
      const double l = at(j + r, j);
      if (l != 0.0) b.row(j + r) -= l * b.row(j);
    }
  }
  for (int j = n - 1; j >= 0; --j) {
    b.row(j) /= at(j, j);
    const int i0 = std::max(0, j - kv);
    for (int i = i0; i < j; ++i) {
      const double u = at(i, j);
      if (u != 0.0) b.row(i) -= u * b.row(j);
    }
  }
}

void BandedLU::solveTransposedInPlace(Eigen::MatrixXd& b) const {
  const int n = lu_.n_;
  if (b.rows() != n) throw ContractError("BandedLU::solveTransposed: size mismatch");
  const int kl = lu_.kl_;
  const int kv = lu_.kl_ + lu_.ku_;
  // U^T y = b
  for (int j = 0; j < n; ++j) {
    const int i0 = std::max(0, j - kv);
    for (int i = i0; i < j; ++i) {
      const double u = at(i, j);
      if (u != 0.0) b.row(j) -= u * b.row(i);
    }
    b.row(j) /= at(j, j);
  }
  // L^T with the interchanges undone in reverse order
  for (int j = n - 2; j >= 0; --j) {
    const int lm = std::min(kl, n - 1 - j);
    for (int r = 1; r <= lm; ++r) {
      const double l = at(j + r, j);
      if (l != 0.0) b.row(j) -= l * b.row(j + r);
    }
    if (pivots_[j] != j) b.row(j).swap(b.row(pivots_[j]));
  }
}

Eigen::MatrixXd BandedLU::solve(const Eigen::MatrixXd& b) const {
  Eigen::MatrixXd x = b;
  solveInPlace(x);
  return x;
}

Eigen::MatrixXd BandedLU::solveTransposed(const Eigen::MatrixXd& b) const {
  Eigen::MatrixXd x = b;
  solveTransposedInPlace(x);
  return x;
}

}  // namespace racetraj
