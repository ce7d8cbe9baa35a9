#include "racetraj/minco_uniform.hpp"

#include "racetraj/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace racetraj {

Eigen::VectorXd scaleDiagonal(double x, int size) {
  if (size < 1) throw std::invalid_argument("scaleDiagonal: size must be >= 1");
  Eigen::VectorXd d(size);
  double p = 1.0;
  for (int i = 0; i < size; ++i) {
    d(i) = p;
    p *= x;
  }
  return d;
}

UniformMincoCache::UniformMincoCache(int order, int pieces) : order_(order), pieces_(pieces) {
  if (order < 1 || pieces < 1) throw ContractError("UniformMincoCache: invalid (s, M)");
  BandedMatrix A;
  fillMincoMatrix(order, Eigen::VectorXd::Ones(pieces), A);
  lu_.factorize(std::move(A));
}

UniformMincoCachePtr UniformMincoCacheSet::get(int order, int pieces) {
  auto& slot = caches_[{order, pieces}];
  if (!slot) slot = std::make_shared<const UniformMincoCache>(order, pieces);
  return slot;
}

UniformMincoCachePtr UniformMincoCacheSet::find(int order, int pieces) const {
  auto it = caches_.find({order, pieces});
  return it == caches_.end() ? nullptr : it->second;
}

void UniformMinco::solve(double duration, const Eigen::MatrixXd& head,
                         const Eigen::MatrixXd& tail, const Eigen::MatrixXd& waypoints) {
  if (!cache_) throw ContractError("UniformMinco: no cache attached");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::domain_error("UniformMinco: segment duration must be positive and finite");
  }
  const int s = cache_->order();
  const int M = cache_->pieces();
  const int d = 2 * s;
  const auto m = head.rows();
  if (head.cols() != s || tail.cols() != s || tail.rows() != m ||
      waypoints.cols() != M - 1 || (M > 1 && waypoints.rows() != m)) {
    throw ContractError("UniformMinco: boundary or waypoint shape mismatch");
  }
  duration_ = duration;
  head_ = head;
  tail_ = tail;
  const double h = duration / M;

  normalized_.setZero(d * M, m);
  double p = 1.0;
  for (int k = 0; k < s; ++k) {
    normalized_.row(k) = p * head.col(k).transpose();
    normalized_.row(d * M - s + k) = p * tail.col(k).transpose();
    p *= h;
  }
  for (int i = 0; i + 1 < M; ++i) normalized_.row(s + d * i) = waypoints.col(i).transpose();
  cache_->factors().solveInPlace(normalized_);

  coeffs_.resize(d * M, m);
  const double inv = 1.0 / h;
  for (int i = 0; i < M; ++i) {
    double q = 1.0;
    for (int j = 0; j < d; ++j) {
      coeffs_.row(d * i + j) = q * normalized_.row(d * i + j);
      q *= inv;
    }
  }
}

UniformMincoGradient UniformMinco::backprop(const Eigen::MatrixXd& gradCoeffs,
                                            double gradDuration) const {
  const int s = cache_->order();
  const int M = cache_->pieces();
  const int d = 2 * s;
  const auto m = coeffs_.cols();
  if (gradCoeffs.rows() != d * M || gradCoeffs.cols() != m) {
    throw ContractError("UniformMinco::backprop: gradient dimensions do not match");
  }
  const double h = duration_ / M;
  const double inv = 1.0 / h;

  // Rescaling channel: ĉ_ij = c̄_ij h^{-j}.
  double gradH = 0.0;
  work_.resize(d * M, m);
  for (int i = 0; i < M; ++i) {
    double q = 1.0;
    for (int j = 0; j < d; ++j) {
      const auto r = d * i + j;
      work_.row(r) = q * gradCoeffs.row(r);
      if (j > 0) gradH -= j * inv * gradCoeffs.row(r).dot(coeffs_.row(r));
      q *= inv;
    }
  }
  cache_->factors().solveTransposedInPlace(work_);

  UniformMincoGradient g;
  g.head.resize(m, s);
  g.tail.resize(m, s);
  double p = 1.0;      // h^k
  double dp = 0.0;     // k h^{k-1}
  for (int k = 0; k < s; ++k) {
    const auto headAdj = work_.row(k).transpose();
    const auto tailAdj = work_.row(d * M - s + k).transpose();
    g.head.col(k) = p * headAdj;
    g.tail.col(k) = p * tailAdj;
    gradH += dp * (headAdj.dot(head_.col(k)) + tailAdj.dot(tail_.col(k)));
    dp = (k + 1) * p;
    p *= h;
  }
  g.waypoints.resize(m, M - 1);
  for (int i = 0; i + 1 < M; ++i) g.waypoints.col(i) = work_.row(s + d * i).transpose();
  g.duration = gradDuration + gradH / M;
  return g;
}

Eigen::MatrixXd solveUniform(const UniformMincoCache& cache, double duration,
                             const Eigen::MatrixXd& head, const Eigen::MatrixXd& tail,
                             const Eigen::MatrixXd& waypoints) {
  UniformMinco u(std::shared_ptr<const UniformMincoCache>(&cache, [](const UniformMincoCache*) {}));
  u.solve(duration, head, tail, waypoints);
  return u.coefficients();
}

}  // namespace racetraj
