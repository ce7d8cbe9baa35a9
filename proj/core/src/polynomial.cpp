#include "racetraj/polynomial.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace racetraj {

Eigen::VectorXd basis(double x, int order) {
  if (order < 0) throw std::invalid_argument("basis: negative order");
  Eigen::VectorXd b(order + 1);
  double p = 1.0;
  for (int j = 0; j <= order; ++j) {
    b(j) = p;
    p *= x;
  }
  return b;
}

double fallingFactorial(int j, int k) {
  if (k > j) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(j - i);
  return r;
}

Eigen::VectorXd basisDerivative(double x, int order, int k) {
  if (order < 0 || k < 0) throw std::invalid_argument("basisDerivative: negative order");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(order + 1);
  double p = 1.0;
  for (int j = k; j <= order; ++j) {
    b(j) = fallingFactorial(j, k) * p;
    p *= x;
  }
  return b;
}

PolynomialPiece::PolynomialPiece(Eigen::MatrixXd coeffs, double duration)
    : coeffs_(std::move(coeffs)), duration_(duration) {
  if (!(duration_ > 0.0) || !std::isfinite(duration_)) {
    throw std::invalid_argument("PolynomialPiece: duration must be positive and finite");
  }
  if (coeffs_.rows() < 2 || coeffs_.rows() % 2 != 0) {
    throw std::invalid_argument("PolynomialPiece: coefficient rows must be 2s");
  }
}

Eigen::VectorXd PolynomialPiece::evaluate(double t, int k) const {
  const int deg = degree();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs_.cols());
  if (k > deg) return out;
  // Horner on the k-th derivative polynomial.
  for (int j = deg; j >= k; --j) {
    out = out * t + fallingFactorial(j, k) * coeffs_.row(j).transpose();
  }
  return out;
}

SegmentedTrajectory::SegmentedTrajectory(double startTime, int order,
                                         std::vector<std::vector<PolynomialPiece>> segments)
    : startTime_(startTime), order_(order), segments_(std::move(segments)) {
  if (segments_.empty()) throw std::invalid_argument("SegmentedTrajectory: no segments");
  boundaries_.assign(1, startTime_);
  const int m = segments_.front().empty() ? 0 : segments_.front().front().dimension();
  for (const auto& seg : segments_) {
    if (seg.empty()) throw std::invalid_argument("SegmentedTrajectory: empty segment");
    const double h = seg.front().duration();
    double sum = 0.0;
    for (const auto& piece : seg) {
      if (piece.coeffs().rows() != 2 * order_ || piece.dimension() != m) {
        throw std::invalid_argument("SegmentedTrajectory: piece shape mismatch");
      }
      if (std::abs(piece.duration() - h) > 1e-12 * std::max(1.0, h)) {
        throw std::invalid_argument("SegmentedTrajectory: pieces within a segment must share one duration");
      }
      sum += piece.duration();
    }
    boundaries_.push_back(boundaries_.back() + sum);
  }
}

SegmentedTrajectory SegmentedTrajectory::fromCoefficients(
    double startTime, int order, const std::vector<Eigen::MatrixXd>& coeffs,
    const std::vector<int>& piecesPerSegment, const Eigen::VectorXd& durations) {
  const auto n = coeffs.size();
  if (piecesPerSegment.size() != n || static_cast<std::size_t>(durations.size()) != n) {
    throw std::invalid_argument("fromCoefficients: inconsistent segment counts");
  }
  const int rows = 2 * order;
  std::vector<std::vector<PolynomialPiece>> segments(n);
  for (std::size_t s = 0; s < n; ++s) {
    const int pieces = piecesPerSegment[s];
    if (coeffs[s].rows() != rows * pieces) {
      throw std::invalid_argument("fromCoefficients: coefficient block has wrong row count");
    }
    const double h = durations(static_cast<Eigen::Index>(s)) / pieces;
    segments[s].reserve(pieces);
    for (int i = 0; i < pieces; ++i) {
      segments[s].emplace_back(coeffs[s].middleRows(rows * i, rows), h);
    }
  }
  return SegmentedTrajectory(startTime, order, std::move(segments));
}

int SegmentedTrajectory::dimension() const {
  return segments_.empty() ? 0 : segments_.front().front().dimension();
}

double SegmentedTrajectory::totalTime() const {
  double total = 0.0;
  for (int n = 0; n < segmentCount(); ++n) total += segmentDuration(n);
  return total;
}

double SegmentedTrajectory::segmentDuration(int n) const {
  const auto& seg = segments_.at(n);
  return seg.front().duration() * static_cast<double>(seg.size());
}

Eigen::VectorXd SegmentedTrajectory::evaluate(double t, int derivOrder) const {
  if (segments_.empty()) throw std::domain_error("evaluate: empty trajectory");
  if (derivOrder < 0 || derivOrder > 2 * order_ - 1) {
    throw std::domain_error("evaluate: derivative order outside [0, 2s-1]");
  }
  if (!(t >= startTime_ && t <= endTime())) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "evaluate: t = " << t << " outside valid interval ["
        << startTime_ << ", " << endTime() << "]";
    throw std::domain_error(msg.str());
  }
  const int nseg = segmentCount();
  int n = 0;
  while (n + 1 < nseg && t >= boundaries_[n + 1]) ++n;
  const auto& seg = segments_[n];
  const double h = seg.front().duration();
  const int pieces = static_cast<int>(seg.size());
  double local = t - boundaries_[n];
  int i = 0;
  while (i + 1 < pieces && local >= (i + 1) * h) ++i;
  local -= i * h;
  return seg[i].evaluate(local, derivOrder);
}

void writeTrajectoryCsv(std::ostream& out, const SegmentedTrajectory& traj, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("writeTrajectoryCsv: rate must be positive");
  if (traj.dimension() != 3) throw std::invalid_argument("writeTrajectoryCsv: 3-D trajectory required");
  out << "# schema: " << kTrajectoryCsvSchema << "\n";
  out << "t,px,py,pz,vx,vy,vz,ax,ay,az,jx,jy,jz\n";
  out << std::setprecision(10);
  const double t0 = traj.startTime();
  const double t1 = traj.endTime();
  const auto count = static_cast<long>(std::floor((t1 - t0) * rate));
  auto row = [&](double t) {
    out << t;
    for (int k = 0; k <= 3; ++k) {
      const Eigen::VectorXd v = traj.evaluate(t, k);
      out << ',' << v(0) << ',' << v(1) << ',' << v(2);
    }
    out << '\n';
  };
  for (long i = 0; i <= count; ++i) {
    const double t = t0 + static_cast<double>(i) / rate;
    if (t < t1) row(t);
  }
  row(t1);
}

}  // namespace racetraj
