#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace racetraj {

/// Natural power basis (1, x, x^2, ..., x^order).
Eigen::VectorXd basis(double x, int order);

/// k-th derivative of the natural basis: entry j holds j!/(j-k)! x^(j-k).
Eigen::VectorXd basisDerivative(double x, int order, int k);

/// Falling factorial j!/(j-k)!, zero when k > j.
double fallingFactorial(int j, int k);

/// One polynomial piece p(t) = coeffs^T beta(t) on [0, duration].
/// coeffs has 2s rows (basis powers 0..2s-1) and one column per spatial dimension.
class PolynomialPiece {
 public:
  PolynomialPiece(Eigen::MatrixXd coeffs, double duration);

  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  double duration() const { return duration_; }
  int degree() const { return static_cast<int>(coeffs_.rows()) - 1; }
  int dimension() const { return static_cast<int>(coeffs_.cols()); }

  /// k-th derivative at local time t (not range-checked).
  Eigen::VectorXd evaluate(double t, int k = 0) const;

 private:
  Eigen::MatrixXd coeffs_;
  double duration_;
};

/// A sequence of segments, each made of time-uniform polynomial pieces.
/// Segment n spans [t_{n-1}, t_n] with t_n = t_0 + sum_{j<=n} T_j.
/// Immutable after construction.
class SegmentedTrajectory {
 public:
  SegmentedTrajectory() = default;
  SegmentedTrajectory(double startTime, int order,
                      std::vector<std::vector<PolynomialPiece>> segments);

  /// Builds segment n from a stacked (2s*M_n) x m coefficient block with
  /// uniform piece duration T_n / M_n.
  static SegmentedTrajectory fromCoefficients(
      double startTime, int order, const std::vector<Eigen::MatrixXd>& coeffs,
      const std::vector<int>& piecesPerSegment, const Eigen::VectorXd& durations);

  int order() const { return order_; }
  int dimension() const;
  int segmentCount() const { return static_cast<int>(segments_.size()); }
  const std::vector<PolynomialPiece>& segment(int n) const { return segments_.at(n); }

  double startTime() const { return startTime_; }
  double endTime() const { return boundaries_.back(); }
  double totalTime() const;
  double segmentDuration(int n) const;
  /// Timestamp t_n at the end of segment n (t_{-1} = startTime()).
  double segmentEnd(int n) const { return boundaries_.at(n + 1); }
  double segmentStart(int n) const { return boundaries_.at(n); }

  /// Evaluates derivative `derivOrder` at absolute time t. At a junction the
  /// right-hand piece is used. Throws std::domain_error outside [t_0, t_N].
  Eigen::VectorXd evaluate(double t, int derivOrder = 0) const;

 private:
  double startTime_ = 0.0;
  int order_ = 3;
  std::vector<std::vector<PolynomialPiece>> segments_;
  std::vector<double> boundaries_{0.0};
};

/// Writes "t,px,py,pz,vx,vy,vz,ax,ay,az,jx,jy,jz" rows sampled at `rate` Hz,
/// always including the final timestamp. Requires a 3-D trajectory.
void writeTrajectoryCsv(std::ostream& out, const SegmentedTrajectory& traj, double rate);

inline constexpr const char* kTrajectoryCsvSchema = "racetraj-trajectory/v1";

}  // namespace racetraj
