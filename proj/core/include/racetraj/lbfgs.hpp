#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace racetraj {

struct LbfgsParams {
  int memory = 16;
  double gradTolerance = 1e-6;   // ||g||_inf / max(1, ||x||_inf)
  int past = 3;                  // window for the relative-decrease test
  double deltaTolerance = 1e-5;  // |f_{k-past} - f_k| / max(1, |f_k|)
  int maxIterations = 5000;
  int maxLinesearch = 64;
  double minStep = 1e-20;
  double maxStep = 1e20;
  double armijo = 1e-4;
  double wolfe = 0.9;
};

enum class LbfgsStatus {
  Converged,         // gradient tolerance met
  Stalled,           // relative decrease below tolerance
  MaxIterations,
  LineSearchFailed,  // best iterate returned
  Cancelled,         // progress callback asked to stop
};

std::string toString(LbfgsStatus status);

struct LbfgsResult {
  LbfgsStatus status = LbfgsStatus::MaxIterations;
  double cost = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Returns f(x) and writes the gradient. May return +inf to reject a trial point.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;
/// Called after each accepted step; return false to stop.
using Progress = std::function<bool(const Eigen::VectorXd& x, double f, const Eigen::VectorXd& g, int iteration)>;

/// Limited-memory BFGS with a bracketing weak-Wolfe line search. Accepted steps
/// satisfy the Armijo condition, so the cost never increases; x holds the best
/// iterate on return. Throws std::runtime_error when f(x0) is not finite.
LbfgsResult lbfgsMinimize(Eigen::VectorXd& x, const Objective& objective,
                          const LbfgsParams& params = {}, const Progress& progress = {});

}  // namespace racetraj
