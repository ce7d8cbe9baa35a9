#include "racetraj/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace racetraj {

std::string toString(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::Converged: return "converged";
    case LbfgsStatus::Stalled: return "stalled";
    case LbfgsStatus::MaxIterations: return "max_iterations";
    case LbfgsStatus::LineSearchFailed: return "line_search_failed";
    case LbfgsStatus::Cancelled: return "cancelled";
  }
  return "unknown";
}

namespace {

enum class SearchOutcome { Accepted, Failed };

SearchOutcome lineSearch(Eigen::VectorXd& x, double& f, Eigen::VectorXd& g, double& step,
                         const Eigen::VectorXd& dir, const Eigen::VectorXd& xp, double fp,
                         const Eigen::VectorXd& gp, const Objective& objective,
                         const LbfgsParams& params, int& evaluations) {
  const double dginit = gp.dot(dir);
  if (!(dginit < 0.0)) return SearchOutcome::Failed;
  const double dgtest = params.armijo * dginit;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  bool bracketed = false;

  for (int count = 1;; ++count) {
    x = xp + step * dir;
    f = objective(x, g);
    ++evaluations;
    if (!std::isfinite(f) || f > fp + step * dgtest) {
      hi = step;
      bracketed = true;
    } else {
      if (g.dot(dir) < params.wolfe * dginit) {
        lo = step;
      } else {
        return SearchOutcome::Accepted;
      }
    }
    if (count >= params.maxLinesearch) break;
    if (bracketed && (hi - lo) < std::numeric_limits<double>::epsilon() * hi) break;
    step = bracketed ? 0.5 * (lo + hi) : 2.0 * step;
    if (step < params.minStep || step > params.maxStep) break;
  }
  // A trial that satisfied Armijo but not curvature still lowers the cost.
  if (lo > 0.0) {
    step = lo;
    x = xp + step * dir;
    f = objective(x, g);
    ++evaluations;
    if (std::isfinite(f) && f <= fp + step * dgtest) return SearchOutcome::Accepted;
  }
  x = xp;
  f = fp;
  g = gp;
  return SearchOutcome::Failed;
}

}  // namespace

LbfgsResult lbfgsMinimize(Eigen::VectorXd& x, const Objective& objective,
                          const LbfgsParams& params, const Progress& progress) {
  const auto n = x.size();
  const int mem = std::max(1, params.memory);
  LbfgsResult res;

  Eigen::VectorXd g(n);
  double f = objective(x, g);
  res.evaluations = 1;
  if (!std::isfinite(f) || !g.allFinite()) {
    throw std::runtime_error("lbfgs: objective is not finite at the initial iterate");
  }
  res.cost = f;

  auto gradConverged = [&](const Eigen::VectorXd& xv, const Eigen::VectorXd& gv) {
    const double xn = std::max(1.0, xv.lpNorm<Eigen::Infinity>());
    return gv.lpNorm<Eigen::Infinity>() / xn < params.gradTolerance;
  };
  if (n == 0 || gradConverged(x, g)) {
    res.status = LbfgsStatus::Converged;
    return res;
  }

  Eigen::MatrixXd S(n, mem), Y(n, mem);
  Eigen::VectorXd rho(mem), alpha(mem);
  std::vector<double> history(std::max(1, params.past), f);
  int stored = 0;
  int head = 0;

  Eigen::VectorXd d = -g;
  double step = 1.0 / std::max(d.norm(), 1e-300);
  Eigen::VectorXd xp(n), gp(n);

  for (int k = 1;; ++k) {
    xp = x;
    gp = g;
    const double fp = f;
    const auto outcome = lineSearch(x, f, g, step, d, xp, fp, gp, objective, params, res.evaluations);
    if (outcome == SearchOutcome::Failed) {
      res.status = LbfgsStatus::LineSearchFailed;
      res.cost = f;
      res.iterations = k - 1;
      return res;
    }
    res.cost = f;
    res.iterations = k;

    if (progress && !progress(x, f, g, k)) {
      res.status = LbfgsStatus::Cancelled;
      return res;
    }
    if (gradConverged(x, g)) {
      res.status = LbfgsStatus::Converged;
      return res;
    }
    if (params.past > 0) {
      if (k >= params.past) {
        const double old = history[k % params.past];
        if (std::abs(old - f) / std::max(1.0, std::abs(f)) < params.deltaTolerance) {
          res.status = LbfgsStatus::Stalled;
          return res;
        }
      }
      history[k % params.past] = f;
    }
    if (k >= params.maxIterations) {
      res.status = LbfgsStatus::MaxIterations;
      return res;
    }

    // Cautious update keeps the inverse Hessian approximation positive definite.
    const Eigen::VectorXd s = x - xp;
    const Eigen::VectorXd y = g - gp;
    const double ys = y.dot(s);
    if (ys > 1e-12 * gp.norm() * s.squaredNorm()) {
      S.col(head) = s;
      Y.col(head) = y;
      rho(head) = 1.0 / ys;
      head = (head + 1) % mem;
      stored = std::min(stored + 1, mem);
    }

    d = -g;
    int idx = head;
    for (int i = 0; i < stored; ++i) {
      idx = (idx + mem - 1) % mem;
      alpha(idx) = rho(idx) * S.col(idx).dot(d);
      d -= alpha(idx) * Y.col(idx);
    }
    if (stored > 0) {
      const int last = (head + mem - 1) % mem;
      d *= 1.0 / (rho(last) * Y.col(last).squaredNorm());
    }
    for (int i = 0; i < stored; ++i) {
      const double beta = rho(idx) * Y.col(idx).dot(d);
      d += S.col(idx) * (alpha(idx) - beta);
      idx = (idx + 1) % mem;
    }
    step = 1.0;
    if (stored == 0) step = 1.0 / std::max(d.norm(), 1e-300);
  }
}

}  // namespace racetraj
