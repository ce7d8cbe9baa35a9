#include "racetraj/replanner.hpp"

#include "racetraj/errors.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <exception>

namespace racetraj {

namespace {
constexpr double kMinSegment = 0.02;  // s
}

Replanner::Replanner(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  caches_ = makeCaches(scenario_.config, scenario_.gateCount());
  global_ = planGlobal(fullSetup(scenario_));
  globalArrivals_ = globalArrivalTimes(global_);
}

void Replanner::reset() {
  current_.reset();
  currentFirstGate_ = 0;
}

std::vector<double> Replanner::warmArrivals(double now, int firstGate, int count) const {
  std::vector<double> out;
  double prev = now;
  for (int i = 0; i < count; ++i) {
    const int g = firstGate + i;
    double t = std::numeric_limits<double>::quiet_NaN();
    if (current_) {
      const int idx = g - currentFirstGate_;
      if (idx >= 0 && idx < static_cast<int>(current_->arrivalTimes.size())) {
        t = std::max(current_->arrivalTimes[static_cast<std::size_t>(idx)], prev + kMinSegment);
      }
    }
    if (std::isnan(t)) {
      const double g0 = g > 0 ? globalArrivals_[static_cast<std::size_t>(g) - 1] : global_.startTime();
      t = prev + std::max(kMinSegment, globalArrivals_[static_cast<std::size_t>(g)] - g0);
    }
    out.push_back(t);
    prev = t;
  }
  return out;
}

ReferencePath Replanner::warmReference(double now, int firstGate, const std::vector<double>& arrivals,
                                       const Eigen::MatrixXd& state) const {
  ReferencePath base = [this, now, firstGate, arrivals](double t, int k) -> Eigen::Vector3d {
    if (current_) {
      const auto& traj = current_->trajectory;
      if (t >= traj.startTime() && t < traj.endTime() - 1e-9) return traj.evaluate(t, k);
    }
    std::size_t i = 0;
    while (i + 1 < arrivals.size() && t > arrivals[i]) ++i;
    const int g = firstGate + static_cast<int>(i);
    const double g1 = globalArrivals_[static_cast<std::size_t>(g)];
    const double g0 = g > 0 ? globalArrivals_[static_cast<std::size_t>(g) - 1] : global_.startTime();
    const double t0 = i > 0 ? arrivals[i - 1] : now;
    const double scale = (g1 - g0) / (arrivals[i] - t0);
    const double tg = std::clamp(g0 + (t - t0) * scale, global_.startTime(), global_.endTime());
    return global_.evaluate(tg, k) * std::pow(scale, k);
  };

  // The measured state rarely lies on the reference. Blend the offset out over
  // the first segment with a quintic that zeroes it (through acceleration) at
  // the first gate, so the seeded waypoints agree with the start state.
  const double L = arrivals.front() - now;
  const int orders = std::min<int>(static_cast<int>(state.cols()), 3);
  std::array<Eigen::Vector3d, 3> offset;
  for (int k = 0; k < 3; ++k) {
    offset[static_cast<std::size_t>(k)] =
        k < orders ? Eigen::Vector3d(state.col(k) - base(now, k)) : Eigen::Vector3d::Zero();
  }
  // Quintic Hermite basis in u = (t - now) / L, power coefficients u^0..u^5.
  static constexpr double kBasis[3][6] = {{1, 0, 0, -10, 15, -6}, {0, 1, 0, -6, 8, -3}, {0, 0, 0.5, -1.5, 1.5, -0.5}};
  return [base, now, L, offset](double t, int k) -> Eigen::Vector3d {
    Eigen::Vector3d out = base(t, k);
    if (!(L > 0.0) || t >= now + L) return out;
    const double u = std::max(0.0, (t - now) / L);
    for (int b = 0; b < 3; ++b) {
      double value = 0.0;
      for (int j = k; j < 6; ++j) {
        double falling = 1.0;
        for (int q = 0; q < k; ++q) falling *= j - q;
        value += kBasis[b][j] * falling * std::pow(u, j - k);
      }
      out += offset[static_cast<std::size_t>(b)] * value * std::pow(L, b - k);
    }
    return out;
  };
}

PlanResult Replanner::replanStep(double now, const Eigen::MatrixXd& state, int nextGate) {
  const auto started = std::chrono::steady_clock::now();
  const auto deadline = started + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double, std::milli>(scenario_.config.deadlineMs));
  const int count = std::min(scenario_.config.horizon, scenario_.gateCount() - nextGate);
  if (nextGate < 0 || count < 1) throw ContractError("no gates left to plan through");
  if (!state.allFinite()) throw std::invalid_argument("current state must be finite");

  PlanResult result;
  bool fresh = false;
  std::exception_ptr failure;
  try {
    ProblemSetup setup = horizonSetup(scenario_, now, state, nextGate, count);
    const int last = nextGate + count - 1;
    if (last + 1 < scenario_.gateCount()) {
      // Intermediate horizon: keep flying through the last gate like the global plan does.
      const double tg = globalArrivals_[static_cast<std::size_t>(last)];
      for (int k = 1; k < setup.terminalDerivatives.cols() + 1; ++k) {
        setup.terminalDerivatives.col(k - 1) = global_.evaluate(tg, k);
      }
    }
    PlanningProblem problem(setup, caches_);
    const std::vector<double> arrivals = warmArrivals(now, nextGate, count);
    const DecisionVariables init = seedFromReference(setup, arrivals, warmReference(now, nextGate, arrivals, state));
    OptimizeOptions opts;
    opts.deadline = deadline;
    result = optimize(problem, init, opts);
    fresh = result.status != LbfgsStatus::Cancelled;
  } catch (const PlanningError&) {
    failure = std::current_exception();
  }
  const double latency =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

  if (!fresh) {
    if (current_) {
      PlanResult stale = *current_;
      stale.stale = true;
      stale.latencyMs = latency;
      return stale;
    }
    if (failure) std::rethrow_exception(failure);
    result.stale = true;
  }
  result.latencyMs = latency;
  if (fresh) {
    current_ = result;
    currentFirstGate_ = nextGate;
  }
  return result;
}

}  // namespace racetraj
