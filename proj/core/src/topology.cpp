#include "racetraj/errors.hpp"
#include "racetraj/planner.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace racetraj {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<TopologyCandidate> topologyCandidates(const ProblemSetup& setup, const DecisionVariables& seed,
                                                  int obstacleIndex) {
  const auto& obstacle = setup.obstacles.at(static_cast<std::size_t>(obstacleIndex));
  PlanningProblem problem(setup, nullptr);
  const Eigen::VectorXd x = problem.pack(seed);
  const SegmentedTrajectory traj = problem.trajectory(x);
  const Eigen::Matrix3d H = obstacle.shapeMatrix();

  constexpr int kScan = 400;
  double tStar = traj.startTime();
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double t = traj.startTime() + traj.totalTime() * i / kScan;
    const double e = ellipsoidLevel(H, traj.evaluate(t, 0), obstacle.center(t).position);
    if (e < best) {
      best = e;
      tStar = t;
    }
  }

  Eigen::Vector3d tangent = traj.evaluate(tStar, 1);
  tangent = tangent.norm() > 1e-6 ? Eigen::Vector3d(tangent.normalized()) : Eigen::Vector3d::UnitX();
  Eigen::Vector3d lateral = Eigen::Vector3d::UnitZ().cross(tangent);
  lateral = lateral.norm() > 1e-6 ? Eigen::Vector3d(lateral.normalized()) : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d vertical = tangent.cross(lateral).normalized();
  const double threshold = setup.config.effectivePenalty().obstacleThreshold;
  const double offset = obstacle.semiAxes.maxCoeff() * std::sqrt(threshold) + setup.config.topologyClearance;

  // Detour window: long enough to clear the obstacle at the local speed and to
  // keep the bump's lateral acceleration within a quarter of the thrust limit.
  const double speed = std::max(traj.evaluate(tStar, 1).norm(), 1e-3);
  const double extent = obstacle.semiAxes.maxCoeff() + offset;
  const double lateralAccel = 0.25 * setup.config.penalty.thrustMax;
  double halfWidth = std::max(extent / speed, kPi * std::sqrt(extent / (2.0 * lateralAccel)));

  // Gates are pinned, so the window stays inside the segment holding tStar.
  std::vector<double> arrivals;
  double segStart = traj.startTime();
  double segEnd = traj.endTime();
  for (int n = 0; n < traj.segmentCount(); ++n) {
    arrivals.push_back(traj.segmentEnd(n));
    if (traj.segmentStart(n) <= tStar && tStar <= traj.segmentEnd(n)) {
      segStart = traj.segmentStart(n);
      segEnd = traj.segmentEnd(n);
    }
  }
  const double widthBefore = std::min(halfWidth, tStar - segStart);
  const double widthAfter = std::min(halfWidth, segEnd - tStar);

  std::vector<TopologyCandidate> out;
  TopologyCandidate base;
  base.label = "seed";
  base.initial = seed;
  out.push_back(base);
  const std::pair<const char*, Eigen::Vector3d> dirs[] = {
      {"left", lateral}, {"right", -lateral}, {"up", vertical}, {"down", -vertical}};
  for (const auto& [label, dir] : dirs) {
    // Position on the detour: the seed, pushed off the moving center by `offset`
    // along `dir`, blended in with a cos^2 window around tStar.
    auto position = [&, dir = dir](double t) -> Eigen::Vector3d {
      const double tc = std::clamp(t, traj.startTime(), traj.endTime());
      const Eigen::Vector3d p = traj.evaluate(tc, 0);
      const double width = tc < tStar ? widthBefore : widthAfter;
      if (!(width > 0.0)) return p;
      const double u = (tc - tStar) / width;
      if (std::abs(u) >= 1.0) return p;
      const double w = std::pow(std::cos(0.5 * kPi * u), 2);
      Eigen::Vector3d shift = obstacle.center(tc).position + offset * dir - p;
      shift -= shift.dot(tangent) * tangent;
      return p + w * shift;
    };
    ReferencePath ref = [&position](double t, int k) -> Eigen::Vector3d {
      constexpr double h = 1e-3;
      switch (k) {
        case 0: return position(t);
        case 1: return (position(t + h) - position(t - h)) / (2.0 * h);
        case 2: return (position(t + h) - 2.0 * position(t) + position(t - h)) / (h * h);
        default:
          return (position(t + 2 * h) - 2.0 * position(t + h) + 2.0 * position(t - h) - position(t - 2 * h)) /
                 (2.0 * h * h * h);
      }
    };
    TopologyCandidate c;
    c.label = label;
    c.initial = seedFromReference(setup, arrivals, ref);
    c.initial.junctionPositions = seed.junctionPositions;
    out.push_back(std::move(c));
  }
  return out;
}

int selectFastest(const std::vector<TopologyCandidate>& candidates) {
  int best = -1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].feasible) continue;
    if (best < 0 || candidates[i].result.totalTime < candidates[static_cast<std::size_t>(best)].result.totalTime) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

TopologyResult planMultiTopology(const ProblemSetup& setup, const DecisionVariables& seed, int obstacleIndex,
                                 std::shared_ptr<const UniformMincoCacheSet> caches) {
  if (!caches) caches = makeCaches(setup.config, setup.segmentCount());
  TopologyResult out;
  out.candidates = topologyCandidates(setup, seed, obstacleIndex);

  auto run = [&setup, &caches](TopologyCandidate& c) {
    try {
      PlanningProblem problem(setup, caches);
      c.result = optimize(problem, c.initial);
      c.feasible = c.result.feasible(setup.config.feasibilityTolerance);
      c.length = trajectoryLength(c.result.trajectory);
    } catch (const std::exception& e) {
      c.error = e.what();
      c.feasible = false;
    }
  };
  const std::size_t batch = setup.config.threads > 0 ? static_cast<std::size_t>(setup.config.threads)
                                                     : out.candidates.size();
  for (std::size_t start = 0; start < out.candidates.size(); start += batch) {
    std::vector<std::future<void>> jobs;
    const std::size_t stop = std::min(out.candidates.size(), start + batch);
    for (std::size_t i = start; i < stop; ++i) {
      jobs.push_back(std::async(std::launch::async, run, std::ref(out.candidates[i])));
    }
    for (auto& j : jobs) j.get();
  }

  out.selected = selectFastest(out.candidates);
  if (out.selected < 0) {
    std::ostringstream msg;
    msg << "no feasible topology candidate:";
    for (const auto& c : out.candidates) {
      msg << " [" << c.label << ": ";
      if (!c.error.empty()) {
        msg << c.error;
      } else {
        const auto& r = c.result.residuals;
        msg << "thrust " << r.thrust << ", rate " << r.bodyRate << ", gap " << r.gap << ", obstacle " << r.obstacle;
      }
      msg << "]";
    }
    throw PlanningError(msg.str());
  }
  return out;
}

}  // namespace racetraj
