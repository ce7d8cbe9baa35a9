#include "racetraj/planner.hpp"

#include "racetraj/errors.hpp"
#include "racetraj/minco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace racetraj {

int PlannerConfig::piecesFor(int segment) const {
  if (pieces.empty()) throw ContractError("pieces per segment is empty");
  if (pieces.size() == 1) return pieces.front();
  return pieces.at(static_cast<std::size_t>(segment));
}

PenaltyConfig PlannerConfig::effectivePenalty() const {
  PenaltyConfig p = penalty;
  p.thrustMin += margins.thrust;
  p.thrustMax -= margins.thrust;
  p.bodyRateMax -= margins.bodyRate;
  p.obstacleThreshold += margins.obstacle;
  return p;
}

void PlannerConfig::validate() const {
  if (order < 2) throw std::invalid_argument("order must be at least 2");
  if (pieces.empty()) throw std::invalid_argument("pieces per segment is empty");
  for (int m : pieces) {
    if (m < 1) throw std::invalid_argument("pieces per segment must be positive");
  }
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be non-negative");
  if (!(softGateWeight >= 0.0)) throw std::invalid_argument("soft gate weight must be non-negative");
  if (!(feasibilityTolerance > 0.0)) throw std::invalid_argument("feasibility tolerance must be positive");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (!(deadlineMs > 0.0)) throw std::invalid_argument("deadline must be positive");
  if (!(nominalSpeed > 0.0)) throw std::invalid_argument("nominal speed must be positive");
  if (margins.thrust < 0.0 || margins.bodyRate < 0.0 || margins.gap < 0.0 || margins.obstacle < 0.0) {
    throw std::invalid_argument("constraint margins must be non-negative");
  }
  if (!(topologyClearance >= 0.0)) throw std::invalid_argument("topology clearance must be non-negative");
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
  penalty.validate();
  effectivePenalty().validate();
}

void ProblemSetup::validate() const {
  config.validate();
  const int s = config.order;
  if (gates.empty()) throw std::invalid_argument("problem needs at least one gate");
  if (startState.rows() != 3 || startState.cols() != s) {
    throw ContractError("start state must be 3 x order");
  }
  if (terminalDerivatives.rows() != 3 || terminalDerivatives.cols() != s - 1) {
    throw ContractError("terminal derivatives must be 3 x (order - 1)");
  }
  if (!startState.allFinite() || !terminalDerivatives.allFinite()) {
    throw std::invalid_argument("boundary states must be finite");
  }
  if (config.pieces.size() != 1 && static_cast<int>(config.pieces.size()) < segmentCount()) {
    throw ContractError("pieces per segment has fewer entries than segments");
  }
  if (config.penalty.samples.size() != 1 &&
      static_cast<int>(config.penalty.samples.size()) < segmentCount()) {
    throw ContractError("samples per segment has fewer entries than segments");
  }
  for (const auto& g : gates) validateMotion(g.motion);
  for (const auto& o : obstacles) o.validate();
  if (gap && (gap->gate < 0 || gap->gate >= segmentCount())) {
    throw std::invalid_argument("gap gate is outside the horizon");
  }
}

std::shared_ptr<const UniformMincoCacheSet> makeCaches(const PlannerConfig& config, int segments) {
  auto set = std::make_shared<UniformMincoCacheSet>();
  const int count = config.pieces.size() == 1 ? 1 : std::min<int>(segments, static_cast<int>(config.pieces.size()));
  for (int n = 0; n < count; ++n) set->get(config.order, config.piecesFor(n));
  return set;
}

PlanningProblem::PlanningProblem(ProblemSetup setup, std::shared_ptr<const UniformMincoCacheSet> caches)
    : setup_(std::move(setup)), caches_(std::move(caches)) {
  setup_.validate();
  const auto& cfg = setup_.config;
  if (!caches_) caches_ = makeCaches(cfg, setup_.segmentCount());
  penalty_ = cfg.effectivePenalty();
  penaltyWorld_.obstacles = setup_.obstacles;
  penaltyWorld_.gap = setup_.gap;
  if (penaltyWorld_.gap) {
    penaltyWorld_.gap->thetaTol -= cfg.margins.gap;
    if (!(penaltyWorld_.gap->thetaTol > 0.0)) throw std::invalid_argument("gap margin exceeds tolerance");
  }

  const int N = setup_.segmentCount();
  const int s = cfg.order;
  offsetTau_ = 3 * (s - 1) * (N - 1);
  offsetQ_ = offsetTau_ + N;
  offsetQn_.resize(static_cast<std::size_t>(N));
  int off = offsetQ_;
  segments_.reserve(static_cast<std::size_t>(N));
  params_.order = s;
  params_.startTime = setup_.startTime;
  params_.coeffs.resize(static_cast<std::size_t>(N));
  params_.pieces.resize(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    const int M = cfg.piecesFor(n);
    auto cache = caches_->find(s, M);
    if (!cache) throw ContractError("no MINCO cache for order " + std::to_string(s) + ", pieces " + std::to_string(M));
    segments_.emplace_back(std::move(cache));
    params_.pieces[static_cast<std::size_t>(n)] = M;
    offsetQn_[static_cast<std::size_t>(n)] = off;
    off += 3 * (M - 1);
  }
  offsetP_ = off;
  variableCount_ = cfg.gateMode == GateMode::Soft ? off + 3 * N : off;
}

Eigen::VectorXd PlanningProblem::pack(const DecisionVariables& vars) const {
  const int N = segmentCount();
  const int s = setup_.config.order;
  if (static_cast<int>(vars.junctionDerivatives.size()) != N - 1 || vars.logDurations.size() != N ||
      static_cast<int>(vars.waypoints.size()) != N) {
    throw ContractError("decision variables do not match the problem");
  }
  Eigen::VectorXd x(variableCount_);
  for (int n = 0; n + 1 < N; ++n) {
    const auto& Z = vars.junctionDerivatives[static_cast<std::size_t>(n)];
    if (Z.rows() != 3 || Z.cols() != s - 1) throw ContractError("junction derivative block has wrong shape");
    x.segment(3 * (s - 1) * n, 3 * (s - 1)) = Eigen::Map<const Eigen::VectorXd>(Z.data(), Z.size());
  }
  x.segment(offsetTau_, N) = vars.logDurations;
  for (int n = 0; n < N; ++n) {
    const auto& Q = vars.waypoints[static_cast<std::size_t>(n)];
    const int M = params_.pieces[static_cast<std::size_t>(n)];
    if (Q.rows() != 3 || Q.cols() != M - 1) throw ContractError("waypoint block has wrong shape");
    x.segment(offsetQn_[static_cast<std::size_t>(n)], Q.size()) = Eigen::Map<const Eigen::VectorXd>(Q.data(), Q.size());
  }
  if (setup_.config.gateMode == GateMode::Soft) {
    if (vars.junctionPositions.rows() != 3 || vars.junctionPositions.cols() != N) {
      throw ContractError("soft mode needs 3 x N junction positions");
    }
    x.segment(offsetP_, 3 * N) = Eigen::Map<const Eigen::VectorXd>(vars.junctionPositions.data(), 3 * N);
  }
  return x;
}

DecisionVariables PlanningProblem::unpack(const Eigen::VectorXd& x) const {
  if (x.size() != variableCount_) throw ContractError("variable vector has wrong size");
  const int N = segmentCount();
  const int s = setup_.config.order;
  DecisionVariables v;
  for (int n = 0; n + 1 < N; ++n) {
    v.junctionDerivatives.push_back(Eigen::Map<const Eigen::MatrixXd>(x.data() + 3 * (s - 1) * n, 3, s - 1));
  }
  v.logDurations = x.segment(offsetTau_, N);
  for (int n = 0; n < N; ++n) {
    const int M = params_.pieces[static_cast<std::size_t>(n)];
    v.waypoints.push_back(Eigen::Map<const Eigen::MatrixXd>(x.data() + offsetQn_[static_cast<std::size_t>(n)], 3, M - 1));
  }
  if (setup_.config.gateMode == GateMode::Soft) {
    v.junctionPositions = Eigen::Map<const Eigen::MatrixXd>(x.data() + offsetP_, 3, N);
  }
  return v;
}

void PlanningProblem::solveSegments(const Eigen::VectorXd& x) {
  if (x.size() != variableCount_) throw ContractError("variable vector has wrong size");
  const int N = segmentCount();
  const int s = setup_.config.order;
  const bool soft = setup_.config.gateMode == GateMode::Soft;

  durations_ = x.segment(offsetTau_, N).array().exp();
  arrivals_.resize(static_cast<std::size_t>(N));
  gatePos_.resize(3, N);
  gateVel_.resize(3, N);
  double t = setup_.startTime;
  for (int n = 0; n < N; ++n) {
    t += durations_(n);
    arrivals_[static_cast<std::size_t>(n)] = t;
    const MotionSample g = setup_.gates[static_cast<std::size_t>(n)].evaluate(t);
    gatePos_.col(n) = g.position;
    gateVel_.col(n) = g.velocity;
  }
  junctionPos_ = soft ? Eigen::MatrixXd(Eigen::Map<const Eigen::MatrixXd>(x.data() + offsetP_, 3, N)) : gatePos_;

  Eigen::MatrixXd head(3, s), tail(3, s);
  for (int n = 0; n < N; ++n) {
    if (n == 0) {
      head = setup_.startState;
    } else {
      head.col(0) = junctionPos_.col(n - 1);
      head.rightCols(s - 1) = Eigen::Map<const Eigen::MatrixXd>(x.data() + 3 * (s - 1) * (n - 1), 3, s - 1);
    }
    tail.col(0) = junctionPos_.col(n);
    if (n + 1 < N) {
      tail.rightCols(s - 1) = Eigen::Map<const Eigen::MatrixXd>(x.data() + 3 * (s - 1) * n, 3, s - 1);
    } else {
      tail.rightCols(s - 1) = setup_.terminalDerivatives;
    }
    const int M = params_.pieces[static_cast<std::size_t>(n)];
    const Eigen::Map<const Eigen::MatrixXd> Q(x.data() + offsetQn_[static_cast<std::size_t>(n)], 3, M - 1);
    segments_[static_cast<std::size_t>(n)].solve(durations_(n), head, tail, Q);
    params_.coeffs[static_cast<std::size_t>(n)] = segments_[static_cast<std::size_t>(n)].coefficients();
  }
  params_.durations = durations_;
}

double PlanningProblem::evaluate(const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
  return evaluateDetailed(x, &grad).total;
}

CostBreakdown PlanningProblem::evaluateDetailed(const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
  solveSegments(x);
  const auto& cfg = setup_.config;
  const int N = segmentCount();
  const int s = cfg.order;
  const bool soft = cfg.gateMode == GateMode::Soft;

  CostBreakdown out;
  const SmoothnessCost sm = smoothnessTimeCost(params_, cfg.rho);
  PenaltyOptions opts;
  opts.gradient = grad != nullptr;
  const PenaltyResult pen = penaltySum(params_, penalty_, penaltyWorld_, opts);
  out.smoothnessTime = sm.value;
  out.penalties = pen.value;
  Eigen::MatrixXd gateResidual;
  if (soft) {
    gateResidual = junctionPos_ - gatePos_;
    out.softGate = cfg.softGateWeight * gateResidual.squaredNorm();
  }
  out.total = out.smoothnessTime + out.penalties + out.softGate;
  if (!grad) return out;

  grad->setZero(variableCount_);
  Eigen::MatrixXd gradP = Eigen::MatrixXd::Zero(3, N);
  Eigen::VectorXd gradT = Eigen::VectorXd::Zero(N);
  for (int n = 0; n < N; ++n) {
    const auto un = static_cast<std::size_t>(n);
    const Eigen::MatrixXd gC = sm.gradient.coeffs[un] + pen.gradient.coeffs[un];
    const double gT = sm.gradient.durations(n) + pen.gradient.durations(n);
    const UniformMincoGradient ug = segments_[un].backprop(gC, gT);
    const int M = params_.pieces[un];
    Eigen::Map<Eigen::MatrixXd>(grad->data() + offsetQn_[un], 3, M - 1) = ug.waypoints;
    if (n > 0) {
      gradP.col(n - 1) += ug.head.col(0);
      Eigen::Map<Eigen::MatrixXd>(grad->data() + 3 * (s - 1) * (n - 1), 3, s - 1) += ug.head.rightCols(s - 1);
    }
    gradP.col(n) += ug.tail.col(0);
    if (n + 1 < N) {
      Eigen::Map<Eigen::MatrixXd>(grad->data() + 3 * (s - 1) * n, 3, s - 1) += ug.tail.rightCols(s - 1);
    }
    gradT(n) += ug.duration;
  }

  // dJ/dg_n, chained to T_k for k <= n through t_n = t_0 + sum_{k<=n} T_k.
  Eigen::MatrixXd gradGate;
  if (soft) {
    gradP += 2.0 * cfg.softGateWeight * gateResidual;
    gradGate = -2.0 * cfg.softGateWeight * gateResidual;
    Eigen::Map<Eigen::MatrixXd>(grad->data() + offsetP_, 3, N) = gradP;
  } else {
    gradGate = gradP;
  }
  double suffix = 0.0;
  for (int n = N - 1; n >= 0; --n) {
    suffix += gradGate.col(n).dot(gateVel_.col(n));
    gradT(n) += suffix;
  }
  grad->segment(offsetTau_, N) = gradT.cwiseProduct(durations_);
  return out;
}

TrajectoryParams PlanningProblem::trajectoryParams(const Eigen::VectorXd& x) {
  solveSegments(x);
  return params_;
}

std::vector<double> PlanningProblem::arrivalTimes(const Eigen::VectorXd& x) const {
  std::vector<double> out;
  double t = setup_.startTime;
  for (int n = 0; n < segmentCount(); ++n) {
    t += std::exp(x(offsetTau_ + n));
    out.push_back(t);
  }
  return out;
}

std::vector<double> PlanningProblem::gateDistances(const Eigen::VectorXd& x) {
  const SegmentedTrajectory traj = trajectory(x);
  std::vector<double> out;
  for (int n = 0; n < segmentCount(); ++n) {
    const double t = traj.segmentEnd(n);
    const Eigen::Vector3d p = traj.evaluate(t, 0);
    out.push_back((p - setup_.gates[static_cast<std::size_t>(n)].evaluate(t).position).norm());
  }
  return out;
}

PenaltyResult PlanningProblem::penaltyReport(const Eigen::VectorXd& x, bool records) {
  solveSegments(x);
  World nominal;
  nominal.obstacles = setup_.obstacles;
  nominal.gap = setup_.gap;
  PenaltyOptions opts;
  opts.gradient = false;
  opts.records = records;
  return penaltySum(params_, setup_.config.penalty, nominal, opts);
}

PenaltyResiduals PlanningProblem::residuals(const Eigen::VectorXd& x) {
  return penaltyReport(x, false).residuals;
}

PlanResult optimize(PlanningProblem& problem, const DecisionVariables& initial, const OptimizeOptions& options) {
  Eigen::VectorXd x = problem.pack(initial);
  {
    Eigen::VectorXd g;
    double f = 0.0;
    try {
      f = problem.evaluate(x, g);
    } catch (const EvaluationError& e) {
      throw PlanningError(std::string("initial iterate cannot be evaluated: ") + e.what());
    }
    if (!std::isfinite(f) || !g.allFinite()) {
      throw PlanningError("initial iterate has a non-finite cost or gradient");
    }
  }

  auto objective = [&problem](const Eigen::VectorXd& v, Eigen::VectorXd& g) {
    try {
      const double f = problem.evaluate(v, g);
      if (!std::isfinite(f) || !g.allFinite()) return std::numeric_limits<double>::infinity();
      return f;
    } catch (const EvaluationError&) {
      return std::numeric_limits<double>::infinity();
    } catch (const std::domain_error&) {
      return std::numeric_limits<double>::infinity();
    } catch (const SolverError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto progress = [&options](const Eigen::VectorXd& v, double f, const Eigen::VectorXd&, int) {
    if (options.onIterate) options.onIterate(v, f);
    return !(options.deadline && std::chrono::steady_clock::now() > *options.deadline);
  };

  const LbfgsResult r = lbfgsMinimize(x, objective, problem.setup().config.lbfgs, progress);

  PlanResult out;
  out.status = r.status;
  out.cost = r.cost;
  out.iterations = r.iterations;
  out.variables = problem.unpack(x);
  out.params = problem.trajectoryParams(x);
  out.trajectory = out.params.toTrajectory();
  out.arrivalTimes = problem.arrivalTimes(x);
  out.gateDistances = problem.gateDistances(x);
  out.totalTime = out.params.durations.sum();
  out.residuals = problem.residuals(x);
  return out;
}

DecisionVariables seedFromReference(const ProblemSetup& setup, const std::vector<double>& arrivals,
                                    const ReferencePath& reference) {
  const int N = setup.segmentCount();
  const int s = setup.config.order;
  if (static_cast<int>(arrivals.size()) != N) throw ContractError("one arrival time per gate is required");
  DecisionVariables v;
  v.logDurations.resize(N);
  v.junctionPositions.resize(3, N);
  double prev = setup.startTime;
  for (int n = 0; n < N; ++n) {
    const double T = arrivals[static_cast<std::size_t>(n)] - prev;
    if (!(T > 0.0)) throw ContractError("arrival times must be strictly increasing");
    v.logDurations(n) = std::log(T);
    const int M = setup.config.piecesFor(n);
    Eigen::MatrixXd Q(3, M - 1);
    for (int i = 1; i < M; ++i) Q.col(i - 1) = reference(prev + T * i / M, 0);
    v.waypoints.push_back(Q);
    if (n + 1 < N) {
      Eigen::MatrixXd Z(3, s - 1);
      for (int k = 1; k < s; ++k) Z.col(k - 1) = reference(arrivals[static_cast<std::size_t>(n)], k);
      v.junctionDerivatives.push_back(Z);
    }
    v.junctionPositions.col(n) = setup.gates[static_cast<std::size_t>(n)].evaluate(arrivals[static_cast<std::size_t>(n)]).position;
    prev = arrivals[static_cast<std::size_t>(n)];
  }
  return v;
}

DecisionVariables straightLineSeed(const ProblemSetup& setup) {
  const int N = setup.segmentCount();
  const double speed = setup.config.nominalSpeed;
  constexpr double kMinDuration = 0.1;
  std::vector<double> times{setup.startTime};
  std::vector<Eigen::Vector3d> points{setup.startState.col(0)};
  for (int n = 0; n < N; ++n) {
    const auto& gate = setup.gates[static_cast<std::size_t>(n)];
    double dt = std::max(kMinDuration, (gate.evaluate(times.back()).position - points.back()).norm() / speed);
    for (int it = 0; it < 5; ++it) {
      dt = std::max(kMinDuration, (gate.evaluate(times.back() + dt).position - points.back()).norm() / speed);
    }
    times.push_back(times.back() + dt);
    points.push_back(gate.evaluate(times.back()).position);
  }

  auto slope = [&](std::size_t i) { return Eigen::Vector3d((points[i + 1] - points[i]) / (times[i + 1] - times[i])); };
  ReferencePath ref = [&](double t, int k) -> Eigen::Vector3d {
    std::size_t i = 0;
    while (i + 2 < times.size() && t >= times[i + 1]) ++i;
    if (k >= 2) return Eigen::Vector3d::Zero();
    if (k == 1) {
      if (i > 0 && std::abs(t - times[i]) < 1e-12) return 0.5 * (slope(i - 1) + slope(i));
      return slope(i);
    }
    const double a = (t - times[i]) / (times[i + 1] - times[i]);
    return (1.0 - a) * points[i] + a * points[i + 1];
  };
  return seedFromReference(setup, std::vector<double>(times.begin() + 1, times.end()), ref);
}

DecisionVariables seedFromTrajectory(const ProblemSetup& setup, const SegmentedTrajectory& reference,
                                     const std::vector<double>& arrivals) {
  ReferencePath ref = [&](double t, int k) -> Eigen::Vector3d {
    return reference.evaluate(std::clamp(t, reference.startTime(), reference.endTime()), k);
  };
  return seedFromReference(setup, arrivals, ref);
}

SegmentedTrajectory planGlobal(const ProblemSetup& setup) {
  setup.validate();
  const int N = setup.segmentCount();
  const int s = setup.config.order;
  std::vector<Eigen::Vector3d> pts{setup.startState.col(0)};
  for (const auto& g : setup.gates) pts.push_back(g.nominalCenter());
  Eigen::VectorXd dist(N);
  for (int n = 0; n < N; ++n) {
    dist(n) = std::max(1e-3, (pts[static_cast<std::size_t>(n) + 1] - pts[static_cast<std::size_t>(n)]).norm());
  }
  const double total = setup.config.globalTotalTime > 0.0 ? setup.config.globalTotalTime
                                                          : dist.sum() / setup.config.nominalSpeed;
  MincoProblem mp;
  mp.order = s;
  mp.head = setup.startState;
  mp.tail.resize(3, s);
  mp.tail.col(0) = pts.back();
  mp.tail.rightCols(s - 1) = setup.terminalDerivatives;
  mp.waypoints.resize(3, N - 1);
  for (int n = 0; n + 1 < N; ++n) mp.waypoints.col(n) = pts[static_cast<std::size_t>(n) + 1];
  mp.durations = total * dist / dist.sum();
  const Eigen::MatrixXd C = solveMinco(mp);

  std::vector<Eigen::MatrixXd> blocks;
  for (int n = 0; n < N; ++n) blocks.push_back(C.middleRows(2 * s * n, 2 * s));
  return SegmentedTrajectory::fromCoefficients(setup.startTime, s, blocks, std::vector<int>(static_cast<std::size_t>(N), 1),
                                               mp.durations);
}

std::vector<double> globalArrivalTimes(const SegmentedTrajectory& global) {
  std::vector<double> out;
  for (int n = 0; n < global.segmentCount(); ++n) out.push_back(global.segmentEnd(n));
  return out;
}

double trajectoryLength(const SegmentedTrajectory& traj, int samplesPerSecond) {
  const int steps = std::max(2, static_cast<int>(std::ceil(traj.totalTime() * samplesPerSecond)));
  double len = 0.0;
  Eigen::Vector3d prev = traj.evaluate(traj.startTime(), 0);
  for (int i = 1; i <= steps; ++i) {
    const double t = i == steps ? traj.endTime() : traj.startTime() + traj.totalTime() * i / steps;
    const Eigen::Vector3d p = traj.evaluate(t, 0);
    len += (p - prev).norm();
    prev = p;
  }
  return len;
}

}  // namespace racetraj
