#include "experiments.hpp"

#include "racetraj/errors.hpp"
#include "racetraj/flatness.hpp"
#include "racetraj/minco.hpp"
#include "racetraj/minco_uniform.hpp"
#include "racetraj/replanner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace racetraj::experiments {

namespace {

using Clock = std::chrono::steady_clock;

double elapsedUs(Clock::time_point start) {
  return std::chrono::duration<double, std::micro>(Clock::now() - start).count();
}

// Runs body(i) for i in [0, count) on up to `threads` workers.
template <typename Body>
void parallelFor(int count, int threads, Body body) {
  threads = std::clamp(threads, 1, std::max(1, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failureMutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failureMutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Eigen::MatrixXd randomMatrix(std::mt19937& rng, int rows, int cols, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

double uniform(std::mt19937& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::ofstream openOutput(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.precision(10);
  return out;
}

DecisionVariables globalSeed(const ProblemSetup& setup) {
  const SegmentedTrajectory g = planGlobal(setup);
  return seedFromTrajectory(setup, g, globalArrivalTimes(g));
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  if (values.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(values.begin(), mid));
}

// ---- timing sweep -------------------------------------------------------

std::vector<TimingRow> runTimingSweep(const TimingOptions& options) {
  if (options.repetitions < 1) throw std::invalid_argument("repetitions must be positive");
  std::vector<TimingRow> rows;
  std::mt19937 rng(options.seed);
  const int s = options.order;
  UniformMincoCacheSet caches;
  for (int N : options.segments) {
    for (int M : options.pieces) {
      struct SegmentInput {
        Eigen::MatrixXd head, tail, waypoints, gradCoeffs;
        double duration;
        double gradDuration;
      };
      std::vector<SegmentInput> inputs(static_cast<std::size_t>(N));
      for (auto& in : inputs) {
        in.head = randomMatrix(rng, 3, s, 2.0);
        in.tail = randomMatrix(rng, 3, s, 2.0);
        in.waypoints = randomMatrix(rng, 3, M - 1, 5.0);
        in.duration = uniform(rng, 0.5, 3.0);
        in.gradCoeffs = randomMatrix(rng, 2 * s * M, 3, 1.0);
        in.gradDuration = uniform(rng, -1.0, 1.0);
      }
      const UniformMincoCachePtr cache = caches.get(s, M);
      std::vector<UniformMinco> uniformSegs(static_cast<std::size_t>(N), UniformMinco(cache));
      std::vector<Minco> generalSegs(static_cast<std::size_t>(N));
      std::vector<MincoProblem> problems(static_cast<std::size_t>(N));
      std::vector<Eigen::VectorXd> gradDurations(static_cast<std::size_t>(N));
      for (int n = 0; n < N; ++n) {
        const auto& in = inputs[static_cast<std::size_t>(n)];
        auto& p = problems[static_cast<std::size_t>(n)];
        p.order = s;
        p.head = in.head;
        p.tail = in.tail;
        p.waypoints = in.waypoints;
        p.durations = Eigen::VectorXd::Constant(M, in.duration / M);
        // dF/dT_i for the general form spreads the segment derivative evenly.
        gradDurations[static_cast<std::size_t>(n)] = Eigen::VectorXd::Constant(M, in.gradDuration / M);
      }

      double sink = 0.0;
      std::vector<double> uniformTimes, generalTimes;
      uniformTimes.reserve(static_cast<std::size_t>(options.repetitions));
      generalTimes.reserve(static_cast<std::size_t>(options.repetitions));
      for (int rep = 0; rep < options.repetitions; ++rep) {
        auto start = Clock::now();
        for (int n = 0; n < N; ++n) {
          const auto& in = inputs[static_cast<std::size_t>(n)];
          auto& seg = uniformSegs[static_cast<std::size_t>(n)];
          seg.solve(in.duration, in.head, in.tail, in.waypoints);
          sink += seg.backprop(in.gradCoeffs, in.gradDuration).duration;
        }
        uniformTimes.push_back(elapsedUs(start));

        start = Clock::now();
        for (int n = 0; n < N; ++n) {
          auto& seg = generalSegs[static_cast<std::size_t>(n)];
          seg.setProblem(problems[static_cast<std::size_t>(n)]);
          sink += seg.backprop(inputs[static_cast<std::size_t>(n)].gradCoeffs, gradDurations[static_cast<std::size_t>(n)])
                      .durations.sum();
        }
        generalTimes.push_back(elapsedUs(start));
      }
      if (!std::isfinite(sink)) throw std::runtime_error("timing sweep produced a non-finite gradient");

      TimingRow row;
      row.segments = N;
      row.pieces = M;
      row.uniformUs = median(uniformTimes);
      row.generalUs = median(generalTimes);
      row.reductionPct = 100.0 * (row.generalUs - row.uniformUs) / row.generalUs;
      for (int n = 0; n < N; ++n) {
        const Eigen::MatrixXd& a = uniformSegs[static_cast<std::size_t>(n)].coefficients();
        const Eigen::MatrixXd& b = generalSegs[static_cast<std::size_t>(n)].coefficients();
        row.maxCoeffDiff = std::max(row.maxCoeffDiff, (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff()));
      }
      rows.push_back(row);
    }
  }
  return rows;
}

// ---- gate-constraint sweep ----------------------------------------------

std::vector<GateSweepRow> runGateSweep(const Scenario& scenario, const GateSweepOptions& options) {
  std::vector<GateSweepRow> rows;
  for (double rho : options.rhos) {
    GateSweepRow hard;
    hard.method = "hard";
    hard.rho = rho;
    rows.push_back(hard);
    for (double w : options.softWeights) {
      GateSweepRow soft;
      soft.method = "soft";
      soft.rho = rho;
      soft.softWeight = w;
      rows.push_back(soft);
    }
  }
  const ProblemSetup base = fullSetup(scenario);
  const auto caches = makeCaches(scenario.config, base.segmentCount());
  parallelFor(static_cast<int>(rows.size()), options.threads, [&](int i) {
    GateSweepRow& row = rows[static_cast<std::size_t>(i)];
    ProblemSetup setup = base;
    setup.config.rho = row.rho;
    setup.config.gateMode = row.method == "hard" ? GateMode::Hard : GateMode::Soft;
    setup.config.softGateWeight = row.softWeight;
    PlanningProblem problem(setup, caches);
    const PlanResult r = optimize(problem, globalSeed(setup));
    double sum = 0.0;
    for (double d : r.gateDistances) {
      sum += d;
      row.maxGateDistance = std::max(row.maxGateDistance, d);
    }
    row.meanGateDistance = sum / static_cast<double>(r.gateDistances.size());
    row.flightTime = r.totalTime;
    row.iterations = r.iterations;
    row.status = toString(r.status);
    row.converged = r.converged();
  });
  return rows;
}

// ---- topology / single plan ---------------------------------------------

TopologyStudy runTopologyStudy(const Scenario& scenario, int threads) {
  if (scenario.world.obstacles.empty()) throw std::invalid_argument("topology study needs an obstacle");
  ProblemSetup setup = fullSetup(scenario);
  setup.config.threads = threads;
  TopologyStudy study;
  study.result = planMultiTopology(setup, globalSeed(setup), 0);
  for (std::size_t i = 0; i < study.result.candidates.size(); ++i) {
    const auto& c = study.result.candidates[i];
    TopologyRow row;
    row.label = c.label;
    row.executionTime = c.result.totalTime;
    row.length = c.length;
    row.feasible = c.feasible;
    row.selected = static_cast<int>(i) == study.result.selected;
    row.iterations = c.result.iterations;
    row.status = c.error.empty() ? toString(c.result.status) : "error: " + c.error;
    row.residuals = c.result.residuals;
    study.rows.push_back(row);
  }
  return study;
}

PlanResult planScenario(const Scenario& scenario, int threads) {
  if (!scenario.world.obstacles.empty()) return runTopologyStudy(scenario, threads).result.best();
  const ProblemSetup setup = fullSetup(scenario);
  PlanningProblem problem(setup, nullptr);
  return optimize(problem, globalSeed(setup));
}

bool withinBounds(const PenaltyResiduals& r, const FeasibilityBounds& b) {
  return r.thrust <= b.thrust && r.bodyRate <= b.bodyRate && r.gap <= b.gap && r.obstacle <= b.obstacle;
}

// ---- replanning simulation ----------------------------------------------

ReplanSimResult runReplanSim(const Scenario& scenario, const ReplanSimOptions& options) {
  if (!(options.rateHz > 0.0)) throw std::invalid_argument("replan rate must be positive");
  Replanner replanner(scenario);
  std::mt19937 rng(options.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double dt = 1.0 / options.rateHz;
  const int gates = scenario.gateCount();

  ReplanSimResult out;
  double t = scenario.startTime;
  Eigen::MatrixXd state = scenario.startState;
  int next = 0;
  std::vector<double> latencies;
  for (int step = 0; next < gates && t <= scenario.startTime + options.maxDuration; ++step) {
    const PlanResult r = replanner.replanStep(t, state, next);
    ReplanSimRow row;
    row.step = step;
    row.time = t;
    row.nextGate = next;
    row.latencyMs = r.latencyMs;
    row.iterations = r.iterations;
    row.status = toString(r.status);
    row.stale = r.stale;
    row.thrustResidual = r.residuals.thrust;
    row.bodyRateResidual = r.residuals.bodyRate;
    row.gapResidual = r.residuals.gap;
    row.obstacleResidual = r.residuals.obstacle;
    if (r.stale) ++out.staleEvents;
    latencies.push_back(r.latencyMs);

    t += dt;
    const PlanResult& plan = *replanner.current();
    const SegmentedTrajectory& traj = plan.trajectory;
    const double ts = std::min(t, traj.endTime());
    for (int k = 0; k < state.cols(); ++k) {
      state.col(k) = traj.evaluate(ts, k);
      const double sigma = k == 0 ? options.positionNoise : k == 1 ? options.velocityNoise : 0.0;
      if (sigma > 0.0)
        for (int i = 0; i < 3; ++i) state(i, k) += sigma * noise(rng);
    }
    // A gate is passed once the plan reaches it within the commit window or the
    // vehicle is inside its opening; the second test ends noisy stops at the last gate.
    const int first = replanner.currentFirstGate();
    while (next < gates && next - first < static_cast<int>(plan.arrivalTimes.size())) {
      const Gate& gate = scenario.world.gates[static_cast<std::size_t>(next)];
      const bool due = plan.arrivalTimes[static_cast<std::size_t>(next - first)] <= t + options.commitWindow;
      const bool inside = (state.col(0) - gate.evaluate(t).position).norm() <= gate.radius;
      if (!due && !inside) break;
      row.crossedGate = next;
      row.crossingDistance = plan.gateDistances[static_cast<std::size_t>(next - first)];
      ++next;
    }
    out.rows.push_back(row);
  }
  out.finished = next == gates;
  out.medianLatencyMs = median(latencies);
  return out;
}

// ---- gradient check -----------------------------------------------------

GradientCase randomGradientCase(std::uint32_t seed, GateMode mode) {
  std::mt19937 rng(seed);
  ProblemSetup s;
  s.startTime = uniform(rng, 0.0, 0.5);
  s.startState = randomMatrix(rng, 3, 3, 0.5);
  s.startState.col(0) = Eigen::Vector3d(0, 0, 1.5);
  s.terminalDerivatives = randomMatrix(rng, 3, 2, 0.5);

  SinusoidMotion sine;
  sine.center = Eigen::Vector3d(4.0, uniform(rng, 0.5, 1.5), 1.5);
  sine.axis = Eigen::Vector3d::UnitY();
  sine.amplitude = uniform(rng, 0.5, 1.0);
  sine.omega = 2.0 / sine.amplitude;
  sine.phase = uniform(rng, 0.0, 3.0);
  Gate g0;
  g0.motion = sine;
  Gate g1;
  g1.motion = LinearMotion{Eigen::Vector3d(9.0, -1.0, 1.2), Eigen::Vector3d(0.0, uniform(rng, 0.2, 0.8), 0.2)};
  s.gates = {g0, g1};

  EllipsoidObstacle obs;
  obs.semiAxes = Eigen::Vector3d(1.0, 1.5, 0.8);
  obs.orientation = Eigen::AngleAxisd(uniform(rng, -0.5, 0.5), Eigen::Vector3d::UnitZ()).toRotationMatrix();
  obs.motion = LinearMotion{Eigen::Vector3d(6.5, -0.5, 1.4), Eigen::Vector3d(0.0, 0.3, 0.0)};
  s.obstacles = {obs};

  GapSpec gap;
  gap.gate = 0;
  gap.zDesired = Eigen::Vector3d(0.0, -std::sin(0.6), std::cos(0.6));
  gap.thetaTol = 0.05;
  gap.sampleRange = 2;
  s.gap = gap;

  s.config.order = 3;
  s.config.pieces = {3, 2};
  s.config.rho = 500.0;
  s.config.penalty.samples = {8};
  s.config.penalty.thrustMin = 9.0;
  s.config.penalty.thrustMax = 10.5;
  s.config.penalty.bodyRateMax = 0.3;
  s.config.penalty.obstacleThreshold = 1.0;
  s.config.penalty.drag.kd = uniform(rng, 0.1, 0.5);
  s.config.penalty.weights = {100.0, 100.0, 1e4, 1e4};
  s.config.gateMode = mode;
  s.config.softGateWeight = 300.0;
  s.config.nominalSpeed = 4.0;

  GradientCase gc;
  gc.setup = s;
  PlanningProblem problem(s, nullptr);
  gc.point = problem.pack(straightLineSeed(s));
  gc.point += randomMatrix(rng, static_cast<int>(gc.point.size()), 1, 0.05);
  return gc;
}

GradientCheck checkGradient(GradientCase& gc, double relTol, double absTol) {
  PlanningProblem problem(gc.setup, nullptr);
  GradientCheck out;
  const PenaltyResiduals r = problem.residuals(gc.point);
  out.allPenaltiesActive = r.thrust > 0.0 && r.bodyRate > 0.0 && r.gap > 0.0 && r.obstacle > 0.0;

  Eigen::VectorXd grad, scratch;
  problem.evaluate(gc.point, grad);
  const double h = 1e-6;
  Eigen::VectorXd x = gc.point;
  out.agree = true;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    x(i) = xi + h;
    const double fp = problem.evaluate(x, scratch);
    x(i) = xi - h;
    const double fm = problem.evaluate(x, scratch);
    x(i) = xi;
    const double fd = (fp - fm) / (2.0 * h);
    const double err = std::abs(grad(i) - fd);
    if (err <= absTol) continue;
    const double rel = err / std::abs(fd);
    out.worstRelative = std::max(out.worstRelative, rel);
    if (rel > relTol) out.agree = false;
  }
  return out;
}

// ---- output -------------------------------------------------------------

void ensureDirectory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void writeTimingCsv(const std::filesystem::path& path, const std::vector<TimingRow>& rows) {
  auto out = openOutput(path);
  out << "# schema: racetraj-timing/v1\n";
  out << "N,M,t_uniform_us,t_general_us,reduction_pct,max_coeff_diff\n";
  for (const auto& r : rows) {
    out << r.segments << ',' << r.pieces << ',' << r.uniformUs << ',' << r.generalUs << ',' << r.reductionPct << ','
        << r.maxCoeffDiff << '\n';
  }
}

void writeGateSweepCsv(const std::filesystem::path& path, const std::vector<GateSweepRow>& rows) {
  auto out = openOutput(path);
  out << "# schema: racetraj-gate-sweep/v1\n";
  out << "method,rho,lambda_gate,mean_gate_distance,max_gate_distance,flight_time,iterations,status,converged\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.rho << ',' << r.softWeight << ',' << r.meanGateDistance << ',' << r.maxGateDistance
        << ',' << r.flightTime << ',' << r.iterations << ',' << r.status << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void writeTopologyCsv(const std::filesystem::path& path, const std::vector<TopologyRow>& rows) {
  auto out = openOutput(path);
  out << "# schema: racetraj-topology/v1\n";
  out << "candidate,execution_time,trajectory_length,feasible,selected,iterations,status,"
         "thrust_residual,body_rate_residual,gap_residual,obstacle_residual\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.executionTime << ',' << r.length << ',' << (r.feasible ? 1 : 0) << ','
        << (r.selected ? 1 : 0) << ',' << r.iterations << ',' << r.status << ',' << r.residuals.thrust << ','
        << r.residuals.bodyRate << ',' << r.residuals.gap << ',' << r.residuals.obstacle << '\n';
  }
}

void writeReplanSimCsv(const std::filesystem::path& path, const ReplanSimResult& result) {
  auto out = openOutput(path);
  out << "# schema: racetraj-replan-sim/v1\n";
  out << "step,time,next_gate,latency_ms,iterations,status,stale,thrust_residual,body_rate_residual,"
         "gap_residual,obstacle_residual,crossed_gate,crossing_distance\n";
  for (const auto& r : result.rows) {
    out << r.step << ',' << r.time << ',' << r.nextGate << ',' << r.latencyMs << ',' << r.iterations << ','
        << r.status << ',' << (r.stale ? 1 : 0) << ',' << r.thrustResidual << ',' << r.bodyRateResidual << ','
        << r.gapResidual << ',' << r.obstacleResidual << ',' << r.crossedGate << ',' << r.crossingDistance << '\n';
  }
}

void writeTrajectoryCsv(const std::filesystem::path& path, const SegmentedTrajectory& traj, const DragModel& drag,
                        double dt) {
  auto out = openOutput(path);
  out << "# schema: racetraj-trajectory/v1\n";
  out << "t,px,py,pz,vx,vy,vz,ax,ay,az,thrust,wx,wy,wz\n";
  const int steps = std::max(1, static_cast<int>(std::ceil((traj.endTime() - traj.startTime()) / dt)));
  for (int i = 0; i <= steps; ++i) {
    const double t = std::min(traj.startTime() + i * dt, traj.endTime());
    const Eigen::Vector3d p = traj.evaluate(t, 0), v = traj.evaluate(t, 1), a = traj.evaluate(t, 2);
    out << t << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << v.x() << ',' << v.y() << ',' << v.z() << ','
        << a.x() << ',' << a.y() << ',' << a.z();
    try {
      const FlatState f = flatMap(v, a, traj.evaluate(t, 3), drag);
      out << ',' << f.thrust << ',' << f.bodyRate.x() << ',' << f.bodyRate.y() << ',' << f.bodyRate.z() << '\n';
    } catch (const SingularityError&) {
      out << ",nan,nan,nan,nan\n";
    }
  }
}

void writeTimingPlot(const std::filesystem::path& dir, const std::vector<TimingRow>& rows) {
  auto data = openOutput(dir / "timing.dat");
  data << "# N M t_uniform_us t_general_us reduction_pct\n";
  int last = -1;
  for (const auto& r : rows) {
    if (last >= 0 && r.segments != last) data << "\n\n";
    last = r.segments;
    data << r.segments << ' ' << r.pieces << ' ' << r.uniformUs << ' ' << r.generalUs << ' ' << r.reductionPct << '\n';
  }
  auto gp = openOutput(dir / "timing.gp");
  gp << "set terminal pngcairo size 900,500\n"
        "set output 'timing.png'\n"
        "set xlabel 'pieces per segment M'\n"
        "set ylabel 'per-iteration time [us]'\n"
        "set key left top\n"
        "plot for [i=0:3] 'timing.dat' index i using 2:3 with linespoints title sprintf('uniform N=%d', i+2), \\\n"
        "     for [i=0:3] 'timing.dat' index i using 2:4 with linespoints dashtype 2 title sprintf('general N=%d', i+2)\n";
}

void writeGateSweepPlot(const std::filesystem::path& dir, const std::vector<GateSweepRow>& rows) {
  auto data = openOutput(dir / "gate_sweep.dat");
  data << "# rho lambda_gate mean_gate_distance flight_time (soft rows, one block per rho)\n";
  double last = -1.0;
  for (const auto& r : rows) {
    if (r.method != "soft" || r.softWeight <= 0.0) continue;
    if (last > 0.0 && r.rho != last) data << "\n\n";
    last = r.rho;
    data << r.rho << ' ' << r.softWeight << ' ' << r.meanGateDistance << ' ' << r.flightTime << '\n';
  }
  auto gp = openOutput(dir / "gate_sweep.gp");
  gp << "set terminal pngcairo size 1000,450\n"
        "set output 'gate_sweep.png'\n"
        "set multiplot layout 1,2\n"
        "set logscale x\n"
        "set xlabel 'lambda_gate'\n"
        "set ylabel 'mean gate distance [m]'\n"
        "plot ";
  std::vector<double> rhos;
  for (const auto& r : rows)
    if (std::find(rhos.begin(), rhos.end(), r.rho) == rhos.end()) rhos.push_back(r.rho);
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    gp << (i > 0 ? ", " : "") << "'gate_sweep.dat' index " << i << " using 2:3 with linespoints title 'rho=" << rhos[i]
       << "'";
  }
  gp << "\nset ylabel 'flight time [s]'\nplot ";
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    gp << (i > 0 ? ", " : "") << "'gate_sweep.dat' index " << i << " using 2:4 with linespoints title 'rho=" << rhos[i]
       << "'";
  }
  gp << "\nunset multiplot\n";
}

void writeTopologyPlot(const std::filesystem::path& dir, const TopologyStudy& study) {
  auto data = openOutput(dir / "topology.dat");
  data << "# x y z per candidate, one block each\n";
  auto gp = openOutput(dir / "topology.gp");
  gp << "set terminal pngcairo size 900,500\n"
        "set output 'topology.png'\n"
        "set xlabel 'x [m]'\n"
        "set ylabel 'y [m]'\n"
        "set size ratio -1\n"
        "plot ";
  for (std::size_t i = 0; i < study.result.candidates.size(); ++i) {
    const auto& c = study.result.candidates[i];
    if (i > 0) data << "\n\n";
    const auto& traj = c.result.trajectory;
    if (traj.segmentCount() > 0) {
      for (double t = traj.startTime(); t <= traj.endTime(); t += 0.02) {
        const Eigen::Vector3d p = traj.evaluate(t, 0);
        data << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
      }
    }
    gp << (i > 0 ? ", \\\n     " : "") << "'topology.dat' index " << i << " using 1:2 with lines lw "
       << (static_cast<int>(i) == study.result.selected ? 3 : 1) << " title '" << c.label << "'";
  }
  gp << '\n';
}

}  // namespace racetraj::experiments
