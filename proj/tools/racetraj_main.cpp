#include "experiments.hpp"

#include "racetraj/errors.hpp"
#include "racetraj/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace racetraj;
namespace ex = racetraj::experiments;
namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string scenario;
  std::string out = "out";
  unsigned seed = 1;
  int threads = 1;
};

void addCommon(CLI::App* cmd, CommonArgs& args, bool needsScenario = true) {
  auto* opt = cmd->add_option("--scenario,-s", args.scenario, "Scenario JSON file")->check(CLI::ExistingFile);
  if (needsScenario) opt->required();
  cmd->add_option("--out,-o", args.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads,-j", args.threads, "Worker threads for independent cells")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void writeText(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text << '\n';
}

void printResiduals(const PenaltyResiduals& r) {
  std::printf("residuals: thrust %.3e  body_rate %.3e  gap %.3e  obstacle %.3e\n", r.thrust, r.bodyRate, r.gap,
              r.obstacle);
}

int runPlan(const CommonArgs& args) {
  const Scenario sc = loadScenario(args.scenario);
  ex::ensureDirectory(args.out);
  const PlanResult r = ex::planScenario(sc, args.threads);
  writeText(fs::path(args.out) / "plan.json", planToJson(r));
  ex::writeTrajectoryCsv(fs::path(args.out) / "trajectory.csv", r.trajectory, sc.config.penalty.drag);
  std::printf("%s: total time %.4f s, %d iterations, %s\n", sc.name.c_str(), r.totalTime, r.iterations,
              toString(r.status).c_str());
  printResiduals(r.residuals);
  return r.converged() ? 0 : 1;
}

int runReplay(const CommonArgs& args, const std::string& planPath, double dt) {
  std::ifstream in(planPath);
  if (!in) throw std::runtime_error("cannot open plan file " + planPath);
  std::stringstream buf;
  buf << in.rdbuf();
  const SegmentedTrajectory traj = parsePlanTrajectory(buf.str());
  DragModel drag;
  if (!args.scenario.empty()) drag = loadScenario(args.scenario).config.penalty.drag;
  ex::ensureDirectory(args.out);
  ex::writeTrajectoryCsv(fs::path(args.out) / "replay.csv", traj, drag, dt);
  std::printf("replayed %.4f s into %s\n", traj.totalTime(), (fs::path(args.out) / "replay.csv").c_str());
  return 0;
}

int runSweepTiming(const CommonArgs& args, int repetitions) {
  ex::ensureDirectory(args.out);
  ex::TimingOptions opts;
  opts.repetitions = repetitions;
  opts.seed = args.seed;
  const auto rows = ex::runTimingSweep(opts);
  ex::writeTimingCsv(fs::path(args.out) / "timing.csv", rows);
  ex::writeTimingPlot(args.out, rows);
  for (const auto& r : rows) {
    std::printf("N=%d M=%2d uniform %8.2f us  general %8.2f us  reduction %5.1f%%\n", r.segments, r.pieces,
                r.uniformUs, r.generalUs, r.reductionPct);
  }
  return 0;
}

int runSweepGate(const CommonArgs& args) {
  const Scenario sc = loadScenario(args.scenario);
  ex::ensureDirectory(args.out);
  ex::GateSweepOptions opts;
  opts.threads = args.threads;
  const auto rows = ex::runGateSweep(sc, opts);
  ex::writeGateSweepCsv(fs::path(args.out) / "gate_sweep.csv", rows);
  ex::writeGateSweepPlot(args.out, rows);
  bool all = true;
  for (const auto& r : rows) {
    std::printf("%-4s rho %.0e lambda %.0e  mean dist %.3e m  time %.3f s  %s\n", r.method.c_str(), r.rho,
                r.softWeight, r.meanGateDistance, r.flightTime, r.status.c_str());
    all = all && r.converged;
  }
  return all ? 0 : 1;
}

int runTopology(const CommonArgs& args) {
  const Scenario sc = loadScenario(args.scenario);
  ex::ensureDirectory(args.out);
  const ex::TopologyStudy study = ex::runTopologyStudy(sc, args.threads);
  ex::writeTopologyCsv(fs::path(args.out) / "topology.csv", study.rows);
  ex::writeTopologyPlot(args.out, study);
  bool all = true;
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    const auto& r = study.rows[i];
    const auto& c = study.result.candidates[i];
    if (c.error.empty()) {
      ex::writeTrajectoryCsv(fs::path(args.out) / ("candidate_" + r.label + ".csv"), c.result.trajectory,
                             sc.config.penalty.drag);
    }
    std::printf("%-6s time %.3f s  length %.2f m  feasible %d  selected %d  %s\n", r.label.c_str(), r.executionTime,
                r.length, r.feasible ? 1 : 0, r.selected ? 1 : 0, r.status.c_str());
    all = all && c.error.empty() && c.result.converged();
  }
  return all ? 0 : 1;
}

int runReplanSim(const CommonArgs& args, ex::ReplanSimOptions opts, double deadlineMs) {
  Scenario sc = loadScenario(args.scenario);
  if (deadlineMs > 0.0) sc.config.deadlineMs = deadlineMs;
  ex::ensureDirectory(args.out);
  opts.seed = args.seed;
  const ex::ReplanSimResult r = ex::runReplanSim(sc, opts);
  ex::writeReplanSimCsv(fs::path(args.out) / "replan_sim.csv", r);
  double worstCrossing = 0.0;
  bool allConverged = true;
  for (const auto& row : r.rows) {
    if (row.crossedGate >= 0) worstCrossing = std::max(worstCrossing, row.crossingDistance);
    allConverged = allConverged && (row.status == "converged" || row.status == "stalled") && !row.stale;
  }
  std::printf("%zu replans, median latency %.3f ms, %d stale, worst crossing distance %.3e m, %s\n", r.rows.size(),
              r.medianLatencyMs, r.staleEvents, worstCrossing, r.finished ? "all gates passed" : "course not finished");
  return r.finished && allConverged ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gate-constrained racing trajectory planner"};
  app.require_subcommand(1);

  CommonArgs common;
  auto* plan = app.add_subcommand("plan", "Plan one scenario and write plan.json and trajectory.csv");
  addCommon(plan, common);

  std::string planPath;
  double replayDt = 0.01;
  auto* replay = app.add_subcommand("replay", "Sample a saved plan into replay.csv");
  addCommon(replay, common, false);
  replay->add_option("--plan", planPath, "Plan JSON written by `plan`")->required()->check(CLI::ExistingFile);
  replay->add_option("--dt", replayDt, "Sample spacing [s]")->check(CLI::PositiveNumber)->capture_default_str();

  int repetitions = 1000;
  auto* timing = app.add_subcommand("sweep-timing", "Uniform vs general MINCO per-iteration time");
  addCommon(timing, common, false);
  timing->add_option("--repetitions", repetitions, "Timed iterations per cell")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* gate = app.add_subcommand("sweep-gate", "Hard vs soft gate constraint over rho and lambda_gate");
  addCommon(gate, common);

  auto* topo = app.add_subcommand("topology", "Multi-topology study around the first obstacle");
  addCommon(topo, common);

  ex::ReplanSimOptions simOpts;
  double deadlineMs = 0.0;
  auto* sim = app.add_subcommand("replan-sim", "Receding-horizon replanning along the course");
  addCommon(sim, common);
  sim->add_option("--rate", simOpts.rateHz, "Replan rate [Hz]")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--position-noise", simOpts.positionNoise, "State noise std dev [m]")->capture_default_str();
  sim->add_option("--velocity-noise", simOpts.velocityNoise, "State noise std dev [m/s]")->capture_default_str();
  sim->add_option("--duration", simOpts.maxDuration, "Simulated time limit [s]")->capture_default_str();
  sim->add_option("--deadline-ms", deadlineMs, "Override the scenario replan deadline");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan->parsed()) return runPlan(common);
    if (replay->parsed()) return runReplay(common, planPath, replayDt);
    if (timing->parsed()) return runSweepTiming(common, repetitions);
    if (gate->parsed()) return runSweepGate(common);
    if (topo->parsed()) return runTopology(common);
    if (sim->parsed()) return runReplanSim(common, simOpts, deadlineMs);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "racetraj: %s\n", e.what());
    return 2;
  }
  return 1;
}
