#include "racetraj/minco.hpp"
#include "racetraj/minco_uniform.hpp"
#include "racetraj/planner.hpp"
#include "racetraj/scenario.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace racetraj;

namespace {

Eigen::MatrixXd randomMatrix(std::mt19937& rng, int rows, int cols, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

MincoProblem uniformProblem(int s, int M, double T) {
  std::mt19937 rng(static_cast<unsigned>(17 * s + M));
  MincoProblem p;
  p.order = s;
  p.head = randomMatrix(rng, 3, s, 2.0);
  p.tail = randomMatrix(rng, 3, s, 2.0);
  p.waypoints = randomMatrix(rng, 3, M - 1, 5.0);
  p.durations = Eigen::VectorXd::Constant(M, T / M);
  return p;
}

// Online assembly, banded PLU and solve.
void BM_GeneralSolve(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const MincoProblem p = uniformProblem(3, M, 0.5 * M);
  for (auto _ : state) benchmark::DoNotOptimize(solveMinco(p));
  state.SetComplexityN(M);
}

// Cached factors of the unit-duration system, solve and rescale only.
void BM_UniformSolve(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const MincoProblem p = uniformProblem(3, M, 0.5 * M);
  UniformMinco u(std::make_shared<UniformMincoCache>(3, M));
  for (auto _ : state) {
    u.solve(0.5 * M, p.head, p.tail, p.waypoints);
    benchmark::DoNotOptimize(u.coefficients().data());
  }
  state.SetComplexityN(M);
}

void BM_GeneralSolveBackprop(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const MincoProblem p = uniformProblem(3, M, 0.5 * M);
  std::mt19937 rng(3);
  const Eigen::MatrixXd W = randomMatrix(rng, 6 * M, 3, 1.0);
  const Eigen::VectorXd wT = Eigen::VectorXd::Constant(M, 0.1);
  Minco m;
  for (auto _ : state) {
    m.setProblem(p);
    benchmark::DoNotOptimize(m.backprop(W, wT));
  }
}

void BM_UniformSolveBackprop(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  const MincoProblem p = uniformProblem(3, M, 0.5 * M);
  std::mt19937 rng(3);
  const Eigen::MatrixXd W = randomMatrix(rng, 6 * M, 3, 1.0);
  UniformMinco u(std::make_shared<UniformMincoCache>(3, M));
  for (auto _ : state) {
    u.solve(0.5 * M, p.head, p.tail, p.waypoints);
    benchmark::DoNotOptimize(u.backprop(W, 0.1));
  }
}

// One objective evaluation of the with-gap racing configuration.
void BM_PlannerEvaluate(benchmark::State& state) {
  const Scenario sc = loadScenario(std::string(RACETRAJ_SCENARIO_DIR) + "/two_gate_gap.json");
  const ProblemSetup setup = fullSetup(sc);
  PlanningProblem problem(setup, makeCaches(setup.config, setup.segmentCount()));
  const Eigen::VectorXd x = problem.pack(straightLineSeed(setup));
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(problem.evaluate(x, grad));
}

}  // namespace

BENCHMARK(BM_GeneralSolve)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oN);
BENCHMARK(BM_UniformSolve)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oN);
BENCHMARK(BM_GeneralSolveBackprop)->DenseRange(2, 10, 2);
BENCHMARK(BM_UniformSolveBackprop)->DenseRange(2, 10, 2);
BENCHMARK(BM_PlannerEvaluate);

BENCHMARK_MAIN();
