#include "racetraj/minco.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

using namespace racetraj;

// Assemble + factorize + solve must scale linearly in the piece count: the
// least-squares slope of log(time) against log(M) over M = 8..128.
TEST(MincoComplexity, SolveTimeIsLinearInPieces) {
  std::mt19937 rng(5);
  const std::vector<int> sizes{8, 16, 32, 64, 128};
  std::vector<double> logM, logT;
  for (int M : sizes) {
    const MincoProblem p = testkit::randomMinco(rng, 3, M);
    const int batch = std::max(1, 4096 / M);
    std::vector<double> samples;
    double sink = 0.0;
    for (int rep = 0; rep < 31; ++rep) {
      const auto start = std::chrono::steady_clock::now();
      for (int b = 0; b < batch; ++b) sink += solveMinco(p)(0, 0);
      samples.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / batch);
    }
    ASSERT_TRUE(std::isfinite(sink));
    std::nth_element(samples.begin(), samples.begin() + 15, samples.end());
    logM.push_back(std::log(static_cast<double>(M)));
    logT.push_back(std::log(samples[15]));
  }
  const double n = static_cast<double>(sizes.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < logM.size(); ++i) {
    mx += logM[i] / n;
    my += logT[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < logM.size(); ++i) {
    sxy += (logM[i] - mx) * (logT[i] - my);
    sxx += (logM[i] - mx) * (logM[i] - mx);
  }
  const double slope = sxy / sxx;
  EXPECT_GE(slope, 0.8);
  EXPECT_LE(slope, 1.4);
}
