#include "racetraj/errors.hpp"
#include "racetraj/scenario.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

using namespace racetraj;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarioDir(RACETRAJ_SCENARIO_DIR);

json baseDocument() {
  return json::parse(R"({
    "schema": "racetraj-scenario/v1",
    "name": "unit",
    "start_state": [[0, 0, 1], [1, 0, 0]],
    "gates": [
      {"motion": {"type": "static", "center": [4, 0, 1]}},
      {"motion": {"type": "linear", "center": [8, 1, 1], "velocity": [0, 0.5, 0]}, "radius": 0.6},
      {"motion": {"type": "sinusoid", "center": [12, 0, 1], "axis": [0, 0, 1],
                  "amplitude": 0.5, "omega": 2.0, "phase": 0.3}}
    ],
    "obstacles": [
      {"semi_axes": [1, 2, 0.5], "yaw": 0.4, "motion": {"type": "static", "center": [6, 0, 1]}}
    ],
    "gap": {"gate": 1, "z_desired": [0, 0.6, 0.8], "theta_tol": 0.2, "sample_range": 2},
    "planner": {"order": 3, "pieces": [2, 3, 4], "rho": 500, "samples": 8, "horizon": 2}
  })");
}

std::string errorOf(const json& doc) {
  try {
    parseScenario(doc.dump());
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scenario, ParsesEveryField) {
  const Scenario sc = parseScenario(baseDocument().dump());
  EXPECT_EQ(sc.name, "unit");
  EXPECT_EQ(sc.gateCount(), 3);
  EXPECT_EQ(sc.startState.cols(), 3);
  EXPECT_DOUBLE_EQ(sc.startState(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(sc.startState(0, 2), 0.0);
  EXPECT_DOUBLE_EQ(sc.world.gates[1].radius, 0.6);
  EXPECT_TRUE(std::holds_alternative<SinusoidMotion>(sc.world.gates[2].motion));
  ASSERT_TRUE(sc.world.gap.has_value());
  EXPECT_EQ(sc.world.gap->gate, 1);
  EXPECT_NEAR(sc.world.gap->zDesired.norm(), 1.0, 1e-12);
  EXPECT_EQ(sc.config.pieces, (std::vector<int>{2, 3, 4}));
  EXPECT_DOUBLE_EQ(sc.config.rho, 500.0);
  EXPECT_EQ(sc.config.horizon, 2);
}

TEST(Scenario, RoundTripsThroughJson) {
  const Scenario a = parseScenario(baseDocument().dump());
  const Scenario b = parseScenario(scenarioToJson(a));
  EXPECT_EQ(scenarioToJson(a), scenarioToJson(b));
  EXPECT_TRUE(a.world.obstacles[0].orientation.isApprox(b.world.obstacles[0].orientation, 1e-15));
  EXPECT_EQ(a.config.pieces, b.config.pieces);
  EXPECT_DOUBLE_EQ(a.config.rho, b.config.rho);
}

TEST(Scenario, ErrorsNameTheOffendingPath) {
  json doc = baseDocument();
  doc["gates"][1]["colour"] = "red";
  EXPECT_NE(errorOf(doc).find("$.gates[1].colour"), std::string::npos) << errorOf(doc);

  doc = baseDocument();
  doc["schema"] = "racetraj-scenario/v0";
  EXPECT_NE(errorOf(doc).find("$.schema"), std::string::npos);

  doc = baseDocument();
  doc["gap"]["gate"] = 2;
  EXPECT_NE(errorOf(doc).find("$.gap.gate"), std::string::npos);

  doc = baseDocument();
  doc["gates"][0]["motion"]["center"] = json::array({1, 2});
  EXPECT_NE(errorOf(doc).find("$.gates[0].motion.center"), std::string::npos);

  doc = baseDocument();
  doc.erase("gates");
  EXPECT_NE(errorOf(doc).find("$.gates"), std::string::npos);

  EXPECT_THROW(parseScenario("{not json"), ScenarioError);
}

TEST(Scenario, ShippedScenariosLoad) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kScenarioDir)) {
    if (entry.path().extension() != ".json") continue;
    const Scenario sc = loadScenario(entry.path());
    EXPECT_TRUE(sc.reconstruction) << entry.path();
    EXPECT_FALSE(sc.name.empty()) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 4);
}

TEST(Scenario, HorizonSlicesPiecesAndReindexesGap) {
  const Scenario sc = parseScenario(baseDocument().dump());
  const Eigen::MatrixXd state = Eigen::MatrixXd::Zero(3, 3);

  const ProblemSetup a = horizonSetup(sc, 1.0, state, 1, 2);
  EXPECT_EQ(a.segmentCount(), 2);
  EXPECT_EQ(a.config.pieces, (std::vector<int>{3, 4}));
  ASSERT_TRUE(a.gap.has_value());
  EXPECT_EQ(a.gap->gate, 0);
  EXPECT_DOUBLE_EQ(a.startTime, 1.0);

  const ProblemSetup b = horizonSetup(sc, 2.0, state, 2, 1);
  EXPECT_FALSE(b.gap.has_value());
  EXPECT_EQ(b.config.pieces, (std::vector<int>{4}));

  const ProblemSetup c = horizonSetup(sc, 0.0, state, 0, 2);
  ASSERT_TRUE(c.gap.has_value());
  EXPECT_EQ(c.gap->gate, 1);

  EXPECT_THROW(horizonSetup(sc, 0.0, state, 2, 2), ContractError);
}

TEST(Scenario, PlanDocumentRoundTrips) {
  const Scenario sc = loadScenario(kScenarioDir / "two_gate_nogap.json");
  const ProblemSetup setup = fullSetup(sc);
  PlanningProblem problem(setup, nullptr);
  PlanResult plan;
  const Eigen::VectorXd x = problem.pack(straightLineSeed(setup));
  plan.params = problem.trajectoryParams(x);
  plan.trajectory = plan.params.toTrajectory();
  const SegmentedTrajectory back = parsePlanTrajectory(planToJson(plan));
  ASSERT_NEAR(back.endTime(), plan.trajectory.endTime(), 1e-12);
  for (int i = 0; i <= 50; ++i) {
    const double t = plan.trajectory.startTime() + (plan.trajectory.endTime() - plan.trajectory.startTime()) * i / 50.0;
    for (int k = 0; k < 3; ++k) {
      EXPECT_LE((back.evaluate(t, k) - plan.trajectory.evaluate(t, k)).norm(), 1e-9);
    }
  }
  EXPECT_THROW(parsePlanTrajectory(R"({"schema": "other"})"), ScenarioError);
}
