#include "racetraj/scenario.hpp"

#include "racetraj/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace racetraj {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ScenarioError(path + ": " + msg);
}

void checkKeys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!ok.count(key)) fail(path + "." + key, "unknown key");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

double number(const json& parent, const char* key, const std::string& path, double fallback) {
  return parent.contains(key) ? number(parent.at(key), path + "." + key) : fallback;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

int integer(const json& parent, const char* key, const std::string& path, int fallback) {
  return parent.contains(key) ? integer(parent.at(key), path + "." + key) : fallback;
}

const json& required(const json& parent, const char* key, const std::string& path) {
  if (!parent.contains(key)) fail(path + "." + key, "missing required key");
  return parent.at(key);
}

Eigen::Vector3d vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected an array of 3 numbers");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = number(j[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<int> intList(const json& j, const std::string& path) {
  if (j.is_number_integer()) return {j.get<int>()};
  if (!j.is_array() || j.empty()) fail(path, "expected an integer or a non-empty array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Rows are derivative orders starting at `firstOrder`; missing orders are zero.
Eigen::MatrixXd derivativeRows(const json& j, const std::string& path, int cols) {
  if (!j.is_array()) fail(path, "expected an array of 3-vectors");
  if (static_cast<int>(j.size()) > cols) fail(path, "more derivative orders than the trajectory order allows");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(3, cols);
  for (std::size_t i = 0; i < j.size(); ++i) out.col(static_cast<int>(i)) = vec3(j[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Motion parseMotion(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const json& typeJ = required(j, "type", path);
  if (!typeJ.is_string()) fail(path + ".type", "expected a string");
  const std::string type = typeJ.get<std::string>();
  if (type == "static") {
    checkKeys(j, path, {"type", "center"});
    return StaticMotion{vec3(required(j, "center", path), path + ".center")};
  }
  if (type == "linear") {
    checkKeys(j, path, {"type", "center", "velocity"});
    return LinearMotion{vec3(required(j, "center", path), path + ".center"),
                        vec3(required(j, "velocity", path), path + ".velocity")};
  }
  if (type == "sinusoid") {
    checkKeys(j, path, {"type", "center", "axis", "amplitude", "omega", "phase"});
    SinusoidMotion m;
    m.center = vec3(required(j, "center", path), path + ".center");
    m.axis = vec3(required(j, "axis", path), path + ".axis");
    m.amplitude = number(required(j, "amplitude", path), path + ".amplitude");
    m.omega = number(required(j, "omega", path), path + ".omega");
    m.phase = number(j, "phase", path, 0.0);
    return m;
  }
  fail(path + ".type", "unknown motion type '" + type + "'");
}

json motionJson(const Motion& motion) {
  auto v = [](const Eigen::Vector3d& x) { return json::array({x(0), x(1), x(2)}); };
  if (const auto* s = std::get_if<StaticMotion>(&motion)) return {{"type", "static"}, {"center", v(s->center)}};
  if (const auto* l = std::get_if<LinearMotion>(&motion)) {
    return {{"type", "linear"}, {"center", v(l->center)}, {"velocity", v(l->velocity)}};
  }
  const auto& s = std::get<SinusoidMotion>(motion);
  return {{"type", "sinusoid"}, {"center", v(s.center)}, {"axis", v(s.axis)},
          {"amplitude", s.amplitude}, {"omega", s.omega}, {"phase", s.phase}};
}

json vecJson(const Eigen::Vector3d& x) { return json::array({x(0), x(1), x(2)}); }

json matColsJson(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (int c = 0; c < m.cols(); ++c) out.push_back(vecJson(m.col(c)));
  return out;
}

PlannerConfig parsePlanner(const json& j, const std::string& path) {
  checkKeys(j, path, {"order", "pieces", "rho", "samples", "weights", "limits", "drag", "margins", "gate_mode",
                      "soft_gate_weight", "feasibility_tolerance", "horizon", "deadline_ms", "nominal_speed",
                      "global_total_time", "topology_clearance", "threads", "lbfgs"});
  PlannerConfig c;
  c.order = integer(j, "order", path, c.order);
  if (j.contains("pieces")) c.pieces = intList(j.at("pieces"), path + ".pieces");
  c.rho = number(j, "rho", path, c.rho);
  if (j.contains("samples")) c.penalty.samples = intList(j.at("samples"), path + ".samples");
  if (j.contains("weights")) {
    const json& w = j.at("weights");
    const std::string p = path + ".weights";
    checkKeys(w, p, {"thrust", "body_rate", "gap", "obstacle"});
    c.penalty.weights.thrust = number(w, "thrust", p, c.penalty.weights.thrust);
    c.penalty.weights.bodyRate = number(w, "body_rate", p, c.penalty.weights.bodyRate);
    c.penalty.weights.gap = number(w, "gap", p, c.penalty.weights.gap);
    c.penalty.weights.obstacle = number(w, "obstacle", p, c.penalty.weights.obstacle);
  }
  if (j.contains("limits")) {
    const json& l = j.at("limits");
    const std::string p = path + ".limits";
    checkKeys(l, p, {"thrust_min", "thrust_max", "body_rate_max", "obstacle_threshold"});
    c.penalty.thrustMin = number(l, "thrust_min", p, c.penalty.thrustMin);
    c.penalty.thrustMax = number(l, "thrust_max", p, c.penalty.thrustMax);
    c.penalty.bodyRateMax = number(l, "body_rate_max", p, c.penalty.bodyRateMax);
    c.penalty.obstacleThreshold = number(l, "obstacle_threshold", p, c.penalty.obstacleThreshold);
  }
  if (j.contains("drag")) {
    const json& d = j.at("drag");
    const std::string p = path + ".drag";
    checkKeys(d, p, {"kd", "gravity"});
    c.penalty.drag.kd = number(d, "kd", p, c.penalty.drag.kd);
    c.penalty.drag.gravity = number(d, "gravity", p, c.penalty.drag.gravity);
  }
  if (j.contains("margins")) {
    const json& m = j.at("margins");
    const std::string p = path + ".margins";
    checkKeys(m, p, {"thrust", "body_rate", "gap", "obstacle"});
    c.margins.thrust = number(m, "thrust", p, 0.0);
    c.margins.bodyRate = number(m, "body_rate", p, 0.0);
    c.margins.gap = number(m, "gap", p, 0.0);
    c.margins.obstacle = number(m, "obstacle", p, 0.0);
  }
  if (j.contains("gate_mode")) {
    const json& g = j.at("gate_mode");
    if (!g.is_string()) fail(path + ".gate_mode", "expected \"hard\" or \"soft\"");
    const std::string mode = g.get<std::string>();
    if (mode == "hard") {
      c.gateMode = GateMode::Hard;
    } else if (mode == "soft") {
      c.gateMode = GateMode::Soft;
    } else {
      fail(path + ".gate_mode", "expected \"hard\" or \"soft\"");
    }
  }
  c.softGateWeight = number(j, "soft_gate_weight", path, c.softGateWeight);
  c.feasibilityTolerance = number(j, "feasibility_tolerance", path, c.feasibilityTolerance);
  c.horizon = integer(j, "horizon", path, c.horizon);
  c.deadlineMs = number(j, "deadline_ms", path, c.deadlineMs);
  c.nominalSpeed = number(j, "nominal_speed", path, c.nominalSpeed);
  c.globalTotalTime = number(j, "global_total_time", path, c.globalTotalTime);
  c.topologyClearance = number(j, "topology_clearance", path, c.topologyClearance);
  c.threads = integer(j, "threads", path, c.threads);
  if (j.contains("lbfgs")) {
    const json& l = j.at("lbfgs");
    const std::string p = path + ".lbfgs";
    checkKeys(l, p, {"memory", "grad_tolerance", "past", "delta_tolerance", "max_iterations", "max_linesearch"});
    c.lbfgs.memory = integer(l, "memory", p, c.lbfgs.memory);
    c.lbfgs.gradTolerance = number(l, "grad_tolerance", p, c.lbfgs.gradTolerance);
    c.lbfgs.past = integer(l, "past", p, c.lbfgs.past);
    c.lbfgs.deltaTolerance = number(l, "delta_tolerance", p, c.lbfgs.deltaTolerance);
    c.lbfgs.maxIterations = integer(l, "max_iterations", p, c.lbfgs.maxIterations);
    c.lbfgs.maxLinesearch = integer(l, "max_linesearch", p, c.lbfgs.maxLinesearch);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
  return c;
}

json plannerJson(const PlannerConfig& c) {
  const auto& p = c.penalty;
  return {{"order", c.order},
          {"pieces", c.pieces},
          {"rho", c.rho},
          {"samples", p.samples},
          {"weights", {{"thrust", p.weights.thrust}, {"body_rate", p.weights.bodyRate},
                       {"gap", p.weights.gap}, {"obstacle", p.weights.obstacle}}},
          {"limits", {{"thrust_min", p.thrustMin}, {"thrust_max", p.thrustMax},
                      {"body_rate_max", p.bodyRateMax}, {"obstacle_threshold", p.obstacleThreshold}}},
          {"drag", {{"kd", p.drag.kd}, {"gravity", p.drag.gravity}}},
          {"margins", {{"thrust", c.margins.thrust}, {"body_rate", c.margins.bodyRate},
                       {"gap", c.margins.gap}, {"obstacle", c.margins.obstacle}}},
          {"gate_mode", c.gateMode == GateMode::Hard ? "hard" : "soft"},
          {"soft_gate_weight", c.softGateWeight},
          {"feasibility_tolerance", c.feasibilityTolerance},
          {"horizon", c.horizon},
          {"deadline_ms", c.deadlineMs},
          {"nominal_speed", c.nominalSpeed},
          {"global_total_time", c.globalTotalTime},
          {"topology_clearance", c.topologyClearance},
          {"threads", c.threads},
          {"lbfgs", {{"memory", c.lbfgs.memory}, {"grad_tolerance", c.lbfgs.gradTolerance},
                     {"past", c.lbfgs.past}, {"delta_tolerance", c.lbfgs.deltaTolerance},
                     {"max_iterations", c.lbfgs.maxIterations}, {"max_linesearch", c.lbfgs.maxLinesearch}}}};
}

}  // namespace

void Scenario::validate() const {
  ProblemSetup setup = fullSetup(*this);
  setup.validate();
  if (world.gap) world.gap->validate();
  for (const auto& g : world.gates) {
    if (!(g.radius > 0.0)) throw std::invalid_argument("gate radius must be positive");
  }
}

ProblemSetup fullSetup(const Scenario& scenario) {
  return horizonSetup(scenario, scenario.startTime, scenario.startState, 0, scenario.gateCount());
}

ProblemSetup horizonSetup(const Scenario& scenario, double startTime, const Eigen::MatrixXd& state,
                          int firstGate, int count) {
  if (firstGate < 0 || count < 1 || firstGate + count > scenario.gateCount()) {
    throw ContractError("horizon [" + std::to_string(firstGate) + ", " + std::to_string(firstGate + count) +
                        ") is outside the gate list of size " + std::to_string(scenario.gateCount()));
  }
  ProblemSetup s;
  s.startTime = startTime;
  s.startState = state;
  s.terminalDerivatives = scenario.terminalDerivatives;
  s.gates.assign(scenario.world.gates.begin() + firstGate, scenario.world.gates.begin() + firstGate + count);
  s.obstacles = scenario.world.obstacles;
  s.config = scenario.config;
  if (scenario.config.pieces.size() > 1) {
    s.config.pieces.assign(scenario.config.pieces.begin() + firstGate,
                           scenario.config.pieces.begin() + firstGate + count);
  }
  if (scenario.config.penalty.samples.size() > 1) {
    s.config.penalty.samples.assign(scenario.config.penalty.samples.begin() + firstGate,
                                    scenario.config.penalty.samples.begin() + firstGate + count);
  }
  if (scenario.world.gap) {
    GapSpec g = *scenario.world.gap;
    g.gate -= firstGate;
    if (g.gate >= 0 && g.gate < count) s.gap = g;
  }
  return s;
}

Scenario parseScenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("$: invalid JSON: ") + e.what());
  }
  const std::string root = "$";
  checkKeys(j, root, {"schema", "name", "description", "reconstruction", "start_time", "start_state",
                      "terminal_derivatives", "gates", "obstacles", "gap", "planner"});
  const json& schema = required(j, "schema", root);
  if (!schema.is_string() || schema.get<std::string>() != kScenarioSchema) {
    fail("$.schema", std::string("expected \"") + kScenarioSchema + "\"");
  }
  Scenario sc;
  if (j.contains("name")) sc.name = j.at("name").get<std::string>();
  if (j.contains("description")) sc.description = j.at("description").get<std::string>();
  if (j.contains("reconstruction")) sc.reconstruction = j.at("reconstruction").get<bool>();
  sc.startTime = number(j, "start_time", root, 0.0);
  sc.config = j.contains("planner") ? parsePlanner(j.at("planner"), "$.planner") : PlannerConfig{};
  const int s = sc.config.order;
  sc.startState = derivativeRows(required(j, "start_state", root), "$.start_state", s);
  sc.terminalDerivatives = j.contains("terminal_derivatives")
                               ? derivativeRows(j.at("terminal_derivatives"), "$.terminal_derivatives", s - 1)
                               : Eigen::MatrixXd::Zero(3, s - 1);

  const json& gates = required(j, "gates", root);
  if (!gates.is_array() || gates.empty()) fail("$.gates", "expected a non-empty array");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const std::string p = "$.gates[" + std::to_string(i) + "]";
    checkKeys(gates[i], p, {"motion", "radius"});
    Gate g;
    g.motion = parseMotion(required(gates[i], "motion", p), p + ".motion");
    g.radius = number(gates[i], "radius", p, g.radius);
    try {
      validateMotion(g.motion);
    } catch (const std::invalid_argument& e) {
      fail(p + ".motion", e.what());
    }
    if (!(g.radius > 0.0)) fail(p + ".radius", "must be positive");
    sc.world.gates.push_back(g);
  }
  if (j.contains("obstacles")) {
    const json& obs = j.at("obstacles");
    if (!obs.is_array()) fail("$.obstacles", "expected an array");
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const std::string p = "$.obstacles[" + std::to_string(i) + "]";
      checkKeys(obs[i], p, {"semi_axes", "yaw", "orientation", "motion"});
      EllipsoidObstacle o;
      o.semiAxes = vec3(required(obs[i], "semi_axes", p), p + ".semi_axes");
      if (obs[i].contains("orientation") && obs[i].contains("yaw")) fail(p, "give either orientation or yaw");
      if (obs[i].contains("yaw")) {
        o.orientation = Eigen::AngleAxisd(number(obs[i].at("yaw"), p + ".yaw"), Eigen::Vector3d::UnitZ()).toRotationMatrix();
      }
      if (obs[i].contains("orientation")) {
        const json& r = obs[i].at("orientation");
        if (!r.is_array() || r.size() != 3) fail(p + ".orientation", "expected 3 rows");
        for (int k = 0; k < 3; ++k) {
          o.orientation.row(k) = vec3(r[static_cast<std::size_t>(k)], p + ".orientation[" + std::to_string(k) + "]").transpose();
        }
      }
      o.motion = parseMotion(required(obs[i], "motion", p), p + ".motion");
      try {
        o.validate();
      } catch (const std::invalid_argument& e) {
        fail(p, e.what());
      }
      sc.world.obstacles.push_back(o);
    }
  }
  if (j.contains("gap")) {
    const json& g = j.at("gap");
    const std::string p = "$.gap";
    checkKeys(g, p, {"gate", "z_desired", "theta_tol", "sample_range"});
    GapSpec gap;
    gap.gate = integer(required(g, "gate", p), p + ".gate");
    if (g.contains("z_desired")) gap.zDesired = vec3(g.at("z_desired"), p + ".z_desired");
    gap.thetaTol = number(g, "theta_tol", p, gap.thetaTol);
    gap.sampleRange = integer(g, "sample_range", p, gap.sampleRange);
    try {
      gap.validate();
    } catch (const std::invalid_argument& e) {
      fail(p, e.what());
    }
    if (gap.gate >= sc.gateCount() - 1) fail(p + ".gate", "gap gate needs a following segment");
    sc.world.gap = gap;
  }
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    fail(root, e.what());
  }
  return sc;
}

Scenario loadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parseScenario(buf.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

std::string scenarioToJson(const Scenario& sc) {
  json j;
  j["schema"] = kScenarioSchema;
  j["name"] = sc.name;
  j["description"] = sc.description;
  j["reconstruction"] = sc.reconstruction;
  j["start_time"] = sc.startTime;
  j["start_state"] = matColsJson(sc.startState);
  j["terminal_derivatives"] = matColsJson(sc.terminalDerivatives);
  j["gates"] = json::array();
  for (const auto& g : sc.world.gates) j["gates"].push_back({{"motion", motionJson(g.motion)}, {"radius", g.radius}});
  j["obstacles"] = json::array();
  for (const auto& o : sc.world.obstacles) {
    json rows = json::array();
    for (int k = 0; k < 3; ++k) rows.push_back(vecJson(o.orientation.row(k).transpose()));
    j["obstacles"].push_back({{"semi_axes", vecJson(o.semiAxes)}, {"orientation", rows}, {"motion", motionJson(o.motion)}});
  }
  if (sc.world.gap) {
    const auto& g = *sc.world.gap;
    j["gap"] = {{"gate", g.gate}, {"z_desired", vecJson(g.zDesired)}, {"theta_tol", g.thetaTol},
                {"sample_range", g.sampleRange}};
  }
  j["planner"] = plannerJson(sc.config);
  return j.dump(2);
}

std::string planToJson(const PlanResult& plan) {
  json j;
  j["schema"] = kPlanSchema;
  const auto& p = plan.params;
  j["order"] = p.order;
  j["start_time"] = p.startTime;
  j["segments"] = json::array();
  for (int n = 0; n < p.segmentCount(); ++n) {
    const auto& C = p.coeffs[static_cast<std::size_t>(n)];
    json rows = json::array();
    for (int r = 0; r < C.rows(); ++r) rows.push_back(vecJson(C.row(r).transpose()));
    j["segments"].push_back({{"duration", p.durations(n)}, {"pieces", p.pieces[static_cast<std::size_t>(n)]},
                             {"coefficients", rows}});
  }
  j["total_time"] = plan.totalTime;
  j["cost"] = plan.cost;
  j["iterations"] = plan.iterations;
  j["status"] = toString(plan.status);
  j["stale"] = plan.stale;
  j["arrival_times"] = plan.arrivalTimes;
  j["gate_distances"] = plan.gateDistances;
  j["residuals"] = {{"thrust", plan.residuals.thrust}, {"body_rate", plan.residuals.bodyRate},
                    {"gap", plan.residuals.gap}, {"obstacle", plan.residuals.obstacle}};
  return j.dump(2);
}

SegmentedTrajectory parsePlanTrajectory(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("$: invalid JSON: ") + e.what());
  }
  const json& schema = required(j, "schema", "$");
  if (!schema.is_string() || schema.get<std::string>() != kPlanSchema) {
    fail("$.schema", std::string("expected \"") + kPlanSchema + "\"");
  }
  TrajectoryParams p;
  p.order = integer(required(j, "order", "$"), "$.order");
  p.startTime = number(required(j, "start_time", "$"), "$.start_time");
  const json& segs = required(j, "segments", "$");
  if (!segs.is_array() || segs.empty()) fail("$.segments", "expected a non-empty array");
  p.durations.resize(static_cast<Eigen::Index>(segs.size()));
  for (std::size_t n = 0; n < segs.size(); ++n) {
    const std::string path = "$.segments[" + std::to_string(n) + "]";
    const int M = integer(required(segs[n], "pieces", path), path + ".pieces");
    p.durations(static_cast<Eigen::Index>(n)) = number(required(segs[n], "duration", path), path + ".duration");
    const json& rows = required(segs[n], "coefficients", path);
    if (!rows.is_array() || static_cast<int>(rows.size()) != 2 * p.order * M) {
      fail(path + ".coefficients", "expected 2 * order * pieces rows");
    }
    Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), 3);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      C.row(static_cast<Eigen::Index>(r)) = vec3(rows[r], path + ".coefficients[" + std::to_string(r) + "]").transpose();
    }
    p.coeffs.push_back(C);
    p.pieces.push_back(M);
  }
  return p.toTrajectory();
}

}  // namespace racetraj
