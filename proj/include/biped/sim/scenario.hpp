#pragma once

#include <json.hpp>
#include <optional>

#include "biped/btslip/sim.hpp"
#include "biped/fivelink/sim.hpp"
#include "biped/poincare/map.hpp"
#include "biped/sim/config.hpp"

namespace biped::sim {

struct EventLogEntry {
  double t = 0.0;
  std::string type;
  int leg = -1;
};

struct RunMetrics {
  bool fell = false;
  std::string fall_reason;
  int steps_completed = 0;
  double duration = 0.0;
  double mean_forward_speed = 0.0;
  double trunk_pitch_min = 0.0, trunk_pitch_max = 0.0;
  double max_friction_ratio = 0.0;  // over stance samples with F_y > 1 N
  std::vector<double> convergence_residuals;  // stride-to-stride
  std::vector<EventLogEntry> events;

  nlohmann::json to_json() const;
};

struct ScenarioResult {
  RunMetrics metrics;
  std::optional<btslip::TemplateRun> template_run;
  std::optional<fivelink::WalkRun> fivelink_run;
};

struct SimulationFailure : std::runtime_error {
  explicit SimulationFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Deterministic closed-loop run: resolves the controller and initial state,
/// simulates, computes metrics, and writes the CSV / metrics files when
/// paths are configured. keep_run retains the full trajectory in the result.
ScenarioResult run_scenario(const ScenarioConfig& cfg, bool keep_run = false);

/// Poincare analysis of the configured template gait (fixed point, Jacobians,
/// eigenvalues, DLQR gain) serialized to JSON.
nlohmann::json analyze_scenario(const ScenarioConfig& cfg, bool parallel = false);
nlohmann::json linearization_to_json(const poincare::PoincareLinearization& lin);

/// Fixed point + linearization + DLQR gain for the configured template gait.
poincare::PoincareLinearization analyze_gait(const ScenarioConfig& cfg, bool parallel = false);

void write_csv(const ScenarioConfig& cfg, const ScenarioResult& result, std::ostream& out);

}  // namespace biped::sim
