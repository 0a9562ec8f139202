#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "biped/btslip/model.hpp"
#include "biped/control/laws.hpp"
#include "biped/control/stiffness.hpp"
#include "biped/fivelink/sim.hpp"
#include "biped/numerics/integrate.hpp"
#include "biped/planner/leg_force.hpp"
#include "biped/sim/disturbance.hpp"
#include "biped/sim/terrain.hpp"

namespace biped::sim {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& field, const std::string& why)
      : std::runtime_error("config field '" + field + "': " + why), field_name(field) {}
  std::string field_name;
};

enum class Model { Btslip, Fivelink };
enum class ControllerKind { Passive, Vpp, VppDlqr, Combined, Fdc, Osc, PolarJt };

struct TemplateInitialState {
  bool use_fixed_point = true;   // start on the converged VPP gait section
  btslip::TemplateState explicit_state;  // when use_fixed_point is false
};

struct FivelinkInitialState {
  bool use_nominal = true;
  fivelink::RobotState explicit_state;
};

struct ScenarioConfig {
  int version = 1;
  Model model = Model::Btslip;
  ControllerKind controller = ControllerKind::Fdc;
  double duration = 20.0;

  btslip::TemplateParams tparams;
  fivelink::RobotParams rparams;

  ctrl::FdcGains fdc;
  ctrl::StiffnessGains stiffness;
  planner::PlannerGains planner_gains;
  ctrl::VppInput delta{0.1, 0.0};
  Eigen::Matrix<double, 5, 1> Q_diag{10.0, 10.0, 1.0, 1.0, 1.0};
  Eigen::Vector2d R_diag{100.0, 100.0};

  // Seed for the fixed-point search behind "fixed-point" initial states and
  // the analyze verb.
  Eigen::Matrix<double, 5, 1> section_seed{1.0, M_PI / 2, 1.1, 0.0, 0.0};

  TemplateInitialState template_init;
  FivelinkInitialState fivelink_init;
  fivelink::TorqueMethod torque_method = fivelink::TorqueMethod::Osc;

  DisturbanceSchedule disturbances;
  Terrain terrain;

  num::Tolerances tol{1e-9, 1e-11};
  unsigned long long rng_seed = 0;
  double jitter = 0.0;

  std::string csv_path;
  std::string metrics_path;

  const char* controller_name() const;
};

/// Parses and validates a scenario document; throws ConfigError naming the
/// offending field.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);

}  // namespace biped::sim
