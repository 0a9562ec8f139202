#pragma once

#include <functional>
#include <string>
#include <vector>

#include "biped/fivelink/model.hpp"
#include "biped/numerics/integrate.hpp"
#include "biped/planner/leg_force.hpp"
#include "biped/sim/terrain.hpp"

namespace biped::fivelink {

enum class TorqueMethod { Osc, PolarJt };

struct WalkerConfig {
  planner::PlannerGains gains;
  TorqueMethod method = TorqueMethod::Osc;
};

/// Extra generalized force (disturbances), evaluated per dynamics call.
using GeneralizedForceFn =
    std::function<Vector7d(double t, const RobotState&, const DynamicsTerms&)>;

struct ImpactEvent {
  double t = 0.0;
  RobotState post;        // relabeled post-impact state
  Vector7d qd_plus;       // pre-relabel post-impact velocity
  Eigen::Vector2d deltaF;
};

struct WalkSample {
  double t = 0.0;
  RobotState state;
  Eigen::Vector4d u = Eigen::Vector4d::Zero();
  Eigen::Vector2d grf = Eigen::Vector2d::Zero();  // actual constraint force
  std::string event;
};

struct WalkRun {
  std::vector<WalkSample> samples;
  std::vector<ImpactEvent> impacts;
  bool fell = false;
  std::string fall_reason;
  double t_end = 0.0;
  RobotState final_state;
};

struct WalkOptions {
  double t0 = 0.0;
  double duration = 15.0;
  num::Tolerances tol{1e-8, 1e-10};
  bool record = true;
  double pitch_band = 1.0;     // |q5| fall limit [rad]
  double min_com_frac = 0.3;   // of the initial CoM height
  double clearance = 2e-3;     // swing-foot height arming the impact guard [m]
};

/// Layer-1 leg-force planner plus task-space torque mapping, integrated
/// through impacts. The stance foot is assumed pinned at its position at
/// t0 (the state's stance slots).
WalkRun walk(const RobotState& init, const WalkerConfig& cfg, const RobotParams& p,
             const sim::Terrain& terrain, const GeneralizedForceFn& ext, const WalkOptions& opts);

/// Joint torques the walker applies at one state (exposed for logging and
/// tests).
Eigen::Vector4d walker_torques(const RobotState& s, const DynamicsTerms& t,
                               const WalkerConfig& cfg, const RobotParams& p);

/// Stride-to-stride residuals between consecutive post-impact states,
/// Euclidean over all components except the horizontal base position.
std::vector<double> stride_residuals(const std::vector<ImpactEvent>& impacts);

/// Documented starting state: mid-stance posture with a forward push,
/// perturbed from the converged gait (see README).
RobotState nominal_initial_state(const RobotParams& p);

}  // namespace biped::fivelink
