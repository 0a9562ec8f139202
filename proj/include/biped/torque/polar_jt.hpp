#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "biped/fivelink/model.hpp"

namespace biped::torque {

struct ZeroLegLength : std::runtime_error {
  ZeroLegLength() : std::runtime_error("polar JT: leg length is zero") {}
};

/// Per-leg polar Jacobian of (L, L * alpha_ray) with respect to (hip, knee)
/// joint angles; tau_leg = J_polar' (F_r, F_t).
Eigen::Matrix2d polar_leg_jacobian(const fivelink::Vector7d& q, const fivelink::RobotParams& p,
                                   bool stance);

/// Maps polar-frame forces (Fr_st, Ft_st, Fr_sw, Ft_sw) to the four joint
/// torques (q1..q4 order: swing hip, stance hip, swing knee, stance knee).
Eigen::Vector4d polar_jt_torques(const fivelink::Vector7d& q, const fivelink::RobotParams& p,
                                 const Eigen::Vector4d& F_polar);

}  // namespace biped::torque
