#pragma once

#include <Eigen/Core>
#include <stdexcept>

#include "biped/fivelink/model.hpp"

namespace biped::torque {

using Matrix47d = Eigen::Matrix<double, 4, 7>;

/// Projector machinery for the constrained, underactuated task-space map.
struct TaskJacobians {
  Matrix47d J;                     // stacked hip-to-foot Jacobians [stance; swing]
  fivelink::Matrix27d J_c;         // stance-foot constraint Jacobian
  fivelink::Matrix7d P;            // orthogonal projector, P Jc' = 0
  fivelink::Matrix7d M_c;          // P D + I - P
};

struct SingularTaskInertia : std::runtime_error {
  SingularTaskInertia() : std::runtime_error("constraint blocks the task directions") {}
};

TaskJacobians task_jacobians(const fivelink::DynamicsTerms& t);

/// Joint torques realizing the desired foot-end forces
/// F = (Fx_st, Fy_st, Fx_sw, Fy_sw) on the constrained underactuated system:
/// tau = J'F + N tau0 with the null-space torque chosen to zero the
/// unactuated rows. Returns the four actuated torques. B_e can be overridden
/// (B = I gives the fully actuated degenerate case tau = J'F).
Eigen::Vector4d osc_torques(const fivelink::DynamicsTerms& t, const Eigen::Vector4d& F);

fivelink::Vector7d osc_torques_full(const fivelink::DynamicsTerms& t, const Eigen::Vector4d& F,
                                    const fivelink::Matrix7d& B_e);

}  // namespace biped::torque
