#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace biped::fivelink {

using Vector7d = Eigen::Matrix<double, 7, 1>;
using Matrix7d = Eigen::Matrix<double, 7, 7>;
using Matrix27d = Eigen::Matrix<double, 2, 7>;

/// Planar five-link biped: torso and two identical femur+shin legs with
/// point feet, floating base at the hip (where both femurs and the trunk
/// attach).
///
/// Generalized coordinates q_e = (q1, q2, q3, q4, q5, x_b, y_b):
///   q1/q3 swing hip/knee, q2/q4 stance hip/knee (joint angles, CCW),
///   q5 absolute trunk pitch (0 = vertical, CCW), (x_b, y_b) the hip point.
/// Link direction convention: a leg segment with absolute angle theta points
/// along (sin theta, -cos theta), i.e. straight down at theta = 0; femur
/// angle is q5 + q_hip, shin angle adds the knee angle; the trunk extends
/// opposite (straight up at q5 = 0).
struct LinkParams {
  double mass;
  double length;
  double inertia;
  double com;  // CoM offset from the proximal joint
};

struct RobotParams {
  LinkParams trunk{12.5, 0.42, 0.23, 0.21};
  LinkParams femur{0.7, 0.19, 0.0045, 0.13};
  LinkParams shin{0.7, 0.19, 0.0045, 0.13};
  double gravity = 9.81;
  double joint_friction = 0.01;  // viscous, on the four actuated joints
};

struct RobotState {
  Vector7d q = Vector7d::Zero();
  Vector7d qd = Vector7d::Zero();
  int stance_leg = 2;  // physical label of the leg occupying the stance slots
};

struct DynamicsTerms {
  Matrix7d D;             // inertia matrix
  Matrix7d C;             // Coriolis matrix from Christoffel symbols
  Vector7d G;             // gravity vector
  Vector7d h;             // C qd + G + joint friction
  Matrix7d B;             // input map diag(I4, 0)
  Matrix27d J_st, J_sw;   // foot-point Jacobians
  Eigen::Vector2d Jdqd_st, Jdqd_sw;
  Eigen::Vector2d p_st, p_sw, v_st, v_sw;
  Eigen::Vector2d p_hip, v_hip;
  Eigen::Vector2d p_com, v_com;
  double V = 0.0;  // potential energy
};

struct SingularKkt : std::runtime_error {
  SingularKkt() : std::runtime_error("constrained dynamics KKT system is singular") {}
};
struct SingularImpactMatrix : std::runtime_error {
  SingularImpactMatrix() : std::runtime_error("impact saddle matrix is singular") {}
};

DynamicsTerms dynamics_terms(const RobotState& s, const RobotParams& p);

struct ConstrainedAccel {
  Vector7d qdd;
  Eigen::Vector2d F_st;  // ground reaction force at the stance foot
};

/// Forward dynamics with the stance foot pinned. u are the four joint
/// torques; q_ext is an optional extra generalized force (disturbances).
ConstrainedAccel constrained_accel(const RobotState& s, const Eigen::Vector4d& u,
                                   const RobotParams& p,
                                   const Vector7d& q_ext = Vector7d::Zero());
ConstrainedAccel constrained_accel(const DynamicsTerms& t, const Eigen::Vector4d& u,
                                   const Vector7d& q_ext = Vector7d::Zero());

struct ImpactResult {
  Vector7d qd_plus;        // post-impact velocity, pre-relabeling coordinates
  Eigen::Vector2d deltaF;  // impulsive force at the impact point
  RobotState next;         // relabeled state (stance label swapped)
};

/// Inelastic instantaneous impact of the swing foot, followed by leg
/// relabeling (q1<->q2, q3<->q4).
ImpactResult impact_map(const RobotState& s, const RobotParams& p);

/// Relabeling matrix R (an involution).
Matrix7d relabeling_matrix();

double kinetic_energy(const RobotState& s, const RobotParams& p);

/// Point kinematics helpers (q-only parts).
Eigen::Vector2d stance_foot_position(const Vector7d& q, const RobotParams& p);
Eigen::Vector2d swing_foot_position(const Vector7d& q, const RobotParams& p);
Eigen::Vector2d com_position(const Vector7d& q, const RobotParams& p);

/// Two-link IK: joint angles placing a foot at hip + L*(cos(ray), -sin(ray)),
/// measured with the touchdown-ray convention. knee_sign picks the elbow
/// branch (+1 bends the knee forward of the hip-foot line).
struct LegJointAngles {
  double hip;
  double knee;
};
LegJointAngles leg_ik(double L, double alpha_ray, double q5, const RobotParams& p,
                      double knee_sign);

}  // namespace biped::fivelink
