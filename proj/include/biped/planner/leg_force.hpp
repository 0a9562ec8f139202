#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace biped::planner {

struct PlannerGains {
  double k = 7500.0;     // virtual leg stiffness [N/m]
  double k_d = 100.0;    // virtual spring damping [N s/m]
  double c = 10.0;       // trunk position gain [-]
  double c_sw = 10.0;    // swing angle gain [-]
  double d = 1.0;        // trunk velocity gain [s]
  double mu_vbla = 0.5;
  double L0 = 0.37;      // virtual leg rest length [m]
};

/// Desired force at a foot end, conjugate to the hip-to-foot virtual leg
/// vector: +F acts on the hip, -F on the foot. polar = (F_r axial along
/// foot->hip, F_t perpendicular, CW-positive); theta_p is the angle of the
/// global force measured from vertical.
struct DesiredFootForce {
  int leg = 0;
  double F_r = 0.0;
  double F_t = 0.0;
  Eigen::Vector2d global = Eigen::Vector2d::Zero();
  double theta_p = 0.0;
};

struct ZeroLegLength : std::runtime_error {
  ZeroLegLength() : std::runtime_error("virtual leg length is zero") {}
};

/// Stance-leg force: virtual spring-damper along the leg with the trunk
/// force-direction redirect. alpha and eta follow the leg-angle conventions
/// of btslip::LegGeometry (alpha = foot->hip angle from +x).
DesiredFootForce stance_force(double L, double Ldot, double eta, double alpha, double phi_tilde,
                              double phi_tilde_dot, const PlannerGains& g);

/// Swing-leg force: PD on virtual leg length (with length retraction around
/// the vertical) and on the leg angle toward the VBLA touchdown target.
/// alpha_ray/alphadot_ray use the touchdown-ray convention; vx, vy is the CoM
/// velocity used by the VBLA blend.
DesiredFootForce swing_force(double L, double Ldot, double alpha_ray, double alphadot_ray,
                             double vx, double vy, const PlannerGains& g, double gravity);

/// Eq-style retraction rule for the desired swing leg length.
double swing_length_target(double alpha_ray, double L0);

}  // namespace biped::planner
