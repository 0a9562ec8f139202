#pragma once

#include <optional>
#include <stdexcept>

#include "biped/btslip/model.hpp"

namespace biped::ctrl {

/// VPP location relative to the CoM: distance r_vpp along the trunk axis,
/// rotated by gamma (CCW) off it.
struct VppInput {
  double r_vpp = 0.1;
  double gamma = 0.0;
};

struct FdcGains {
  double c = 10.0;   // position gain [-]
  double d = 1.0;    // velocity gain [s]
  double mu_vbla = 0.5;
  std::optional<double> mu_fric_hat;  // estimated friction coefficient
};

struct DegenerateDenominator : std::runtime_error {
  DegenerateDenominator() : std::runtime_error("VPP torque denominator is degenerate") {}
};
struct EmptyFeasibleSet : std::runtime_error {
  EmptyFeasibleSet() : std::runtime_error("feasible GRF direction set A intersect B is empty") {}
};
struct ZeroVector : std::runtime_error {
  ZeroVector() : std::runtime_error("VBLA blend vector is zero") {}
};

/// Hip torque redirecting the axial leg force through the virtual pivot
/// point. tan(beta) = (r_h sin psi + r_vpp sin(psi - gamma)) /
/// (L + r_h cos psi + r_vpp cos(psi - gamma)), tau = F_s L tan(beta).
double vpp_torque(const btslip::LegGeometry& geom, double F_s, const VppInput& input,
                  const btslip::TemplateParams& p);

/// Force-direction control: beta_tilde = -c phi_tilde - d phi_tilde_dot,
/// total beta = eta + beta_tilde, clamped into A (tangential-force validity)
/// intersected with B (friction cone when mu_fric_hat is set, otherwise the
/// unilateral band 0 < alpha - beta < pi). alpha and eta use the leg-angle
/// conventions of btslip::LegGeometry.
double fdc_beta(double phi_tilde, double phi_tilde_dot, const FdcGains& gains, double alpha,
                double eta);

/// Velocity-based leg adjustment. Returns the touchdown angle in the ray
/// convention (angle of the desired landing ray above the forward ground
/// direction, in (0, pi)).
double vbla_touchdown(double vx, double vy, double L_ref, double mu, double g);

}  // namespace biped::ctrl
