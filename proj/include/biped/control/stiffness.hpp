#pragma once

#include <array>
#include <span>
#include <stdexcept>

#include "biped/btslip/model.hpp"
#include "biped/control/laws.hpp"
#include "biped/control/reference.hpp"

namespace biped::ctrl {

struct StiffnessGains {
  double k1 = 20.0;
  double k2 = 100.0;
  double k3 = 10.0;
};

struct SingularDecoupling : std::runtime_error {
  SingularDecoupling() : std::runtime_error("decoupling term L_g L_f h1 is singular") {}
};
struct ReferenceOutOfRange : std::runtime_error {
  ReferenceOutOfRange() : std::runtime_error("reference gait undefined at the query point") {}
};

/// tan(beta) of the VPP redirect law; shared between the torque law and the
/// stiffness controller's input model (the hip torque scales with the axial
/// force, so it rides on the stiffness channel too).
double vpp_tan_beta(const btslip::LegGeometry& geom, const VppInput& input,
                    const btslip::TemplateParams& p);

/// Single-support output law: u = (-Lf2h1 - k1 Lfh1 - k2 h1) / LgLfh1.
double ss_stiffness_law(double h1, double Lf_h1, double Lf2_h1, double LgLf_h1,
                        const StiffnessGains& gains);

/// Stiffness increments u_i for every contact leg (aligned with legs):
/// single support tracks the CoM height output, double support adds the
/// forward-speed output; at touchdown (|L - L0| < 1e-6) the decoupling matrix
/// is singular and the single-objective pseudo-inverse form is used.
/// Increments are clamped so k0 + u >= 0.05 k0.
void stiffness_feedback(const btslip::TemplateState& s,
                        std::span<const btslip::LegGeometry> geoms, std::span<const int> legs,
                        const ReferenceGait& ref, const StiffnessGains& gains,
                        const VppInput& delta, const btslip::TemplateParams& p,
                        std::span<double> u_out);

}  // namespace biped::ctrl
