#pragma once

#include <memory>
#include <optional>

#include "biped/btslip/sim.hpp"
#include "biped/control/laws.hpp"
#include "biped/control/reference.hpp"
#include "biped/control/stiffness.hpp"
#include "biped/poincare/map.hpp"

namespace biped::ctrl {

/// Springs at fixed stiffness, zero hip torque, fixed attack angle.
class PassiveController : public btslip::TemplateController {
 public:
  explicit PassiveController(const btslip::TemplateParams& p) : p_(p) {}
  void commands(const btslip::TemplateState& s, std::span<const btslip::LegGeometry> geoms,
                std::span<const int> legs, std::span<btslip::LegForce> out) const override;
  double touchdown_ray(const btslip::TemplateState&) const override { return p_.alpha0; }

 private:
  btslip::TemplateParams p_;
};

/// VPP posture control with fixed attack angle. With a DLQR linearization
/// attached, the VPP location is re-chosen once per stride at VLO.
class VppController : public btslip::TemplateController {
 public:
  VppController(const btslip::TemplateParams& p, const VppInput& delta) : p_(p), delta_(delta) {}

  void enable_dlqr(const poincare::PoincareLinearization& lin) { lin_ = lin; }

  void commands(const btslip::TemplateState& s, std::span<const btslip::LegGeometry> geoms,
                std::span<const int> legs, std::span<btslip::LegForce> out) const override;
  double touchdown_ray(const btslip::TemplateState&) const override { return p_.alpha0; }
  void at_section(double t, const btslip::TemplateState& s) override;

  const VppInput& delta() const { return delta_; }

 private:
  btslip::TemplateParams p_;
  VppInput delta_;
  std::optional<poincare::PoincareLinearization> lin_;
};

/// Feedback-linearized leg stiffness tracking the recorded periodic gait,
/// VPP hip torques, and the once-per-stride DLQR update of the VPP location.
class CombinedController : public btslip::TemplateController {
 public:
  CombinedController(const btslip::TemplateParams& p, ReferenceGait ref,
                     const StiffnessGains& gains, const poincare::PoincareLinearization& lin)
      : p_(p), ref_(std::move(ref)), gains_(gains), lin_(lin), delta_(lin.delta_star) {}

  void commands(const btslip::TemplateState& s, std::span<const btslip::LegGeometry> geoms,
                std::span<const int> legs, std::span<btslip::LegForce> out) const override;
  double touchdown_ray(const btslip::TemplateState&) const override { return p_.alpha0; }
  void at_section(double t, const btslip::TemplateState& s) override;

 private:
  btslip::TemplateParams p_;
  ReferenceGait ref_;
  StiffnessGains gains_;
  poincare::PoincareLinearization lin_;
  VppInput delta_;
};

/// Force-direction control with VBLA foot placement.
class FdcController : public btslip::TemplateController {
 public:
  FdcController(const btslip::TemplateParams& p, const FdcGains& gains) : p_(p), gains_(gains) {}

  void commands(const btslip::TemplateState& s, std::span<const btslip::LegGeometry> geoms,
                std::span<const int> legs, std::span<btslip::LegForce> out) const override;
  double touchdown_ray(const btslip::TemplateState& s) const override;

 private:
  btslip::TemplateParams p_;
  FdcGains gains_;
};

/// Factory for the Poincare analysis: a plain VPP stride controller.
poincare::ControllerFactory vpp_factory(const btslip::TemplateParams& p);

/// One converged VPP stride from the fixed point, recorded as the reference.
ReferenceGait record_reference_gait(const btslip::TemplateParams& p, const VppInput& delta,
                                    const poincare::SectionState& S_star, int knots = 512);

namespace nominal {

/// Table 2.1 parameters with the chosen leg stiffness; the section seed is
/// the converged period-one VPP gait at these parameters.
btslip::TemplateParams params();
VppInput delta();
poincare::SectionState section_seed();
StiffnessGains stiffness_gains();

/// Fixed point + Jacobians + eigenvalues + DLQR gain for the nominal gait.
poincare::PoincareLinearization analyze(bool parallel = false);

}  // namespace nominal

}  // namespace biped::ctrl
