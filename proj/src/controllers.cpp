#include "biped/control/controllers.hpp"

#include <cmath>

namespace biped::ctrl {

namespace {
double spring_force(double k, double L0, double L) { return std::max(0.0, k * (L0 - L)); }
}  // namespace

void PassiveController::commands(const btslip::TemplateState&,
                                 std::span<const btslip::LegGeometry> geoms,
                                 std::span<const int> legs,
                                 std::span<btslip::LegForce> out) const {
  for (size_t i = 0; i < geoms.size(); ++i) {
    out[i].leg = legs[i];
    out[i].F_s = spring_force(p_.k0, p_.L0, geoms[i].L);
    out[i].tau = 0.0;
  }
}

void VppController::commands(const btslip::TemplateState&,
                             std::span<const btslip::LegGeometry> geoms, std::span<const int> legs,
                             std::span<btslip::LegForce> out) const {
  for (size_t i = 0; i < geoms.size(); ++i) {
    out[i].leg = legs[i];
    out[i].F_s = spring_force(p_.k0, p_.L0, geoms[i].L);
    out[i].tau = out[i].F_s > 0.0 ? vpp_torque(geoms[i], out[i].F_s, delta_, p_) : 0.0;
  }
}

void VppController::at_section(double, const btslip::TemplateState& s) {
  if (lin_.has_value() && lin_->K.has_value())
    delta_ = poincare::dlqr_update(*lin_, poincare::section_from_state(s));
}

void CombinedController::commands(const btslip::TemplateState& s,
                                  std::span<const btslip::LegGeometry> geoms,
                                  std::span<const int> legs,
                                  std::span<btslip::LegForce> out) const {
  std::array<double, 2> u{0.0, 0.0};
  try {
    stiffness_feedback(s, geoms, legs, ref_, gains_, delta_, p_,
                       std::span<double>(u.data(), geoms.size()));
  } catch (const SingularDecoupling&) {
    u = {0.0, 0.0};
  } catch (const DegenerateDenominator&) {
    u = {0.0, 0.0};
  }
  for (size_t i = 0; i < geoms.size(); ++i) {
    out[i].leg = legs[i];
    out[i].F_s = spring_force(p_.k0 + u[i], p_.L0, geoms[i].L);
    out[i].tau = out[i].F_s > 0.0 ? vpp_torque(geoms[i], out[i].F_s, delta_, p_) : 0.0;
  }
}

void CombinedController::at_section(double, const btslip::TemplateState& s) {
  if (lin_.K.has_value())
    delta_ = poincare::dlqr_update(lin_, poincare::section_from_state(s));
}

void FdcController::commands(const btslip::TemplateState& s,
                             std::span<const btslip::LegGeometry> geoms, std::span<const int> legs,
                             std::span<btslip::LegForce> out) const {
  const double phi_tilde = s.phi - M_PI / 2;
  for (size_t i = 0; i < geoms.size(); ++i) {
    out[i].leg = legs[i];
    out[i].F_s = spring_force(p_.k0, p_.L0, geoms[i].L);
    double tau = 0.0;
    if (out[i].F_s > 0.0) {
      try {
        const double beta = fdc_beta(phi_tilde, s.phid, gains_, geoms[i].alpha, geoms[i].eta);
        tau = out[i].F_s * geoms[i].L * std::tan(beta);
      } catch (const EmptyFeasibleSet&) {
        tau = 0.0;
      }
    }
    out[i].tau = tau;
  }
}

double FdcController::touchdown_ray(const btslip::TemplateState& s) const {
  try {
    return vbla_touchdown(s.xd, s.yd, p_.L0, gains_.mu_vbla, p_.g);
  } catch (const ZeroVector&) {
    return p_.alpha0;
  }
}

poincare::ControllerFactory vpp_factory(const btslip::TemplateParams& p) {
  return [p](const VppInput& delta) -> std::unique_ptr<btslip::TemplateController> {
    return std::make_unique<VppController>(p, delta);
  };
}

ReferenceGait record_reference_gait(const btslip::TemplateParams& p, const VppInput& delta,
                                    const poincare::SectionState& S_star, int knots) {
  btslip::TemplateState s0;
  s0.x = 0.0;
  s0.y = S_star.y;
  s0.phi = S_star.phi;
  s0.xd = S_star.xd;
  s0.yd = S_star.yd;
  s0.phid = S_star.phid;
  s0.phase = btslip::Phase::SingleSupport;
  s0.feet[0] = btslip::FootContact{s0.hip_x(p), 0.0};

  VppController ctl(p, delta);
  btslip::SimulateTemplateOptions opts;
  opts.duration = 5.0;
  opts.tol = {1e-11, 1e-13};
  opts.record = true;
  opts.stop_at_section = true;
  const btslip::TemplateRun run = simulate_template(s0, ctl, p, sim::Terrain{}, nullptr, opts);
  if (!run.reached_section)
    throw std::runtime_error("record_reference_gait: stride did not close");

  std::vector<ReferenceGait::Sample> samples;
  samples.reserve(run.samples.size());
  for (const auto& smp : run.samples) {
    if (!samples.empty() && !(smp.state.x > samples.back().x)) continue;
    samples.push_back({smp.state.x, smp.state.y, smp.state.xd});
  }
  return ReferenceGait::from_stride(samples, knots);
}

namespace nominal {

btslip::TemplateParams params() {
  btslip::TemplateParams p;  // Table 2.1 defaults
  p.k0 = 14000.0;
  return p;
}

VppInput delta() { return VppInput{0.1, 0.0}; }

poincare::SectionState section_seed() {
  // Converged period-one VPP gait at params(); refined by find_fixed_point.
  poincare::SectionState S;
  S.y = 1.0;
  S.phi = M_PI / 2;
  S.xd = 1.1;
  S.yd = 0.0;
  S.phid = 0.0;
  return S;
}

StiffnessGains stiffness_gains() { return StiffnessGains{20.0, 100.0, 10.0}; }

poincare::PoincareLinearization analyze(bool parallel) {
  const btslip::TemplateParams p = params();
  const VppInput d = delta();
  const auto factory = vpp_factory(p);
  const poincare::FixedPointResult fp =
      poincare::find_fixed_point(section_seed(), d, p, factory);
  poincare::LinearizeOptions lopts;
  lopts.parallel = parallel;
  poincare::PoincareLinearization lin = poincare::linearize(fp.S_star, d, p, factory, lopts);
  poincare::make_dlqr(lin, poincare::default_Q(), poincare::default_R());
  return lin;
}

}  // namespace nominal

}  // namespace biped::ctrl
