#include "biped/btslip/model.hpp"

#include <cmath>

namespace biped::btslip {

LegGeometry leg_geometry(const TemplateState& s, int leg, const TemplateParams& p) {
  if (leg < 0 || leg > 1 || !s.feet[leg].has_value()) throw LegNotInContact();
  const FootContact f = *s.feet[leg];

  LegGeometry g;
  g.hip_x = s.hip_x(p);
  g.hip_y = s.hip_y(p);
  g.foot_x = f.x;
  g.foot_y = f.y;

  const double dx = g.hip_x - f.x;
  const double dy = g.hip_y - f.y;
  g.L = std::hypot(dx, dy);
  if (g.L <= 1e-12) throw ZeroLegLength();
  g.alpha = std::atan2(dy, dx);
  g.psi = wrap_pi(g.alpha - s.phi);

  const double cx = s.x - f.x;
  const double cy = s.y - f.y;
  g.eta = wrap_pi(g.alpha - std::atan2(cy, cx));

  // Hip velocity follows from the trunk state; the foot is pinned.
  const double hxd = s.xd + p.r_h * std::sin(s.phi) * s.phid;
  const double hyd = s.yd - p.r_h * std::cos(s.phi) * s.phid;
  g.Ldot = (dx * hxd + dy * hyd) / g.L;
  g.alphadot = (dx * hyd - dy * hxd) / (g.L * g.L);
  return g;
}

Wrench2 leg_wrench(double F_s, double tau, const LegGeometry& geom) {
  if (geom.L <= 1e-12) throw ZeroLegLength();
  const double ca = std::cos(geom.alpha), sa = std::sin(geom.alpha);
  Wrench2 w;
  w.fx = F_s * ca + tau / geom.L * sa;
  w.fy = F_s * sa - tau / geom.L * ca;
  return w;
}

Accel btslip_dynamics(const TemplateState& s, std::span<const LegForce> forces,
                      const TemplateParams& p, const ExternalWrench& ext) {
  if (forces.empty()) throw NoContactLegs();
  double fx = 0.0, fy = 0.0, mz = 0.0;
  for (const LegForce& lf : forces) {
    const LegGeometry geom = leg_geometry(s, lf.leg, p);
    const Wrench2 w = leg_wrench(lf.F_s, lf.tau, geom);
    fx += w.fx;
    fy += w.fy;
    mz += lf.tau + p.r_h * (w.fx * std::sin(s.phi) - w.fy * std::cos(s.phi));
  }
  Accel a;
  a.xdd = (fx + ext.fx) / p.m;
  a.ydd = (fy + ext.fy) / p.m - p.g;
  a.phidd = (mz + ext.mz) / p.J;
  return a;
}

FootContact touchdown_point(const TemplateState& s, const TemplateParams& p,
                            const sim::Terrain& terrain, double touchdown_ray) {
  FootContact f;
  f.x = s.hip_x(p) + p.L0 * std::cos(touchdown_ray);
  f.y = terrain.height(f.x);
  return f;
}

GuardValues guards(const TemplateState& s, const TemplateParams& p, const sim::Terrain& terrain,
                   double touchdown_ray) {
  GuardValues g;
  const FootContact cand = touchdown_point(s, p, terrain, touchdown_ray);
  g.touchdown = s.hip_y(p) - p.L0 * std::sin(touchdown_ray) - cand.y;
  for (int leg = 0; leg < 2; ++leg) {
    if (!s.feet[leg].has_value()) continue;
    const LegGeometry geom = leg_geometry(s, leg, p);
    g.takeoff[leg] = geom.L - p.L0;
  }
  return g;
}

double total_energy(const TemplateState& s, const TemplateParams& p,
                    std::span<const double> stiffness) {
  double e = 0.5 * p.m * (s.xd * s.xd + s.yd * s.yd) + 0.5 * p.J * s.phid * s.phid +
             p.m * p.g * s.y;
  for (int leg = 0; leg < 2; ++leg) {
    if (!s.feet[leg].has_value()) continue;
    const LegGeometry geom = leg_geometry(s, leg, p);
    const double k = static_cast<size_t>(leg) < stiffness.size() ? stiffness[leg] : p.k0;
    const double c = p.L0 - geom.L;
    e += 0.5 * k * c * c;
  }
  return e;
}

}  // namespace biped::btslip
