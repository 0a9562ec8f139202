#include "biped/planner/leg_force.hpp"

#include <algorithm>
#include <cmath>

#include "biped/control/laws.hpp"

namespace biped::planner {

namespace {

// Global force from leg-frame components; u along foot->hip, t its CW
// normal. theta_p is measured from vertical so that
// (F_x, F_y) = |F| (sin theta_p, cos theta_p).
void project(DesiredFootForce& f, double alpha) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  f.global[0] = f.F_r * ca + f.F_t * sa;
  f.global[1] = f.F_r * sa - f.F_t * ca;
  f.theta_p = (f.global.squaredNorm() > 0.0) ? std::atan2(f.global[0], f.global[1]) : 0.0;
}

}  // namespace

DesiredFootForce stance_force(double L, double Ldot, double eta, double alpha, double phi_tilde,
                              double phi_tilde_dot, const PlannerGains& g) {
  if (L <= 1e-12) throw ZeroLegLength();
  DesiredFootForce f;
  f.F_r = std::max(0.0, g.k * (g.L0 - L) + g.k_d * Ldot);
  const double beta_tilde = -g.c * phi_tilde - g.d * phi_tilde_dot;
  const double beta = eta + beta_tilde;
  f.F_t = f.F_r * std::tan(beta);
  project(f, alpha);
  return f;
}

double swing_length_target(double alpha_ray, double L0) {
  const double dev = alpha_ray - M_PI / 2;
  if (dev >= -M_PI / 9 && dev <= M_PI / 18) return 0.8 * L0;
  return L0;
}

DesiredFootForce swing_force(double L, double Ldot, double alpha_ray, double alphadot_ray,
                             double vx, double vy, const PlannerGains& g, double gravity) {
  if (L <= 1e-12) throw ZeroLegLength();
  DesiredFootForce f;
  const double alpha_d = ctrl::vbla_touchdown(vx, vy, L, g.mu_vbla, gravity);
  const double L_d = swing_length_target(alpha_ray, g.L0);
  f.F_r = g.k * (L_d - L) + g.k_d * Ldot;
  // The angle-rate damping enters through the leg direction angle, whose
  // rate is -alphadot in the ray convention.
  const double tau_sw = g.c_sw * (alpha_d - alpha_ray) - alphadot_ray;
  f.F_t = tau_sw / L;
  project(f, M_PI - alpha_ray);
  return f;
}

}  // namespace biped::planner
