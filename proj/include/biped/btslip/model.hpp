#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>

#include "biped/sim/terrain.hpp"

namespace biped::btslip {

/// Trunk-plus-massless-spring-legs walking template.
///
/// Angle conventions used throughout:
///  - phi: trunk pitch, CCW-positive, pi/2 = vertical.
///  - leg angle alpha: direction of the foot->hip vector measured CCW from
///    +x, so a vertical leg has alpha = pi/2 and a foot placed ahead of the
///    hip has alpha > pi/2 (the "110 deg" spelling of the touchdown angle).
///  - ray angle: the touchdown ray hip->foot measured above the forward
///    horizontal (the "70.6 deg" spelling); ray = pi - alpha.
struct TemplateParams {
  double m = 80.0;       // trunk mass [kg]
  double J = 4.58;       // trunk inertia [kg m^2]
  double r_h = 0.1;      // CoM -> hip distance [m]
  double r_vpp = 0.1;    // CoM -> VPP distance [m]
  double L0 = 1.0;       // leg rest length [m]
  double k0 = 14000.0;   // nominal leg stiffness [N/m]
  double g = 9.81;       // gravity [m/s^2]
  double alpha0 = 70.6 * M_PI / 180.0;  // touchdown angle of attack, ray convention [rad]
};

inline double ray_from_leg_angle(double alpha) { return M_PI - alpha; }
inline double leg_from_ray_angle(double ray) { return M_PI - ray; }

/// Accept either spelling of a touchdown angle and return the ray convention.
inline double normalize_attack_angle(double a) { return a > M_PI / 2 ? M_PI - a : a; }

inline double wrap_pi(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0) a += 2.0 * M_PI;
  return a - M_PI;
}

enum class Phase { SingleSupport, DoubleSupport };

struct FootContact {
  double x = 0.0;
  double y = 0.0;
};

struct TemplateState {
  double x = 0.0, y = 0.0, phi = M_PI / 2;
  double xd = 0.0, yd = 0.0, phid = 0.0;
  Phase phase = Phase::SingleSupport;
  std::array<std::optional<FootContact>, 2> feet;  // legs 1 and 2 at indices 0 and 1

  int contact_count() const {
    return (feet[0].has_value() ? 1 : 0) + (feet[1].has_value() ? 1 : 0);
  }
  double hip_x(const TemplateParams& p) const { return x - p.r_h * std::cos(phi); }
  double hip_y(const TemplateParams& p) const { return y - p.r_h * std::sin(phi); }
};

struct LegGeometry {
  double L = 0.0;      // hip -> foot length [m]
  double Ldot = 0.0;   // extension rate [m/s]
  double alpha = 0.0;  // leg angle, foot->hip vector vs +x [rad]
  double alphadot = 0.0;
  double psi = 0.0;    // leg axis relative to trunk axis (alpha - phi) [rad]
  double eta = 0.0;    // leg axis relative to foot->CoM ray [rad]
  double hip_x = 0.0, hip_y = 0.0;
  double foot_x = 0.0, foot_y = 0.0;
};

struct LegNotInContact : std::runtime_error {
  LegNotInContact() : std::runtime_error("leg is not in contact") {}
};
struct ZeroLegLength : std::runtime_error {
  ZeroLegLength() : std::runtime_error("leg length is zero") {}
};
struct NoContactLegs : std::runtime_error {
  NoContactLegs() : std::runtime_error("no contact legs; the walking model has no flight phase") {}
};

LegGeometry leg_geometry(const TemplateState& s, int leg, const TemplateParams& p);

/// Force applied to the torso at the hip by a massless leg carrying axial
/// force F_s and hip torque tau.
struct Wrench2 {
  double fx = 0.0, fy = 0.0;
};
Wrench2 leg_wrench(double F_s, double tau, const LegGeometry& geom);

struct LegForce {
  int leg = 0;      // 0 or 1
  double F_s = 0.0; // axial spring force [N]
  double tau = 0.0; // hip torque [N m]
};

struct Accel {
  double xdd = 0.0, ydd = 0.0, phidd = 0.0;
};

/// CoM wrench from an external disturbance, already mapped to the trunk.
struct ExternalWrench {
  double fx = 0.0, fy = 0.0, mz = 0.0;
};

Accel btslip_dynamics(const TemplateState& s, std::span<const LegForce> forces,
                      const TemplateParams& p, const ExternalWrench& ext = {});

struct GuardValues {
  double touchdown = 0.0;                       // y_h - L0 sin(a) - h(x_cand); falling => SS->DS
  std::array<std::optional<double>, 2> takeoff; // L_i - L0; rising => DS->SS
};

/// Guard functions evaluated at a state. touchdown_ray is the commanded
/// attack angle in the ray convention.
GuardValues guards(const TemplateState& s, const TemplateParams& p, const sim::Terrain& terrain,
                   double touchdown_ray);

/// Foot candidate for the swing leg held at the given attack angle.
FootContact touchdown_point(const TemplateState& s, const TemplateParams& p,
                            const sim::Terrain& terrain, double touchdown_ray);

/// Mechanical energy with conservative springs of the given stiffnesses.
double total_energy(const TemplateState& s, const TemplateParams& p,
                    std::span<const double> stiffness);

}  // namespace biped::btslip
