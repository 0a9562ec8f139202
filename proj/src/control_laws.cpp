#include "biped/control/laws.hpp"

#include <algorithm>
#include <cmath>

namespace biped::ctrl {

namespace {
constexpr double kRegionEps = 1e-3;  // keeps tan(beta) finite at the A boundary
}

double vpp_torque(const btslip::LegGeometry& geom, double F_s, const VppInput& input,
                  const btslip::TemplateParams& p) {
  if (geom.L <= 1e-12) throw btslip::ZeroLegLength();
  const double psi = geom.psi;
  const double num = p.r_h * std::sin(psi) + input.r_vpp * std::sin(psi - input.gamma);
  const double den = geom.L + p.r_h * std::cos(psi) + input.r_vpp * std::cos(psi - input.gamma);
  if (std::abs(den) < 1e-9) throw DegenerateDenominator();
  return F_s * geom.L * (num / den);
}

double fdc_beta(double phi_tilde, double phi_tilde_dot, const FdcGains& gains, double alpha,
                double eta) {
  const double beta_tilde = -gains.c * phi_tilde - gains.d * phi_tilde_dot;
  const double beta_raw = eta + beta_tilde;

  double lo = -M_PI / 2 + kRegionEps;
  double hi = M_PI / 2 - kRegionEps;
  if (gains.mu_fric_hat.has_value()) {
    const double cone = std::atan(*gains.mu_fric_hat);
    lo = std::max(lo, alpha - M_PI / 2 - cone);
    hi = std::min(hi, alpha - M_PI / 2 + cone);
  } else {
    lo = std::max(lo, alpha - M_PI);
    hi = std::min(hi, alpha);
  }
  if (lo > hi) throw EmptyFeasibleSet();
  return std::clamp(beta_raw, lo, hi);
}

double vbla_touchdown(double vx, double vy, double L_ref, double mu, double g) {
  if (!(L_ref > 0.0)) throw std::invalid_argument("vbla_touchdown: L_ref must be positive");
  const double scale = std::sqrt(g * L_ref);
  const double ox = mu * vx / scale;
  const double oy = mu * vy / scale - (1.0 - mu);
  if (std::hypot(ox, oy) < 1e-12) throw ZeroVector();
  return std::atan2(std::abs(oy), ox);
}

}  // namespace biped::ctrl
