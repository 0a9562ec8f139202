#include "biped/control/stiffness.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace biped::ctrl {

double vpp_tan_beta(const btslip::LegGeometry& geom, const VppInput& input,
                    const btslip::TemplateParams& p) {
  const double psi = geom.psi;
  const double num = p.r_h * std::sin(psi) + input.r_vpp * std::sin(psi - input.gamma);
  const double den = geom.L + p.r_h * std::cos(psi) + input.r_vpp * std::cos(psi - input.gamma);
  if (std::abs(den) < 1e-9) throw DegenerateDenominator();
  return num / den;
}

double ss_stiffness_law(double h1, double Lf_h1, double Lf2_h1, double LgLf_h1,
                        const StiffnessGains& gains) {
  if (std::abs(LgLf_h1) < 1e-9) throw SingularDecoupling();
  return (-Lf2_h1 - gains.k1 * Lf_h1 - gains.k2 * h1) / LgLf_h1;
}

void stiffness_feedback(const btslip::TemplateState& s,
                        std::span<const btslip::LegGeometry> geoms, std::span<const int> legs,
                        const ReferenceGait& ref, const StiffnessGains& gains,
                        const VppInput& delta, const btslip::TemplateParams& p,
                        std::span<double> u_out) {
  if (!ref.valid() || !std::isfinite(s.x)) throw ReferenceOutOfRange();
  const int n = static_cast<int>(geoms.size());
  if (n == 0) throw btslip::NoContactLegs();

  // Force direction per unit axial force and stiffness channels.
  std::array<double, 2> wx{}, wy{}, dl{}, F0{};
  for (int i = 0; i < n; ++i) {
    const btslip::LegGeometry& g = geoms[i];
    const double tanb = vpp_tan_beta(g, delta, p);
    const double ca = std::cos(g.alpha), sa = std::sin(g.alpha);
    wx[i] = ca + tanb * sa;
    wy[i] = sa - tanb * ca;
    dl[i] = p.L0 - g.L;
    if (dl[i] <= 0.0) {
      // Over-extended leg: the force floor keeps F_s = 0 and the stiffness
      // channel is dead.
      dl[i] = 0.0;
      F0[i] = 0.0;
    } else {
      F0[i] = p.k0 * dl[i];
    }
  }

  double a0x = 0.0, a0y = -p.g;
  for (int i = 0; i < n; ++i) {
    a0x += F0[i] * wx[i] / p.m;
    a0y += F0[i] * wy[i] / p.m;
  }

  const double yb_d = ref.y_d(s.x);
  const double yb_dd = ref.y_dd(s.x);
  const double h1 = s.y - ref.y(s.x);
  const double Lf_h1 = s.yd - yb_d * s.xd;
  const double Lf2_h1 = a0y - yb_dd * s.xd * s.xd - yb_d * a0x;
  std::array<double, 2> LgLf_h1{};
  for (int i = 0; i < n; ++i) LgLf_h1[i] = dl[i] * (wy[i] - yb_d * wx[i]) / p.m;

  const double u_floor = -0.95 * p.k0;
  auto clamp_u = [&](double u) { return std::max(u, u_floor); };

  if (n == 1) {
    u_out[0] = clamp_u(ss_stiffness_law(h1, Lf_h1, Lf2_h1, LgLf_h1[0], gains));
    return;
  }

  const double rhs1 = -Lf2_h1 - gains.k1 * Lf_h1 - gains.k2 * h1;
  const bool near_touchdown =
      std::abs(geoms[0].L - p.L0) < 1e-6 || std::abs(geoms[1].L - p.L0) < 1e-6;

  Eigen::Matrix2d A;
  const double h2 = s.xd - ref.xd(s.x);
  const double Lf_h2 = a0x - ref.xd_d(s.x) * s.xd;
  A << LgLf_h1[0], LgLf_h1[1], dl[0] * wx[0] / p.m, dl[1] * wx[1] / p.m;

  Eigen::Vector2d u;
  if (near_touchdown || std::abs(A.determinant()) < 1e-12) {
    // Single-objective pseudo-inverse split across both legs.
    Eigen::RowVector2d a_row(LgLf_h1[0], LgLf_h1[1]);
    const double nn = a_row.squaredNorm();
    if (nn < 1e-18) throw SingularDecoupling();
    u = a_row.transpose() * (rhs1 / nn);
  } else {
    const double rhs2 = -Lf_h2 - gains.k3 * h2;
    u = A.partialPivLu().solve(Eigen::Vector2d(rhs1, rhs2));
  }
  u_out[0] = clamp_u(u[0]);
  u_out[1] = clamp_u(u[1]);

  (void)legs;
}

}  // namespace biped::ctrl
