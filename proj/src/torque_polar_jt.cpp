#include "biped/torque/polar_jt.hpp"

#include <cmath>

namespace biped::torque {

Eigen::Matrix2d polar_leg_jacobian(const fivelink::Vector7d& q, const fivelink::RobotParams& p,
                                   bool stance) {
  const double q_hip = stance ? q[1] : q[0];
  const double q_knee = stance ? q[3] : q[2];
  const double th_f = q[4] + q_hip;
  const double th_s = th_f + q_knee;

  const Eigen::Vector2d dir_f(std::sin(th_f), -std::cos(th_f));
  const Eigen::Vector2d dir_s(std::sin(th_s), -std::cos(th_s));
  const Eigen::Vector2d dirp_f(std::cos(th_f), std::sin(th_f));
  const Eigen::Vector2d dirp_s(std::cos(th_s), std::sin(th_s));

  const Eigen::Vector2d v = -(p.femur.length * dir_f + p.shin.length * dir_s);  // hip - foot
  const double L = v.norm();
  if (L <= 1e-12) throw ZeroLegLength();
  const Eigen::Vector2d u = v / L;
  const Eigen::Vector2d t(u[1], -u[0]);

  Eigen::Matrix2d J_xy;
  J_xy.col(0) = -(p.femur.length * dirp_f + p.shin.length * dirp_s);
  J_xy.col(1) = -p.shin.length * dirp_s;

  Eigen::Matrix2d J_polar;
  J_polar.row(0) = u.transpose() * J_xy;  // dL/d(hip, knee)
  J_polar.row(1) = t.transpose() * J_xy;  // L * d(alpha_ray)/d(hip, knee)
  return J_polar;
}

Eigen::Vector4d polar_jt_torques(const fivelink::Vector7d& q, const fivelink::RobotParams& p,
                                 const Eigen::Vector4d& F_polar) {
  const Eigen::Matrix2d Jst = polar_leg_jacobian(q, p, /*stance=*/true);
  const Eigen::Matrix2d Jsw = polar_leg_jacobian(q, p, /*stance=*/false);
  const Eigen::Vector2d tau_st = Jst.transpose() * F_polar.head<2>();
  const Eigen::Vector2d tau_sw = Jsw.transpose() * F_polar.tail<2>();

  Eigen::Vector4d tau;
  tau[0] = tau_sw[0];  // q1 swing hip
  tau[1] = tau_st[0];  // q2 stance hip
  tau[2] = tau_sw[1];  // q3 swing knee
  tau[3] = tau_st[1];  // q4 stance knee
  return tau;
}

}  // namespace biped::torque
