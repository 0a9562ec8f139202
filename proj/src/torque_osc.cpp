#include "biped/torque/osc.hpp"

#include <Eigen/Dense>

#include "biped/numerics/linalg.hpp"

namespace biped::torque {

using fivelink::Matrix7d;
using fivelink::Vector7d;

TaskJacobians task_jacobians(const fivelink::DynamicsTerms& t) {
  TaskJacobians tj;
  // Task coordinates are the virtual legs p_hip - p_foot; the hip is the
  // floating base, so only the base columns of the hip Jacobian are set.
  Eigen::Matrix<double, 2, 7> J_hip = Eigen::Matrix<double, 2, 7>::Zero();
  J_hip(0, 5) = 1.0;
  J_hip(1, 6) = 1.0;
  tj.J.topRows<2>() = J_hip - t.J_st;
  tj.J.bottomRows<2>() = J_hip - t.J_sw;
  tj.J_c = t.J_st;
  tj.P = Matrix7d::Identity() - num::pseudo_inverse(tj.J_c) * tj.J_c;
  tj.M_c = tj.P * t.D + Matrix7d::Identity() - tj.P;
  return tj;
}

Vector7d osc_torques_full(const fivelink::DynamicsTerms& t, const Eigen::Vector4d& F,
                          const Matrix7d& B_e) {
  const TaskJacobians tj = task_jacobians(t);

  const Matrix7d Mc_inv = tj.M_c.partialPivLu().inverse();
  const Matrix47d T = tj.J * Mc_inv * tj.P;  // J Mc^-1 P
  Eigen::Matrix4d G = T * tj.J.transpose();

  Eigen::JacobiSVD<Eigen::Matrix4d> svd(G);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(3);
  if (smin < 1e-12 * smax) {
    // Tikhonov damping near the singularity; give up if still hopeless.
    G += 1e-10 * smax * Eigen::Matrix4d::Identity();
    Eigen::JacobiSVD<Eigen::Matrix4d> svd2(G);
    if (svd2.singularValues()(3) < 1e-10 * svd2.singularValues()(0)) throw SingularTaskInertia();
  }
  const Matrix47d JTsharp = G.partialPivLu().solve(T);
  const Matrix7d N = Matrix7d::Identity() - tj.J.transpose() * JTsharp;

  const Matrix7d U = Matrix7d::Identity() - B_e;  // selects unactuated rows
  const Vector7d tau_task = tj.J.transpose() * F;
  const Vector7d tau0 = -num::pseudo_inverse(U * N) * (U * tau_task);
  return tau_task + N * tau0;
}

Eigen::Vector4d osc_torques(const fivelink::DynamicsTerms& t, const Eigen::Vector4d& F) {
  return osc_torques_full(t, F, t.B).head<4>();
}

}  // namespace biped::torque
