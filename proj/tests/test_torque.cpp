#include <doctest.h>

#include <random>

#include "biped/fivelink/model.hpp"
#include "biped/numerics/linalg.hpp"
#include "biped/torque/osc.hpp"
#include "biped/torque/polar_jt.hpp"

using namespace biped;
using namespace biped::fivelink;
using Eigen::Vector4d;

namespace {

std::mt19937& rng() {
  static std::mt19937 r(99);
  return r;
}

RobotState random_state() {
  std::uniform_real_distribution<double> angle(-0.7, 0.7);
  RobotState s;
  for (int i = 0; i < 5; ++i) s.q[i] = angle(rng());
  s.q[5] = angle(rng());
  s.q[6] = 0.3 + 0.3 * std::abs(angle(rng()));
  for (int i = 0; i < 7; ++i) s.qd[i] = angle(rng());
  return s;
}

Vector4d random_force(double scale = 200.0) {
  std::uniform_real_distribution<double> f(-scale, scale);
  Vector4d F;
  for (int i = 0; i < 4; ++i) F[i] = f(rng());
  return F;
}

}  // namespace

TEST_CASE("projector laws") {
  const RobotParams p;
  for (int trial = 0; trial < 50; ++trial) {
    const DynamicsTerms t = dynamics_terms(random_state(), p);
    const auto tj = torque::task_jacobians(t);
    CHECK((tj.P * tj.P - tj.P).norm() < 1e-10);
    CHECK((tj.P - tj.P.transpose()).norm() < 1e-10);
    CHECK((tj.P * tj.J_c.transpose()).norm() < 1e-10);
    CHECK(std::abs(tj.M_c.determinant()) > 1e-12);
  }
}

TEST_CASE("osc: zero force gives zero torque, and the map is linear") {
  const RobotParams p;
  const DynamicsTerms t = dynamics_terms(random_state(), p);
  CHECK(torque::osc_torques(t, Vector4d::Zero()).norm() < 1e-12);

  const Vector4d F1 = random_force(), F2 = random_force();
  const double a = 0.7, b = -1.3;
  const Vector4d lhs = torque::osc_torques(t, a * F1 + b * F2);
  const Vector4d rhs = a * torque::osc_torques(t, F1) + b * torque::osc_torques(t, F2);
  CHECK((lhs - rhs).norm() < 1e-10 * std::max(1.0, rhs.norm()));
}

TEST_CASE("osc: fully actuated degenerate case collapses to J'F") {
  const RobotParams p;
  const DynamicsTerms t = dynamics_terms(random_state(), p);
  const auto tj = torque::task_jacobians(t);
  const Vector4d F = random_force();
  const Vector7d tau = torque::osc_torques_full(t, F, Matrix7d::Identity());
  CHECK((tau - tj.J.transpose() * F).norm() < 1e-9 * std::max(1.0, tau.norm()));
}

TEST_CASE("osc: unactuated rows vanish and the least-squares oracle agrees") {
  const RobotParams p;
  for (int trial = 0; trial < 200; ++trial) {
    const DynamicsTerms t = dynamics_terms(random_state(), p);
    const Vector4d F = random_force();
    const Vector7d tau = torque::osc_torques_full(t, F, t.B);
    const double scale = std::max(1.0, tau.norm());
    CHECK(std::abs(tau[4]) <= 1e-9 * scale);
    CHECK(std::abs(tau[5]) <= 1e-9 * scale);
    CHECK(std::abs(tau[6]) <= 1e-9 * scale);

    // Independent route: solve min ||tau0|| s.t. U (J'F + N tau0) = 0 by a
    // KKT system, then compare the realized torques.
    const auto tj = torque::task_jacobians(t);
    const Matrix7d Mc_inv = tj.M_c.partialPivLu().inverse();
    const Eigen::Matrix<double, 4, 7> T = tj.J * Mc_inv * tj.P;
    const Eigen::Matrix4d G = T * tj.J.transpose();
    const Eigen::Matrix<double, 4, 7> JTsharp = G.partialPivLu().solve(T);
    const Matrix7d N = Matrix7d::Identity() - tj.J.transpose() * JTsharp;
    const Matrix7d U = Matrix7d::Identity() - t.B;
    const Eigen::Matrix<double, 7, 7> A = U * N;
    // KKT for min ||x|| with A x = -U J'F (consistent system).
    Eigen::MatrixXd kkt(14, 14);
    kkt.setZero();
    kkt.topLeftCorner<7, 7>() = Matrix7d::Identity();
    kkt.topRightCorner<7, 7>() = A.transpose();
    kkt.bottomLeftCorner<7, 7>() = A;
    Eigen::VectorXd rhs(14);
    rhs.setZero();
    rhs.tail<7>() = -U * (tj.J.transpose() * F);
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    const Vector7d tau_oracle = tj.J.transpose() * F + N * sol.head<7>();
    CHECK((tau - tau_oracle).norm() <= 1e-6 * std::max(1.0, tau_oracle.norm()));
  }
}

TEST_CASE("polar JT: straight leg with pure axial force loads no joints") {
  const RobotParams p;
  RobotState s;
  s.q.setZero();  // both legs straight down
  s.q[6] = p.femur.length + p.shin.length;
  Vector4d F_polar;
  F_polar << 120.0, 0.0, 80.0, 0.0;
  const Vector4d tau = torque::polar_jt_torques(s.q, p, F_polar);
  CHECK(tau.norm() < 1e-10);
}

TEST_CASE("polar JT: tangential force on a straight leg gives L and L_s moments") {
  const RobotParams p;
  RobotState s;
  s.q.setZero();
  const double L = p.femur.length + p.shin.length;
  Vector4d F_polar;
  F_polar << 0.0, 50.0, 0.0, 0.0;  // stance tangential only
  const Vector4d tau = torque::polar_jt_torques(s.q, p, F_polar);
  CHECK(std::abs(tau[1]) == doctest::Approx(L * 50.0).epsilon(1e-9));
  CHECK(std::abs(tau[3]) == doctest::Approx(p.shin.length * 50.0).epsilon(1e-9));
  CHECK(tau[0] == doctest::Approx(0.0));
  CHECK(tau[2] == doctest::Approx(0.0));
}

TEST_CASE("polar JT agrees with a finite-difference Jacobian of (L, L alpha)") {
  const RobotParams p;
  std::uniform_real_distribution<double> angle(-0.6, 0.6);
  for (int trial = 0; trial < 100; ++trial) {
    RobotState s = random_state();

    auto polar_coords = [&](bool stance, const Vector7d& q) {
      const Eigen::Vector2d foot =
          stance ? stance_foot_position(q, p) : swing_foot_position(q, p);
      const Eigen::Vector2d hip(q[5], q[6]);
      const Eigen::Vector2d v = hip - foot;
      return Eigen::Vector2d(v.norm(), M_PI - std::atan2(v[1], v[0]));
    };

    for (bool stance : {true, false}) {
      const int ih = stance ? 1 : 0, ik = stance ? 3 : 2;
      const Eigen::Matrix2d J = torque::polar_leg_jacobian(s.q, p, stance);
      const double L = polar_coords(stance, s.q)[0];
      Eigen::Matrix2d J_fd;
      for (int c = 0; c < 2; ++c) {
        Vector7d qp = s.q, qm = s.q;
        const int idx = c == 0 ? ih : ik;
        qp[idx] += 1e-6;
        qm[idx] -= 1e-6;
        const Eigen::Vector2d dp = (polar_coords(stance, qp) - polar_coords(stance, qm)) / 2e-6;
        J_fd(0, c) = dp[0];
        J_fd(1, c) = L * dp[1];
      }
      CHECK((J - J_fd).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}
