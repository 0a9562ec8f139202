#include "biped/fivelink/model.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace biped::fivelink {

namespace {

// Angle channels: absolute segment angles as affine functions of q.
//   theta_a = offset_a + sel_a . q(0..4)
// T: trunk (flipped by pi so the shared (sin, -cos) direction points up the
// trunk), Fsw/Ssw swing femur/shin, Fst/Sst stance femur/shin.
enum Channel { T = 0, Fsw, Ssw, Fst, Sst, kChannels };

struct ChannelDef {
  double offset;
  double sel[5];
};

constexpr ChannelDef kChannelDefs[kChannels] = {
    {M_PI, {0, 0, 0, 0, 1}},  // T
    {0, {1, 0, 0, 0, 1}},     // Fsw = q5 + q1
    {0, {1, 0, 1, 0, 1}},     // Ssw = q5 + q1 + q3
    {0, {0, 1, 0, 0, 1}},     // Fst = q5 + q2
    {0, {0, 1, 0, 1, 1}},     // Sst = q5 + q2 + q4
};

struct Segment {
  double coeff;
  int channel;
};

// CoM chains of the five links (positions relative to the base point).
struct LinkDef {
  double mass;
  double inertia;
  int omega_channel;
  Segment segs[2];
  int n_segs;
};

struct Kin {
  double theta[kChannels];
  double s[kChannels], c[kChannels];      // sin/cos of channel angles
  double thetad[kChannels];               // channel rates
};

void channel_kinematics(const Vector7d& q, const Vector7d& qd, Kin& k) {
  for (int a = 0; a < kChannels; ++a) {
    double th = kChannelDefs[a].offset;
    double thd = 0.0;
    for (int j = 0; j < 5; ++j) {
      th += kChannelDefs[a].sel[j] * q[j];
      thd += kChannelDefs[a].sel[j] * qd[j];
    }
    k.theta[a] = th;
    k.thetad[a] = thd;
    k.s[a] = std::sin(th);
    k.c[a] = std::cos(th);
  }
}

inline Eigen::Vector2d dir(const Kin& k, int a) { return {k.s[a], -k.c[a]}; }
inline Eigen::Vector2d dir_d(const Kin& k, int a) { return {k.c[a], k.s[a]}; }

void make_links(const RobotParams& p, LinkDef links[5]) {
  links[0] = {p.trunk.mass, p.trunk.inertia, T, {{p.trunk.com, T}}, 1};
  links[1] = {p.femur.mass, p.femur.inertia, Fsw, {{p.femur.com, Fsw}}, 1};
  links[2] = {p.shin.mass, p.shin.inertia, Ssw, {{p.femur.length, Fsw}, {p.shin.com, Ssw}}, 2};
  links[3] = {p.femur.mass, p.femur.inertia, Fst, {{p.femur.com, Fst}}, 1};
  links[4] = {p.shin.mass, p.shin.inertia, Sst, {{p.femur.length, Fst}, {p.shin.com, Sst}}, 2};
}

// Position Jacobian of a chain point; columns 5, 6 are the identity.
void chain_jacobian(const Kin& k, const Segment* segs, int n, Matrix27d& J) {
  J.setZero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d dd = segs[i].coeff * dir_d(k, segs[i].channel);
    const double* sel = kChannelDefs[segs[i].channel].sel;
    for (int j = 0; j < 5; ++j) {
      if (sel[j] == 0.0) continue;
      J(0, j) += dd[0] * sel[j];
      J(1, j) += dd[1] * sel[j];
    }
  }
  J(0, 5) = 1.0;
  J(1, 6) = 1.0;
}

// d/dq_m of the chain Jacobian (nonzero only in columns 0..4).
void chain_jacobian_partial(const Kin& k, const Segment* segs, int n, int m, Matrix27d& dJ) {
  dJ.setZero();
  for (int i = 0; i < n; ++i) {
    const double* sel = kChannelDefs[segs[i].channel].sel;
    if (sel[m] == 0.0) continue;
    const Eigen::Vector2d dd = -segs[i].coeff * dir(k, segs[i].channel);
    for (int j = 0; j < 5; ++j) {
      if (sel[j] == 0.0) continue;
      dJ(0, j) += dd[0] * sel[j] * sel[m];
      dJ(1, j) += dd[1] * sel[j] * sel[m];
    }
  }
}

Eigen::Vector2d chain_point(const Vector7d& q, const Kin& k, const Segment* segs, int n) {
  Eigen::Vector2d pt(q[5], q[6]);
  for (int i = 0; i < n; ++i) pt += segs[i].coeff * dir(k, segs[i].channel);
  return pt;
}

Eigen::Vector2d chain_jdqd(const Kin& k, const Segment* segs, int n) {
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  for (int i = 0; i < n; ++i) {
    const double thd = k.thetad[segs[i].channel];
    acc += -segs[i].coeff * thd * thd * dir(k, segs[i].channel);
  }
  return acc;
}

}  // namespace

DynamicsTerms dynamics_terms(const RobotState& s, const RobotParams& p) {
  Kin k;
  channel_kinematics(s.q, s.qd, k);
  LinkDef links[5];
  make_links(p, links);

  DynamicsTerms t;
  t.D.setZero();
  t.G.setZero();
  t.B.setZero();
  t.B.diagonal().head<4>().setOnes();

  Matrix27d J[5];
  double total_mass = 0.0;
  t.p_com.setZero();
  t.v_com.setZero();
  t.V = 0.0;

  for (int l = 0; l < 5; ++l) {
    const LinkDef& ld = links[l];
    chain_jacobian(k, ld.segs, ld.n_segs, J[l]);
    t.D += ld.mass * (J[l].transpose() * J[l]);
    const double* sel = kChannelDefs[ld.omega_channel].sel;
    for (int i = 0; i < 5; ++i) {
      if (sel[i] == 0.0) continue;
      for (int j = 0; j < 5; ++j) t.D(i, j) += ld.inertia * sel[i] * sel[j];
    }
    const Eigen::Vector2d pc = chain_point(s.q, k, ld.segs, ld.n_segs);
    t.G += p.gravity * ld.mass * J[l].row(1).transpose();
    t.V += p.gravity * ld.mass * pc[1];
    t.p_com += ld.mass * pc;
    t.v_com += ld.mass * (J[l] * s.qd);
    total_mass += ld.mass;
  }
  t.p_com /= total_mass;
  t.v_com /= total_mass;

  // Christoffel Coriolis matrix from the analytic dD/dq_m.
  Matrix7d dD[5];
  for (int m = 0; m < 5; ++m) {
    dD[m].setZero();
    Matrix27d dJ;
    for (int l = 0; l < 5; ++l) {
      chain_jacobian_partial(k, links[l].segs, links[l].n_segs, m, dJ);
      const Matrix7d mixed = links[l].mass * (dJ.transpose() * J[l]);
      dD[m] += mixed + mixed.transpose();
    }
  }
  t.C.setZero();
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      double cij = 0.0;
      for (int m = 0; m < 7; ++m) {
        // dD/dq_m vanishes for the base coordinates (m >= 5).
        const double a = m < 5 ? dD[m](i, j) : 0.0;
        const double b = j < 5 ? dD[j](i, m) : 0.0;
        const double c = i < 5 ? dD[i](j, m) : 0.0;
        cij += 0.5 * (a + b - c) * s.qd[m];
      }
      t.C(i, j) = cij;
    }
  }

  t.h = t.C * s.qd + t.G;
  t.h.head<4>() += p.joint_friction * s.qd.head<4>();

  const Segment sw[2] = {{p.femur.length, Fsw}, {p.shin.length, Ssw}};
  const Segment st[2] = {{p.femur.length, Fst}, {p.shin.length, Sst}};
  chain_jacobian(k, sw, 2, t.J_sw);
  chain_jacobian(k, st, 2, t.J_st);
  t.Jdqd_sw = chain_jdqd(k, sw, 2);
  t.Jdqd_st = chain_jdqd(k, st, 2);
  t.p_sw = chain_point(s.q, k, sw, 2);
  t.p_st = chain_point(s.q, k, st, 2);
  t.v_sw = t.J_sw * s.qd;
  t.v_st = t.J_st * s.qd;
  t.p_hip = {s.q[5], s.q[6]};
  t.v_hip = {s.qd[5], s.qd[6]};
  return t;
}

ConstrainedAccel constrained_accel(const DynamicsTerms& t, const Eigen::Vector4d& u,
                                   const Vector7d& q_ext) {
  Vector7d rhs = q_ext - t.h;
  rhs.head<4>() += u;

  Eigen::LLT<Matrix7d> llt(t.D);
  if (llt.info() != Eigen::Success) throw SingularKkt();
  const Vector7d dinv_rhs = llt.solve(rhs);
  const Eigen::Matrix<double, 7, 2> dinv_jt = llt.solve(t.J_st.transpose());
  const Eigen::Matrix2d lambda = t.J_st * dinv_jt;

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(lambda);
  if (es.eigenvalues()(0) <= 0.0 || es.eigenvalues()(1) / es.eigenvalues()(0) > 1e12)
    throw SingularKkt();

  ConstrainedAccel out;
  out.F_st = -lambda.ldlt().solve(t.J_st * dinv_rhs + t.Jdqd_st);
  out.qdd = dinv_rhs + dinv_jt * out.F_st;
  return out;
}

ConstrainedAccel constrained_accel(const RobotState& s, const Eigen::Vector4d& u,
                                   const RobotParams& p, const Vector7d& q_ext) {
  return constrained_accel(dynamics_terms(s, p), u, q_ext);
}

Matrix7d relabeling_matrix() {
  Matrix7d R = Matrix7d::Zero();
  R(0, 1) = R(1, 0) = 1.0;  // q1 <-> q2
  R(2, 3) = R(3, 2) = 1.0;  // q3 <-> q4
  R(4, 4) = R(5, 5) = R(6, 6) = 1.0;
  return R;
}

ImpactResult impact_map(const RobotState& s, const RobotParams& p) {
  const DynamicsTerms t = dynamics_terms(s, p);

  Eigen::LLT<Matrix7d> llt(t.D);
  if (llt.info() != Eigen::Success) throw SingularImpactMatrix();
  const Eigen::Matrix<double, 7, 2> dinv_jt = llt.solve(t.J_sw.transpose());
  const Eigen::Matrix2d lambda = t.J_sw * dinv_jt;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(lambda);
  if (es.eigenvalues()(0) <= 0.0 || es.eigenvalues()(1) / es.eigenvalues()(0) > 1e12)
    throw SingularImpactMatrix();

  ImpactResult out;
  out.deltaF = -lambda.ldlt().solve(t.J_sw * s.qd);
  out.qd_plus = s.qd + dinv_jt * out.deltaF;

  const Matrix7d R = relabeling_matrix();
  out.next.q = R * s.q;
  out.next.qd = R * out.qd_plus;
  out.next.stance_leg = s.stance_leg == 1 ? 2 : 1;
  return out;
}

double kinetic_energy(const RobotState& s, const RobotParams& p) {
  const DynamicsTerms t = dynamics_terms(s, p);
  return 0.5 * s.qd.dot(t.D * s.qd);
}

Eigen::Vector2d stance_foot_position(const Vector7d& q, const RobotParams& p) {
  Kin k;
  channel_kinematics(q, Vector7d::Zero(), k);
  const Segment st[2] = {{p.femur.length, Fst}, {p.shin.length, Sst}};
  return chain_point(q, k, st, 2);
}

Eigen::Vector2d swing_foot_position(const Vector7d& q, const RobotParams& p) {
  Kin k;
  channel_kinematics(q, Vector7d::Zero(), k);
  const Segment sw[2] = {{p.femur.length, Fsw}, {p.shin.length, Ssw}};
  return chain_point(q, k, sw, 2);
}

Eigen::Vector2d com_position(const Vector7d& q, const RobotParams& p) {
  Kin k;
  channel_kinematics(q, Vector7d::Zero(), k);
  LinkDef links[5];
  make_links(p, links);
  Eigen::Vector2d com = Eigen::Vector2d::Zero();
  double mass = 0.0;
  for (int l = 0; l < 5; ++l) {
    com += links[l].mass * chain_point(q, k, links[l].segs, links[l].n_segs);
    mass += links[l].mass;
  }
  return com / mass;
}

LegJointAngles leg_ik(double L, double alpha_ray, double q5, const RobotParams& p,
                      double knee_sign) {
  const double lf = p.femur.length, ls = p.shin.length;
  const double c = (L * L - lf * lf - ls * ls) / (2.0 * lf * ls);
  if (c < -1.0 || c > 1.0) throw std::invalid_argument("leg_ik: length out of reach");
  const double knee = knee_sign * std::acos(c);
  // hip->foot vector in standard angle terms; segment direction (sin, -cos)
  // corresponds to standard angle theta - pi/2.
  const double phi_target = std::atan2(-std::sin(alpha_ray), std::cos(alpha_ray));
  const double phi_f = phi_target - std::atan2(ls * std::sin(knee), lf + ls * std::cos(knee));
  const double theta_f = phi_f + M_PI / 2;
  return {theta_f - q5, knee};
}

}  // namespace biped::fivelink
