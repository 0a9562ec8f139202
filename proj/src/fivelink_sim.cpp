#include "biped/fivelink/sim.hpp"

#include <cmath>

#include "biped/btslip/sim.hpp"
#include "biped/torque/osc.hpp"
#include "biped/torque/polar_jt.hpp"

namespace biped::fivelink {

namespace {

constexpr int kEvImpact = 0;
constexpr int kEvClearance = 1;
constexpr int kEvFallPitch = 2;
constexpr int kEvFallCom = 3;

void unpack(const Eigen::VectorXd& v, RobotState& s) {
  s.q = v.head<7>();
  s.qd = v.tail<7>();
}

Eigen::VectorXd pack(const RobotState& s) {
  Eigen::VectorXd v(14);
  v << s.q, s.qd;
  return v;
}

struct VirtualLeg {
  double L, Ldot, alpha, alphadot, eta;  // alpha in the foot->hip convention
};

VirtualLeg virtual_leg(const Eigen::Vector2d& p_hip, const Eigen::Vector2d& v_hip,
                       const Eigen::Vector2d& p_foot, const Eigen::Vector2d& v_foot,
                       const Eigen::Vector2d& p_com) {
  VirtualLeg vl;
  const Eigen::Vector2d d = p_hip - p_foot;
  const Eigen::Vector2d dv = v_hip - v_foot;
  vl.L = d.norm();
  if (vl.L <= 1e-12) throw planner::ZeroLegLength();
  vl.alpha = std::atan2(d[1], d[0]);
  vl.Ldot = d.dot(dv) / vl.L;
  vl.alphadot = (d[0] * dv[1] - d[1] * dv[0]) / (vl.L * vl.L);
  const Eigen::Vector2d c = p_com - p_foot;
  vl.eta = btslip::wrap_pi(vl.alpha - std::atan2(c[1], c[0]));
  return vl;
}

}  // namespace

Eigen::Vector4d walker_torques(const RobotState& s, const DynamicsTerms& t,
                               const WalkerConfig& cfg, const RobotParams& p) {
  const VirtualLeg st = virtual_leg(t.p_hip, t.v_hip, t.p_st, t.v_st, t.p_com);
  const VirtualLeg sw = virtual_leg(t.p_hip, t.v_hip, t.p_sw, t.v_sw, t.p_com);

  const planner::DesiredFootForce f_st =
      planner::stance_force(st.L, st.Ldot, st.eta, st.alpha, s.q[4], s.qd[4], cfg.gains);
  const double sw_ray = M_PI - sw.alpha;
  const planner::DesiredFootForce f_sw = planner::swing_force(
      sw.L, sw.Ldot, sw_ray, -sw.alphadot, t.v_com[0], t.v_com[1], cfg.gains, p.gravity);

  if (cfg.method == TorqueMethod::Osc) {
    Eigen::Vector4d F;
    F << f_st.global, f_sw.global;
    return torque::osc_torques(t, F);
  }
  Eigen::Vector4d F_polar;
  F_polar << f_st.F_r, f_st.F_t, f_sw.F_r, f_sw.F_t;
  return torque::polar_jt_torques(s.q, p, F_polar);
}

WalkRun walk(const RobotState& init, const WalkerConfig& cfg, const RobotParams& p,
             const sim::Terrain& terrain, const GeneralizedForceFn& ext, const WalkOptions& opts) {
  WalkRun run;
  RobotState s = init;
  double t = opts.t0;
  const double t_final = opts.t0 + opts.duration;
  const double com0 = com_position(init.q, p)[1];

  auto record_sample = [&](double ts, const RobotState& st, const std::string& tag) {
    if (!opts.record) return;
    WalkSample smp;
    smp.t = ts;
    smp.state = st;
    const DynamicsTerms terms = dynamics_terms(st, p);
    try {
      smp.u = walker_torques(st, terms, cfg, p);
      const Vector7d qx = ext ? ext(ts, st, terms) : Vector7d::Zero();
      smp.grf = constrained_accel(terms, smp.u, qx).F_st;
    } catch (const std::runtime_error&) {
      // Logged sample only; leave zeros if the mapping is singular here.
    }
    smp.event = tag;
    run.samples.push_back(std::move(smp));
  };

  record_sample(t, s, "start");

  bool cleared = false;  // swing foot has risen above the arming clearance
  while (t < t_final && !run.fell) {
    RobotState proto = s;

    num::VectorField field = [&](double tt, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
      RobotState st = proto;
      unpack(v, st);
      const DynamicsTerms terms = dynamics_terms(st, p);
      const Eigen::Vector4d u = walker_torques(st, terms, cfg, p);
      const Vector7d qx = ext ? ext(tt, st, terms) : Vector7d::Zero();
      const ConstrainedAccel ca = constrained_accel(terms, u, qx);
      dv.resize(14);
      dv.head<7>() = st.qd;
      dv.tail<7>() = ca.qdd;
    };

    std::vector<num::EventFunction> evs;
    auto swing_clear = [&](double, const Eigen::VectorXd& v) {
      RobotState st = proto;
      unpack(v, st);
      const Eigen::Vector2d f = swing_foot_position(st.q, p);
      return f[1] - terrain.height(f[0]) - (cleared ? 0.0 : opts.clearance);
    };
    if (cleared) {
      evs.push_back({kEvImpact, swing_clear, num::EventDirection::Falling, true});
    } else {
      evs.push_back({kEvClearance, swing_clear, num::EventDirection::Rising, true});
    }
    evs.push_back({kEvFallPitch,
                   [&](double, const Eigen::VectorXd& v) {
                     return opts.pitch_band - std::abs(v[4]);
                   },
                   num::EventDirection::Falling, true});
    evs.push_back({kEvFallCom,
                   [&](double, const Eigen::VectorXd& v) {
                     RobotState st = proto;
                     unpack(v, st);
                     return com_position(st.q, p)[1] - opts.min_com_frac * com0;
                   },
                   num::EventDirection::Falling, true});

    num::IntegrateOptions iopts;
    iopts.tol = opts.tol;
    iopts.record_steps = opts.record;
    num::Trajectory traj;
    try {
      traj = num::integrate_with_events(field, pack(s), t, t_final, evs, iopts);
    } catch (const num::StepSizeUnderflow& e) {
      throw btslip::SimulationError(e.what());
    } catch (const num::NonFiniteState& e) {
      throw btslip::SimulationError(e.what());
    }

    if (opts.record) {
      for (size_t i = 1; i + 1 < traj.times.size(); ++i) {
        RobotState st = proto;
        unpack(traj.states[i], st);
        record_sample(traj.times[i], st, "");
      }
    }

    t = traj.times.back();
    unpack(traj.states.back(), s);

    if (!traj.terminated_by_event) {
      record_sample(t, s, "");
      break;
    }

    switch (traj.terminal_event_index) {
      case kEvClearance:
        cleared = true;
        record_sample(t, s, "clearance");
        break;
      case kEvImpact: {
        const ImpactResult imp = impact_map(s, p);
        run.impacts.push_back({t, imp.next, imp.qd_plus, imp.deltaF});
        s = imp.next;
        cleared = false;
        record_sample(t, s, "impact");
        break;
      }
      case kEvFallPitch:
        run.fell = true;
        run.fall_reason = "trunk pitch left the +-" + std::to_string(opts.pitch_band) + " rad band";
        record_sample(t, s, "fell");
        break;
      case kEvFallCom:
        run.fell = true;
        run.fall_reason = "CoM dropped below " + std::to_string(opts.min_com_frac) + " of start";
        record_sample(t, s, "fell");
        break;
    }
  }

  run.t_end = t;
  run.final_state = s;
  return run;
}

std::vector<double> stride_residuals(const std::vector<ImpactEvent>& impacts) {
  std::vector<double> res;
  for (size_t i = 1; i < impacts.size(); ++i) {
    Eigen::Matrix<double, 13, 1> a, b;
    const RobotState& s1 = impacts[i - 1].post;
    const RobotState& s2 = impacts[i].post;
    a << s1.q.head<5>(), s1.q[6], s1.qd;
    b << s2.q.head<5>(), s2.q[6], s2.qd;
    res.push_back((a - b).norm());
  }
  return res;
}

RobotState nominal_initial_state(const RobotParams& p) {
  // Mid-stance: stance leg slightly bent and tilted back, swing leg
  // retracted and trailing, trunk a hair forward of vertical, with a rigid
  // rotation about the stance foot providing the forward push.
  RobotState s;
  s.stance_leg = 2;
  const double q5 = -0.05;
  const LegJointAngles st = leg_ik(0.355, 95.0 * M_PI / 180.0, q5, p, +1.0);
  const LegJointAngles sw = leg_ik(0.30, 115.0 * M_PI / 180.0, q5, p, +1.0);
  s.q[0] = sw.hip;
  s.q[1] = st.hip;
  s.q[2] = sw.knee;
  s.q[3] = st.knee;
  s.q[4] = q5;

  // Place the hip so the stance foot sits at the origin.
  const Eigen::Vector2d foot_rel = stance_foot_position(s.q, p);
  s.q[5] = -foot_rel[0];
  s.q[6] = -foot_rel[1];

  // Rigid rotation of the stance chain about the foot at omega (trunk pitch
  // rate zero), swing leg sweeping forward.
  const double omega = 2.0;
  s.qd[1] = omega;
  s.qd[0] = 1.0;
  const Eigen::Vector2d hip(s.q[5], s.q[6]);
  s.qd[5] = -omega * hip[1];
  s.qd[6] = omega * hip[0];
  return s;
}

}  // namespace biped::fivelink
