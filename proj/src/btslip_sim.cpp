#include "biped/btslip/sim.hpp"

#include <cmath>

namespace biped::btslip {

namespace {

// Event indices within one integration segment.
constexpr int kEvTouchdown = 0;
constexpr int kEvVlo = 1;
constexpr int kEvFallHip = 2;
constexpr int kEvFallPitch = 3;
constexpr int kEvFallCom = 4;
constexpr int kEvTakeoffBase = 10;  // + leg

void unpack(const Eigen::VectorXd& v, TemplateState& s) {
  s.x = v[0];
  s.y = v[1];
  s.phi = v[2];
  s.xd = v[3];
  s.yd = v[4];
  s.phid = v[5];
}

Eigen::VectorXd pack(const TemplateState& s) {
  Eigen::VectorXd v(6);
  v << s.x, s.y, s.phi, s.xd, s.yd, s.phid;
  return v;
}

struct LegSet {
  int count = 0;
  std::array<int, 2> legs{};
  std::array<LegGeometry, 2> geoms{};
  std::array<LegForce, 2> cmds{};
};

void evaluate_legs(const TemplateState& s, const TemplateController& ctl,
                   const TemplateParams& p, LegSet& ls) {
  ls.count = 0;
  for (int leg = 0; leg < 2; ++leg) {
    if (!s.feet[leg].has_value()) continue;
    ls.legs[ls.count] = leg;
    ls.geoms[ls.count] = leg_geometry(s, leg, p);
    ++ls.count;
  }
  ctl.commands(s, std::span<const LegGeometry>(ls.geoms.data(), ls.count),
               std::span<const int>(ls.legs.data(), ls.count),
               std::span<LegForce>(ls.cmds.data(), ls.count));
}

int stance_leg_of(const TemplateState& s) {
  for (int leg = 0; leg < 2; ++leg)
    if (s.feet[leg].has_value()) return leg;
  return -1;
}

}  // namespace

TemplateRun simulate_template(const TemplateState& init, TemplateController& controller,
                              const TemplateParams& p, const sim::Terrain& terrain,
                              const ExternalWrenchFn& ext, const SimulateTemplateOptions& opts) {
  TemplateRun run;
  TemplateState s = init;
  double t = opts.t0;
  const double t_final = opts.t0 + opts.duration;
  const double com_ref = opts.fall.com_ref > 0.0 ? opts.fall.com_ref : std::max(p.L0, init.y);

  auto record_sample = [&](double ts, const TemplateState& st, const std::string& tag) {
    if (!opts.record) return;
    Sample smp;
    smp.t = ts;
    smp.state = st;
    smp.event = tag;
    LegSet ls;
    evaluate_legs(st, controller, p, ls);
    for (int i = 0; i < ls.count; ++i) {
      SampleLeg& sl = smp.legs[ls.legs[i]];
      sl.contact = true;
      sl.F_s = ls.cmds[i].F_s;
      sl.tau = ls.cmds[i].tau;
      const Wrench2 w = leg_wrench(ls.cmds[i].F_s, ls.cmds[i].tau, ls.geoms[i]);
      sl.grf_x = w.fx;
      sl.grf_y = w.fy;
    }
    run.samples.push_back(std::move(smp));
  };

  auto fall_out = [&](double ts, const TemplateState& st, const std::string& why) {
    run.fell = true;
    run.fall_reason = why;
    run.events.push_back({ts, SimEventType::Fell, -1, st});
    record_sample(ts, st, "fell");
  };

  record_sample(t, s, "start");

  int instant_chain = 0;
  while (t < t_final && !run.fell) {
    // Transitions already past their boundary at phase entry fire at once
    // (possible after large disturbances; a crossing would never be seen).
    bool instant = false;
    if (s.phase == Phase::DoubleSupport) {
      for (int leg = 0; leg < 2 && !instant; ++leg) {
        if (!s.feet[leg].has_value()) continue;
        const LegGeometry geom = leg_geometry(s, leg, p);
        if (geom.L > p.L0 + 1e-9 && geom.Ldot > 0.0) {
          s.feet[leg].reset();
          s.phase = Phase::SingleSupport;
          run.events.push_back({t, SimEventType::Takeoff, leg, s});
          record_sample(t, s, "takeoff");
          instant = true;
        }
      }
    } else {
      const double ray = controller.touchdown_ray(s);
      const GuardValues g = guards(s, p, terrain, ray);
      if (g.touchdown < -1e-9) {
        const int free_leg = s.feet[0].has_value() ? 1 : 0;
        s.feet[free_leg] = touchdown_point(s, p, terrain, ray);
        s.phase = Phase::DoubleSupport;
        run.events.push_back({t, SimEventType::Touchdown, free_leg, s});
        record_sample(t, s, "touchdown");
        instant = true;
      }
    }
    if (instant) {
      if (++instant_chain > opts.max_instant_transitions)
        throw SimulationError("instant transition chain exceeded bound at t=" + std::to_string(t));
      continue;
    }
    instant_chain = 0;

    const Phase phase = s.phase;
    const auto feet = s.feet;
    TemplateState proto = s;  // carries feet/phase for unpacking

    num::VectorField field = [&](double tt, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
      TemplateState st = proto;
      unpack(v, st);
      LegSet ls;
      evaluate_legs(st, controller, p, ls);
      const Accel a = btslip_dynamics(
          st, std::span<const LegForce>(ls.cmds.data(), ls.count), p, ext ? ext(tt, st) : ExternalWrench{});
      dv.resize(6);
      dv << st.xd, st.yd, st.phid, a.xdd, a.ydd, a.phidd;
    };

    std::vector<num::EventFunction> evs;
    if (phase == Phase::SingleSupport) {
      evs.push_back({kEvTouchdown,
                     [&](double, const Eigen::VectorXd& v) {
                       TemplateState st = proto;
                       unpack(v, st);
                       return guards(st, p, terrain, controller.touchdown_ray(st)).touchdown;
                     },
                     num::EventDirection::Falling, true});
      const int stance = stance_leg_of(proto);
      const double foot_x = proto.feet[stance]->x;
      evs.push_back({kEvVlo,
                     [&, foot_x](double, const Eigen::VectorXd& v) {
                       TemplateState st = proto;
                       unpack(v, st);
                       return st.hip_x(p) - foot_x;
                     },
                     num::EventDirection::Rising, true});
    } else {
      for (int leg = 0; leg < 2; ++leg) {
        if (!feet[leg].has_value()) continue;
        evs.push_back({kEvTakeoffBase + leg,
                       [&, leg](double, const Eigen::VectorXd& v) {
                         TemplateState st = proto;
                         unpack(v, st);
                         return leg_geometry(st, leg, p).L - p.L0;
                       },
                       num::EventDirection::Rising, true});
      }
    }
    evs.push_back({kEvFallHip,
                   [&](double, const Eigen::VectorXd& v) {
                     TemplateState st = proto;
                     unpack(v, st);
                     return st.hip_y(p) - opts.fall.min_hip_frac * p.L0;
                   },
                   num::EventDirection::Falling, true});
    evs.push_back({kEvFallPitch,
                   [&](double, const Eigen::VectorXd& v) {
                     return opts.fall.pitch_band - std::abs(v[2] - M_PI / 2);
                   },
                   num::EventDirection::Falling, true});
    evs.push_back({kEvFallCom,
                   [&](double, const Eigen::VectorXd& v) {
                     return v[1] - opts.fall.min_com_frac * com_ref;
                   },
                   num::EventDirection::Falling, true});

    num::IntegrateOptions iopts;
    iopts.tol = opts.tol;
    iopts.record_steps = opts.record;
    num::Trajectory traj;
    try {
      traj = num::integrate_with_events(field, pack(s), t, t_final, evs, iopts);
    } catch (const num::StepSizeUnderflow& e) {
      throw SimulationError(e.what());
    } catch (const num::NonFiniteState& e) {
      throw SimulationError(e.what());
    }

    if (opts.record) {
      // Interior accepted steps (first entry duplicates the segment start,
      // last is re-recorded with its event tag below when applicable).
      for (size_t i = 1; i + 1 < traj.times.size(); ++i) {
        TemplateState st = proto;
        unpack(traj.states[i], st);
        record_sample(traj.times[i], st, "");
      }
    }

    TemplateState st_end = proto;
    unpack(traj.states.back(), st_end);
    const double t_end = traj.times.back();

    if (!traj.terminated_by_event) {
      t = t_end;
      s = st_end;
      record_sample(t, s, "");
      break;
    }

    t = t_end;
    s = st_end;
    switch (traj.terminal_event_index) {
      case kEvTouchdown: {
        const double ray = controller.touchdown_ray(s);
        const int free_leg = s.feet[0].has_value() ? 1 : 0;
        s.feet[free_leg] = touchdown_point(s, p, terrain, ray);
        s.phase = Phase::DoubleSupport;
        run.events.push_back({t, SimEventType::Touchdown, free_leg, s});
        record_sample(t, s, "touchdown");
        break;
      }
      case kEvVlo: {
        run.events.push_back({t, SimEventType::Vlo, stance_leg_of(s), s});
        record_sample(t, s, "vlo");
        if (opts.stop_at_section) {
          run.reached_section = true;
          run.t_end = t;
          run.final_state = s;
          return run;
        }
        controller.at_section(t, s);
        break;
      }
      case kEvFallHip:
        fall_out(t, s, "hip below " + std::to_string(opts.fall.min_hip_frac) + " L0");
        break;
      case kEvFallPitch:
        fall_out(t, s, "trunk pitch left the +-" + std::to_string(opts.fall.pitch_band) + " rad band");
        break;
      case kEvFallCom:
        fall_out(t, s, "CoM below " + std::to_string(opts.fall.min_com_frac) + " of nominal height");
        break;
      default: {
        const int leg = traj.terminal_event_index - kEvTakeoffBase;
        s.feet[leg].reset();
        s.phase = Phase::SingleSupport;
        run.events.push_back({t, SimEventType::Takeoff, leg, s});
        record_sample(t, s, "takeoff");
        break;
      }
    }
  }

  run.t_end = t;
  run.final_state = s;
  return run;
}

}  // namespace biped::btslip
