#include "biped/sim/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "biped/control/controllers.hpp"

namespace biped::sim {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Deterministic uniform in [-1, 1).
double canon(std::mt19937_64& rng) {
  return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0;
}

btslip::ExternalWrenchFn template_wrench(const ScenarioConfig& cfg) {
  if (cfg.disturbances.empty()) return nullptr;
  const DisturbanceSchedule sched = cfg.disturbances;
  const btslip::TemplateParams p = cfg.tparams;
  return [sched, p](double t, const btslip::TemplateState& s) {
    const auto active = sched.active(t);
    btslip::ExternalWrench w;
    w.fx = active[0][0];
    w.fy = active[0][1];
    // Foot-applied forces become a CoM wrench: same force plus its moment
    // about the CoM through the foot point.
    auto add_at_foot = [&](const Eigen::Vector2d& f, int leg) {
      if (f.isZero()) return;
      const btslip::FootContact* foot = nullptr;
      if (leg >= 0 && s.feet[leg].has_value()) foot = &*s.feet[leg];
      else if (s.feet[0].has_value()) foot = &*s.feet[0];
      else if (s.feet[1].has_value()) foot = &*s.feet[1];
      if (!foot) return;
      w.fx += f[0];
      w.fy += f[1];
      w.mz += (foot->x - s.x) * f[1] - (foot->y - s.y) * f[0];
    };
    add_at_foot(active[1], -1);  // stance foot: any contact foot
    add_at_foot(active[2], 1);   // "right" = leg 2
    return w;
  };
}

fivelink::GeneralizedForceFn fivelink_force(const ScenarioConfig& cfg) {
  if (cfg.disturbances.empty()) return nullptr;
  const DisturbanceSchedule sched = cfg.disturbances;
  return [sched](double t, const fivelink::RobotState& s,
                 const fivelink::DynamicsTerms& terms) {
    const auto active = sched.active(t);
    fivelink::Vector7d q = fivelink::Vector7d::Zero();
    // CoM wrench via the CoM Jacobian is approximated by base columns; the
    // planar CoM Jacobian equals sum(m_i J_i)/M whose base block is I.
    if (!active[0].isZero()) {
      q[5] += active[0][0];
      q[6] += active[0][1];
    }
    if (!active[1].isZero()) q += terms.J_st.transpose() * active[1];
    if (!active[2].isZero()) {
      // Physical leg 2: stance slots when it is the stance leg, else swing.
      const bool leg2_is_stance = s.stance_leg == 2;
      q += (leg2_is_stance ? terms.J_st : terms.J_sw).transpose() * active[2];
    }
    return q;
  };
}

btslip::TemplateState resolve_template_initial(const ScenarioConfig& cfg,
                                               const poincare::SectionState* fp) {
  if (!cfg.template_init.use_fixed_point) return cfg.template_init.explicit_state;
  if (fp == nullptr) throw SimulationFailure("internal: fixed point unavailable");
  btslip::TemplateState s;
  s.x = 0.0;
  s.y = fp->y;
  s.phi = fp->phi;
  s.xd = fp->xd;
  s.yd = fp->yd;
  s.phid = fp->phid;
  s.phase = btslip::Phase::SingleSupport;
  s.feet[0] = btslip::FootContact{s.hip_x(cfg.tparams), cfg.terrain.height(s.hip_x(cfg.tparams))};
  return s;
}

void apply_template_jitter(btslip::TemplateState& s, const ScenarioConfig& cfg) {
  if (cfg.jitter <= 0.0) return;
  std::mt19937_64 rng(cfg.rng_seed);
  s.y += cfg.jitter * canon(rng);
  s.phi += cfg.jitter * canon(rng);
  s.xd += cfg.jitter * canon(rng);
  s.yd += cfg.jitter * canon(rng);
  s.phid += cfg.jitter * canon(rng);
}

void apply_fivelink_jitter(fivelink::RobotState& s, const ScenarioConfig& cfg) {
  if (cfg.jitter <= 0.0) return;
  std::mt19937_64 rng(cfg.rng_seed);
  for (int i = 0; i < 5; ++i) s.q[i] += cfg.jitter * canon(rng);
  for (int i = 0; i < 7; ++i) s.qd[i] += cfg.jitter * canon(rng);
}

RunMetrics template_metrics(const btslip::TemplateRun& run, const ScenarioConfig& cfg) {
  RunMetrics m;
  m.fell = run.fell;
  m.fall_reason = run.fall_reason;
  m.duration = run.t_end;
  if (!run.samples.empty()) {
    const auto& first = run.samples.front();
    const auto& last = run.samples.back();
    if (last.t > first.t)
      m.mean_forward_speed = (last.state.x - first.state.x) / (last.t - first.t);
    m.trunk_pitch_min = m.trunk_pitch_max = first.state.phi;
    for (const auto& smp : run.samples) {
      m.trunk_pitch_min = std::min(m.trunk_pitch_min, smp.state.phi);
      m.trunk_pitch_max = std::max(m.trunk_pitch_max, smp.state.phi);
      for (const auto& leg : smp.legs) {
        if (leg.contact && leg.grf_y > 1.0)
          m.max_friction_ratio = std::max(m.max_friction_ratio, std::abs(leg.grf_x / leg.grf_y));
      }
    }
  }
  std::optional<poincare::SectionState> prev;
  for (const auto& ev : run.events) {
    EventLogEntry e;
    e.t = ev.t;
    e.leg = ev.leg + 1;
    switch (ev.type) {
      case btslip::SimEventType::Touchdown:
        e.type = "touchdown";
        ++m.steps_completed;
        break;
      case btslip::SimEventType::Takeoff: e.type = "takeoff"; break;
      case btslip::SimEventType::Vlo: {
        e.type = "vlo";
        const poincare::SectionState S = poincare::section_from_state(ev.state);
        if (prev) m.convergence_residuals.push_back((S.vec() - prev->vec()).norm());
        prev = S;
        break;
      }
      case btslip::SimEventType::Fell: e.type = "fell"; e.leg = -1; break;
    }
    m.events.push_back(e);
  }
  (void)cfg;
  return m;
}

RunMetrics fivelink_metrics(const fivelink::WalkRun& run) {
  RunMetrics m;
  m.fell = run.fell;
  m.fall_reason = run.fall_reason;
  m.duration = run.t_end;
  if (!run.samples.empty()) {
    const auto& first = run.samples.front();
    const auto& last = run.samples.back();
    if (last.t > first.t)
      m.mean_forward_speed = (last.state.q[5] - first.state.q[5]) / (last.t - first.t);
    m.trunk_pitch_min = m.trunk_pitch_max = first.state.q[4];
    for (const auto& smp : run.samples) {
      m.trunk_pitch_min = std::min(m.trunk_pitch_min, smp.state.q[4]);
      m.trunk_pitch_max = std::max(m.trunk_pitch_max, smp.state.q[4]);
      if (smp.grf[1] > 1.0)
        m.max_friction_ratio = std::max(m.max_friction_ratio, std::abs(smp.grf[0] / smp.grf[1]));
    }
  }
  m.steps_completed = static_cast<int>(run.impacts.size());
  m.convergence_residuals = fivelink::stride_residuals(run.impacts);
  for (const auto& imp : run.impacts)
    m.events.push_back({imp.t, "impact", imp.post.stance_leg});
  if (run.fell && !run.samples.empty())
    m.events.push_back({run.t_end, "fell", -1});
  return m;
}

void write_metrics_file(const ScenarioConfig& cfg, const RunMetrics& m) {
  if (cfg.metrics_path.empty()) return;
  std::ofstream out(cfg.metrics_path);
  if (!out) throw SimulationFailure("cannot open metrics output '" + cfg.metrics_path + "'");
  out << m.to_json().dump(2) << "\n";
}

}  // namespace

nlohmann::json RunMetrics::to_json() const {
  nlohmann::json j;
  j["fell"] = fell;
  if (fell) j["fall_reason"] = fall_reason;
  j["steps_completed"] = steps_completed;
  j["duration"] = duration;
  j["mean_forward_speed"] = mean_forward_speed;
  j["trunk_pitch_band"] = {trunk_pitch_min, trunk_pitch_max};
  j["max_friction_ratio"] = max_friction_ratio;
  j["convergence_residuals"] = convergence_residuals;
  nlohmann::json evs = nlohmann::json::array();
  for (const auto& e : events) {
    nlohmann::json je;
    je["t"] = e.t;
    je["type"] = e.type;
    if (e.leg > 0) je["leg"] = e.leg;
    evs.push_back(je);
  }
  j["events"] = evs;
  return j;
}

poincare::PoincareLinearization analyze_gait(const ScenarioConfig& cfg, bool parallel) {
  const auto factory = ctrl::vpp_factory(cfg.tparams);
  const poincare::SectionState seed = poincare::SectionState::from_vec(cfg.section_seed);
  poincare::FixedPointResult fp;
  try {
    fp = poincare::find_fixed_point(seed, cfg.delta, cfg.tparams, factory);
  } catch (const std::runtime_error&) {
    // Fall back to the seeding grid when the configured seed is poor.
    const auto found =
        poincare::find_periodic_gait(cfg.delta, cfg.tparams, factory, poincare::SeedGrid{});
    if (!found) throw SimulationFailure("no periodic gait found for the configured parameters");
    fp = *found;
  }
  poincare::LinearizeOptions lopts;
  lopts.parallel = parallel;
  poincare::PoincareLinearization lin =
      poincare::linearize(fp.S_star, cfg.delta, cfg.tparams, factory, lopts);
  poincare::make_dlqr(lin, cfg.Q_diag.asDiagonal(), cfg.R_diag.asDiagonal());
  return lin;
}

nlohmann::json linearization_to_json(const poincare::PoincareLinearization& lin) {
  nlohmann::json j;
  j["fixed_point"] = {{"y", lin.S_star.y},
                      {"phi", lin.S_star.phi},
                      {"xdot", lin.S_star.xd},
                      {"ydot", lin.S_star.yd},
                      {"phidot", lin.S_star.phid}};
  j["delta_star"] = {{"r_vpp", lin.delta_star.r_vpp}, {"gamma", lin.delta_star.gamma}};
  j["fixed_point_residual"] = lin.fp_residual;
  auto mat = [](const auto& M) {
    std::vector<double> v;
    for (int r = 0; r < M.rows(); ++r)
      for (int c = 0; c < M.cols(); ++c) v.push_back(M(r, c));
    return v;  // row-major
  };
  j["J_S"] = mat(lin.J_S);
  j["J_delta"] = mat(lin.J_delta);
  nlohmann::json eig = nlohmann::json::array();
  for (const auto& ev : lin.eigenvalues) eig.push_back({ev.real(), ev.imag()});
  j["eigenvalues"] = eig;
  if (lin.K) {
    j["K"] = mat(*lin.K);
    j["Q"] = mat(lin.Q);
    j["R"] = mat(lin.R);
  }
  return j;
}

nlohmann::json analyze_scenario(const ScenarioConfig& cfg, bool parallel) {
  return linearization_to_json(analyze_gait(cfg, parallel));
}

void write_csv(const ScenarioConfig& cfg, const ScenarioResult& result, std::ostream& out) {
  if (cfg.model == Model::Btslip) {
    out << "time,x,y,phi,xd,yd,phid,phase,foot1_contact,foot1_x,foot1_y,foot2_contact,foot2_x,"
           "foot2_y,Fs1,tau1,grf1_x,grf1_y,Fs2,tau2,grf2_x,grf2_y,event\n";
    if (!result.template_run) return;
    for (const auto& smp : result.template_run->samples) {
      const auto& s = smp.state;
      out << fmt(smp.t) << ',' << fmt(s.x) << ',' << fmt(s.y) << ',' << fmt(s.phi) << ','
          << fmt(s.xd) << ',' << fmt(s.yd) << ',' << fmt(s.phid) << ','
          << (s.phase == btslip::Phase::SingleSupport ? "SS" : "DS");
      for (int leg = 0; leg < 2; ++leg) {
        const bool c = s.feet[leg].has_value();
        out << ',' << (c ? 1 : 0) << ',' << fmt(c ? s.feet[leg]->x : 0.0) << ','
            << fmt(c ? s.feet[leg]->y : 0.0);
      }
      for (int leg = 0; leg < 2; ++leg) {
        const auto& sl = smp.legs[leg];
        out << ',' << fmt(sl.F_s) << ',' << fmt(sl.tau) << ',' << fmt(sl.grf_x) << ','
            << fmt(sl.grf_y);
      }
      out << ',' << smp.event << '\n';
    }
  } else {
    out << "time,q1,q2,q3,q4,q5,xb,yb,qd1,qd2,qd3,qd4,qd5,xbd,ybd,stance_leg,u1,u2,u3,u4,grf_x,"
           "grf_y,event\n";
    if (!result.fivelink_run) return;
    for (const auto& smp : result.fivelink_run->samples) {
      out << fmt(smp.t);
      for (int i = 0; i < 7; ++i) out << ',' << fmt(smp.state.q[i]);
      for (int i = 0; i < 7; ++i) out << ',' << fmt(smp.state.qd[i]);
      out << ',' << smp.state.stance_leg;
      for (int i = 0; i < 4; ++i) out << ',' << fmt(smp.u[i]);
      out << ',' << fmt(smp.grf[0]) << ',' << fmt(smp.grf[1]) << ',' << smp.event << '\n';
    }
  }
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, bool keep_run) {
  ScenarioResult result;

  if (cfg.model == Model::Btslip) {
    std::unique_ptr<btslip::TemplateController> controller;
    std::optional<poincare::SectionState> fp_state;

    const bool needs_analysis = cfg.controller == ControllerKind::VppDlqr ||
                                cfg.controller == ControllerKind::Combined ||
                                cfg.template_init.use_fixed_point;
    std::optional<poincare::PoincareLinearization> lin;
    if (needs_analysis) {
      if (cfg.controller == ControllerKind::VppDlqr || cfg.controller == ControllerKind::Combined) {
        lin = analyze_gait(cfg);
        fp_state = lin->S_star;
      } else {
        const auto factory = ctrl::vpp_factory(cfg.tparams);
        const auto fp = poincare::find_fixed_point(
            poincare::SectionState::from_vec(cfg.section_seed), cfg.delta, cfg.tparams, factory);
        fp_state = fp.S_star;
      }
    }

    switch (cfg.controller) {
      case ControllerKind::Passive:
        controller = std::make_unique<ctrl::PassiveController>(cfg.tparams);
        break;
      case ControllerKind::Vpp:
        controller = std::make_unique<ctrl::VppController>(cfg.tparams, cfg.delta);
        break;
      case ControllerKind::VppDlqr: {
        auto vpp = std::make_unique<ctrl::VppController>(cfg.tparams, cfg.delta);
        vpp->enable_dlqr(*lin);
        controller = std::move(vpp);
        break;
      }
      case ControllerKind::Combined: {
        const ctrl::ReferenceGait ref =
            ctrl::record_reference_gait(cfg.tparams, cfg.delta, lin->S_star);
        controller = std::make_unique<ctrl::CombinedController>(cfg.tparams, ref, cfg.stiffness,
                                                                *lin);
        break;
      }
      case ControllerKind::Fdc:
        controller = std::make_unique<ctrl::FdcController>(cfg.tparams, cfg.fdc);
        break;
      default:
        throw SimulationFailure("internal: template controller expected");
    }

    btslip::TemplateState init =
        resolve_template_initial(cfg, fp_state ? &*fp_state : nullptr);
    apply_template_jitter(init, cfg);

    btslip::SimulateTemplateOptions sopts;
    sopts.duration = cfg.duration;
    sopts.tol = cfg.tol;
    sopts.record = true;
    btslip::TemplateRun run;
    try {
      run = simulate_template(init, *controller, cfg.tparams, cfg.terrain, template_wrench(cfg),
                              sopts);
    } catch (const btslip::SimulationError& e) {
      throw SimulationFailure(e.what());
    }
    result.metrics = template_metrics(run, cfg);
    if (keep_run || !cfg.csv_path.empty()) result.template_run = std::move(run);
  } else {
    fivelink::RobotState init = cfg.fivelink_init.use_nominal
                                    ? fivelink::nominal_initial_state(cfg.rparams)
                                    : cfg.fivelink_init.explicit_state;
    apply_fivelink_jitter(init, cfg);

    fivelink::WalkerConfig wcfg;
    wcfg.gains = cfg.planner_gains;
    wcfg.method = cfg.torque_method;

    fivelink::WalkOptions wopts;
    wopts.duration = cfg.duration;
    wopts.tol = cfg.tol;
    fivelink::WalkRun run;
    try {
      run = fivelink::walk(init, wcfg, cfg.rparams, cfg.terrain, fivelink_force(cfg), wopts);
    } catch (const btslip::SimulationError& e) {
      throw SimulationFailure(e.what());
    }
    result.metrics = fivelink_metrics(run);
    if (keep_run || !cfg.csv_path.empty()) result.fivelink_run = std::move(run);
  }

  if (!cfg.csv_path.empty()) {
    std::ofstream out(cfg.csv_path, std::ios::binary);
    if (!out) throw SimulationFailure("cannot open CSV output '" + cfg.csv_path + "'");
    write_csv(cfg, result, out);
  }
  write_metrics_file(cfg, result.metrics);
  if (!keep_run) {
    result.template_run.reset();
    result.fivelink_run.reset();
  }
  return result;
}

}  // namespace biped::sim
