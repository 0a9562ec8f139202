#include "biped/sim/config.hpp"

#include <fstream>

namespace biped::sim {

using nlohmann::json;

namespace {

double get_num(const json& j, const std::string& key, double fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(path + key, "expected a number");
  return j[key].get<double>();
}

void require_range(double v, double lo, double hi, const std::string& field) {
  if (!(v >= lo && v <= hi)) throw ConfigError(field, "out of range");
}

}  // namespace

const char* ScenarioConfig::controller_name() const {
  switch (controller) {
    case ControllerKind::Passive: return "passive";
    case ControllerKind::Vpp: return "vpp";
    case ControllerKind::VppDlqr: return "vpp+dlqr";
    case ControllerKind::Combined: return "combined";
    case ControllerKind::Fdc: return "fdc";
    case ControllerKind::Osc: return "osc";
    case ControllerKind::PolarJt: return "polar-jt";
  }
  return "?";
}

ScenarioConfig parse_config(const json& j) {
  ScenarioConfig c;
  if (!j.is_object()) throw ConfigError("$", "document must be a JSON object");
  c.version = static_cast<int>(get_num(j, "version", 1, ""));
  if (c.version != 1) throw ConfigError("version", "unsupported schema version");

  const std::string model = j.value("model", "btslip");
  if (model == "btslip")
    c.model = Model::Btslip;
  else if (model == "fivelink")
    c.model = Model::Fivelink;
  else
    throw ConfigError("model", "unknown model '" + model + "'");

  const std::string ctl = j.value("controller", c.model == Model::Btslip ? "fdc" : "osc");
  if (ctl == "passive")
    c.controller = ControllerKind::Passive;
  else if (ctl == "vpp")
    c.controller = ControllerKind::Vpp;
  else if (ctl == "vpp+dlqr")
    c.controller = ControllerKind::VppDlqr;
  else if (ctl == "combined")
    c.controller = ControllerKind::Combined;
  else if (ctl == "fdc")
    c.controller = ControllerKind::Fdc;
  else if (ctl == "osc")
    c.controller = ControllerKind::Osc;
  else if (ctl == "polar-jt")
    c.controller = ControllerKind::PolarJt;
  else
    throw ConfigError("controller", "unknown controller '" + ctl + "'");

  const bool template_ctl = c.controller != ControllerKind::Osc &&
                            c.controller != ControllerKind::PolarJt;
  if ((c.model == Model::Btslip) != template_ctl)
    throw ConfigError("controller", std::string("'") + ctl + "' does not drive model '" + model + "'");
  c.torque_method = c.controller == ControllerKind::PolarJt ? fivelink::TorqueMethod::PolarJt
                                                            : fivelink::TorqueMethod::Osc;

  c.duration = get_num(j, "duration", 20.0, "");
  if (!(c.duration > 0.0)) throw ConfigError("duration", "must be positive");

  if (j.contains("params")) {
    const json& p = j["params"];
    c.tparams.m = get_num(p, "m", c.tparams.m, "params.");
    c.tparams.J = get_num(p, "J", c.tparams.J, "params.");
    c.tparams.r_h = get_num(p, "r_h", c.tparams.r_h, "params.");
    c.tparams.r_vpp = get_num(p, "r_vpp", c.tparams.r_vpp, "params.");
    c.tparams.L0 = get_num(p, "L0", c.tparams.L0, "params.");
    c.tparams.k0 = get_num(p, "k0", c.tparams.k0, "params.");
    c.tparams.g = get_num(p, "g", c.tparams.g, "params.");
    if (p.contains("alpha0_deg"))
      c.tparams.alpha0 = btslip::normalize_attack_angle(
          get_num(p, "alpha0_deg", 0.0, "params.") * M_PI / 180.0);
    if (!(c.tparams.m > 0 && c.tparams.J > 0 && c.tparams.L0 > 0 && c.tparams.k0 > 0))
      throw ConfigError("params", "masses, inertias, lengths, stiffness must be positive");
    if (!(c.tparams.L0 > c.tparams.r_h)) throw ConfigError("params.L0", "must exceed r_h");

    c.rparams.gravity = get_num(p, "g", c.rparams.gravity, "params.");
    c.rparams.joint_friction = get_num(p, "joint_friction", c.rparams.joint_friction, "params.");
  }

  if (j.contains("gains")) {
    const json& g = j["gains"];
    c.fdc.c = get_num(g, "c", c.fdc.c, "gains.");
    c.fdc.d = get_num(g, "d", c.fdc.d, "gains.");
    c.fdc.mu_vbla = get_num(g, "mu_vbla", c.fdc.mu_vbla, "gains.");
    if (g.contains("mu_fric_hat") && !g["mu_fric_hat"].is_null())
      c.fdc.mu_fric_hat = get_num(g, "mu_fric_hat", 0.5, "gains.");
    require_range(c.fdc.mu_vbla, 0.0, 1.0, "gains.mu_vbla");
    if (!(c.fdc.c > 0 && c.fdc.d > 0)) throw ConfigError("gains", "c and d must be positive");

    c.stiffness.k1 = get_num(g, "k1", c.stiffness.k1, "gains.");
    c.stiffness.k2 = get_num(g, "k2", c.stiffness.k2, "gains.");
    c.stiffness.k3 = get_num(g, "k3", c.stiffness.k3, "gains.");

    c.planner_gains.k = get_num(g, "k", c.planner_gains.k, "gains.");
    c.planner_gains.k_d = get_num(g, "k_d", c.planner_gains.k_d, "gains.");
    c.planner_gains.c = c.fdc.c;
    c.planner_gains.d = c.fdc.d;
    c.planner_gains.c_sw = get_num(g, "c_sw", c.planner_gains.c_sw, "gains.");
    c.planner_gains.mu_vbla = c.fdc.mu_vbla;
    c.planner_gains.L0 = get_num(g, "planner_L0", c.planner_gains.L0, "gains.");
  }

  if (j.contains("delta")) {
    c.delta.r_vpp = get_num(j["delta"], "r_vpp", c.delta.r_vpp, "delta.");
    c.delta.gamma = get_num(j["delta"], "gamma", c.delta.gamma, "delta.");
    if (c.delta.r_vpp < 0) throw ConfigError("delta.r_vpp", "must be >= 0");
  }

  if (j.contains("dlqr")) {
    const json& d = j["dlqr"];
    if (d.contains("Q")) {
      if (!d["Q"].is_array() || d["Q"].size() != 5) throw ConfigError("dlqr.Q", "expected 5 numbers");
      for (int i = 0; i < 5; ++i) c.Q_diag[i] = d["Q"][i].get<double>();
    }
    if (d.contains("R")) {
      if (!d["R"].is_array() || d["R"].size() != 2) throw ConfigError("dlqr.R", "expected 2 numbers");
      for (int i = 0; i < 2; ++i) c.R_diag[i] = d["R"][i].get<double>();
    }
  }

  if (j.contains("section_seed")) {
    const json& s = j["section_seed"];
    if (!s.is_array() || s.size() != 5) throw ConfigError("section_seed", "expected 5 numbers");
    for (int i = 0; i < 5; ++i) c.section_seed[i] = s[i].get<double>();
  }

  if (j.contains("initial_state")) {
    const json& is = j["initial_state"];
    if (is.contains("preset")) {
      const std::string preset = is["preset"].get<std::string>();
      if (c.model == Model::Btslip && preset == "fixed-point")
        c.template_init.use_fixed_point = true;
      else if (c.model == Model::Fivelink && preset == "nominal")
        c.fivelink_init.use_nominal = true;
      else
        throw ConfigError("initial_state.preset", "unknown preset '" + preset + "'");
    } else if (c.model == Model::Btslip) {
      if (!is.contains("state") || !is["state"].is_array() || is["state"].size() != 6)
        throw ConfigError("initial_state.state", "expected [x, y, phi, xd, yd, phid]");
      btslip::TemplateState st;
      st.x = is["state"][0].get<double>();
      st.y = is["state"][1].get<double>();
      st.phi = is["state"][2].get<double>();
      st.xd = is["state"][3].get<double>();
      st.yd = is["state"][4].get<double>();
      st.phid = is["state"][5].get<double>();
      if (!is.contains("feet") || !is["feet"].is_array() || is["feet"].size() != 2)
        throw ConfigError("initial_state.feet", "expected two entries (null or [x, y])");
      int contacts = 0;
      for (int leg = 0; leg < 2; ++leg) {
        const json& f = is["feet"][leg];
        if (f.is_null()) continue;
        if (!f.is_array() || f.size() != 2)
          throw ConfigError("initial_state.feet", "foot entry must be null or [x, y]");
        st.feet[leg] = btslip::FootContact{f[0].get<double>(), f[1].get<double>()};
        ++contacts;
      }
      if (contacts == 0) throw ConfigError("initial_state.feet", "at least one foot must be set");
      st.phase = contacts == 2 ? btslip::Phase::DoubleSupport : btslip::Phase::SingleSupport;
      if (!(st.y > 0)) throw ConfigError("initial_state.state", "y must be positive");
      c.template_init.use_fixed_point = false;
      c.template_init.explicit_state = st;
    } else {
      if (!is.contains("q") || !is["q"].is_array() || is["q"].size() != 7 || !is.contains("qd") ||
          !is["qd"].is_array() || is["qd"].size() != 7)
        throw ConfigError("initial_state", "expected q[7] and qd[7]");
      fivelink::RobotState st;
      for (int i = 0; i < 7; ++i) {
        st.q[i] = is["q"][i].get<double>();
        st.qd[i] = is["qd"][i].get<double>();
      }
      st.stance_leg = is.value("stance_leg", 2);
      if (st.stance_leg != 1 && st.stance_leg != 2)
        throw ConfigError("initial_state.stance_leg", "must be 1 or 2");
      c.fivelink_init.use_nominal = false;
      c.fivelink_init.explicit_state = st;
    }
  }

  if (j.contains("disturbances")) {
    if (!j["disturbances"].is_array()) throw ConfigError("disturbances", "expected an array");
    for (size_t i = 0; i < j["disturbances"].size(); ++i) {
      const json& d = j["disturbances"][i];
      const std::string field = "disturbances[" + std::to_string(i) + "]";
      DisturbanceWindow w;
      if (!d.contains("force") || !d["force"].is_array() || d["force"].size() != 2)
        throw ConfigError(field + ".force", "expected [Fx, Fy]");
      w.force << d["force"][0].get<double>(), d["force"][1].get<double>();
      const std::string pt = d.value("point", "com");
      if (pt == "com")
        w.point = ApplicationPoint::Com;
      else if (pt == "stance_foot")
        w.point = ApplicationPoint::StanceFoot;
      else if (pt == "right_foot")
        w.point = ApplicationPoint::RightFoot;
      else
        throw ConfigError(field + ".point", "unknown application point '" + pt + "'");
      w.t_start = get_num(d, "t_start", 0.0, field + ".");
      w.duration = get_num(d, "duration", 0.0, field + ".");
      if (w.t_start < 0.0 || w.duration < 0.0 || w.t_start + w.duration > c.duration)
        throw ConfigError(field, "window must lie within [0, duration]");
      c.disturbances.windows.push_back(w);
    }
  }

  if (j.contains("terrain")) {
    const json& tr = j["terrain"];
    const std::string type = tr.value("type", "flat");
    if (type == "flat") {
      c.terrain = Terrain{};
    } else if (type == "sine") {
      c.terrain = Terrain::sine(get_num(tr, "amplitude_cm", 1.0, "terrain."),
                                get_num(tr, "base_cm", 1.0, "terrain."),
                                get_num(tr, "spatial_freq", 20.0, "terrain."));
    } else if (type == "custom") {
      if (!tr.contains("x") || !tr.contains("h"))
        throw ConfigError("terrain", "custom terrain needs x and h arrays");
      try {
        c.terrain = Terrain::custom(tr["x"].get<std::vector<double>>(),
                                    tr["h"].get<std::vector<double>>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError("terrain", e.what());
      }
    } else {
      throw ConfigError("terrain.type", "unknown terrain type '" + type + "'");
    }
  }

  if (j.contains("integrator")) {
    c.tol.rel = get_num(j["integrator"], "rel_tol", c.tol.rel, "integrator.");
    c.tol.abs = get_num(j["integrator"], "abs_tol", c.tol.abs, "integrator.");
    if (!(c.tol.rel > 0 && c.tol.abs > 0))
      throw ConfigError("integrator", "tolerances must be positive");
  }

  if (j.contains("rng_seed")) c.rng_seed = j["rng_seed"].get<unsigned long long>();
  c.jitter = get_num(j, "jitter", 0.0, "");
  if (c.jitter < 0) throw ConfigError("jitter", "must be >= 0");

  if (j.contains("output")) {
    c.csv_path = j["output"].value("csv", "");
    c.metrics_path = j["output"].value("metrics", "");
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$", "cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("JSON parse error: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace biped::sim
