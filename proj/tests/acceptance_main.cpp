// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Optional arguments select criteria by number.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "biped/control/controllers.hpp"
#include "biped/fsm/flatfoot.hpp"
#include "biped/numerics/linalg.hpp"
#include "biped/sim/scenario.hpp"
#include "biped/torque/osc.hpp"

using namespace biped;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
Outcome passive_energy() {
  btslip::TemplateParams p = ctrl::nominal::params();
  ctrl::PassiveController ctl(p);
  btslip::TemplateState s;
  s.y = 0.97;
  s.phi = M_PI / 2;
  s.xd = 0.6;
  s.yd = -0.1;
  s.feet[0] = btslip::FootContact{0.0, 0.0};

  btslip::SimulateTemplateOptions opts;
  opts.duration = 0.45;
  opts.tol = {1e-9, 1e-11};
  const auto run = simulate_template(s, ctl, p, sim::Terrain{}, nullptr, opts);
  if (run.fell) return {false, "model fell during the passive arc"};
  if (run.t_end < 0.4) return {false, "arc shorter than 0.4 s"};

  const std::array<double, 2> ks{p.k0, p.k0};
  const double E0 = btslip::total_energy(run.samples.front().state, p, ks);
  double drift = 0.0;
  for (const auto& smp : run.samples)
    drift = std::max(drift, std::abs(btslip::total_energy(smp.state, p, ks) - E0) / std::abs(E0));
  return {drift < 1e-8, fmt("relative energy drift %.2e over %.2f s", drift, run.t_end)};
}

// ---------------------------------------------------------------- criterion 2
Outcome periodic_vpp_gait() {
  const auto lin = ctrl::nominal::analyze();
  if (lin.fp_residual >= 1e-9)
    return {false, fmt("fixed-point residual %.2e", lin.fp_residual)};

  double mx = 0.0;
  int complex_pairs = 0;
  for (const auto& ev : lin.eigenvalues) {
    mx = std::max(mx, std::abs(ev));
    if (ev.imag() > 1e-9) ++complex_pairs;  // count each conjugate pair once
  }
  const bool stable = mx <= 1.0 + 1e-3;
  const bool band = mx >= 0.95 && mx <= 1.0;
  const bool pairs = complex_pairs >= 2;
  return {stable && band && pairs,
          fmt("max |eig| = %.4f (residual %.1e, %d conjugate pairs)", mx, lin.fp_residual,
              complex_pairs)};
}

// ---------------------------------------------------------------- criterion 3
struct VloDeviation {
  double t;
  double dev;
};

std::vector<VloDeviation> vlo_deviations(const btslip::TemplateRun& run,
                                         const poincare::SectionState& S_star) {
  std::vector<VloDeviation> out;
  for (const auto& ev : run.events)
    if (ev.type == btslip::SimEventType::Vlo)
      out.push_back({ev.t, (poincare::section_from_state(ev.state).vec() - S_star.vec()).norm()});
  return out;
}

bool rejects_hit(const std::vector<VloDeviation>& devs, double t_hit) {
  double pre_level = 0.0;
  int seen = 0;
  for (auto it = devs.rbegin(); it != devs.rend(); ++it)
    if (it->t < t_hit && seen < 3) {
      pre_level = std::max(pre_level, it->dev);
      ++seen;
    }
  if (seen == 0) return false;
  const double bound = 2.0 * std::max(pre_level, 1e-6);
  int strides = 0;
  for (const auto& d : devs) {
    if (d.t <= t_hit) continue;
    ++strides;
    if (strides > 10) break;
    if (d.dev <= bound) return true;
  }
  return false;
}

Outcome combined_disturbance_rejection() {
  btslip::TemplateParams p = ctrl::nominal::params();
  const auto lin = ctrl::nominal::analyze();
  const auto ref = ctrl::record_reference_gait(p, lin.delta_star, lin.S_star);

  sim::DisturbanceSchedule sched;
  sched.windows.push_back({{-100.0, 300.0}, sim::ApplicationPoint::Com, 5.0, 0.2});
  sched.windows.push_back({{-100.0, 300.0}, sim::ApplicationPoint::Com, 10.0, 0.2});
  auto wrench = [&sched](double t, const btslip::TemplateState&) {
    const auto a = sched.active(t);
    return btslip::ExternalWrench{a[0][0], a[0][1], 0.0};
  };

  btslip::TemplateState init;
  init.y = lin.S_star.y;
  init.phi = lin.S_star.phi;
  init.xd = lin.S_star.xd;
  init.yd = lin.S_star.yd;
  init.phid = lin.S_star.phid;
  init.feet[0] = btslip::FootContact{init.hip_x(p), 0.0};

  btslip::SimulateTemplateOptions opts;
  opts.duration = 20.0;

  ctrl::CombinedController combined(p, ref, ctrl::nominal::stiffness_gains(), lin);
  const auto run = simulate_template(init, combined, p, sim::Terrain{}, wrench, opts);
  if (run.fell) return {false, fmt("combined controller fell at t = %.2f s", run.t_end)};

  const auto devs = vlo_deviations(run, lin.S_star);
  const bool rej5 = rejects_hit(devs, 5.0);
  const bool rej10 = rejects_hit(devs, 10.0);

  ctrl::VppController vpp(p, lin.delta_star);
  const auto run_vpp = simulate_template(init, vpp, p, sim::Terrain{}, wrench, opts);
  const bool vpp_fell_early = run_vpp.fell && run_vpp.t_end < 10.0;

  return {rej5 && rej10 && vpp_fell_early,
          fmt("combined walked %.1f s (hits recovered: %s, %s); plain VPP %s at %.2f s",
              run.t_end, rej5 ? "t=5" : "t=5 FAILED", rej10 ? "t=10" : "t=10 FAILED",
              run_vpp.fell ? "fell" : "did not fall", run_vpp.t_end)};
}

// ---------------------------------------------------------------- criterion 4
Outcome fdc_disturbance() {
  btslip::TemplateParams p = ctrl::nominal::params();
  ctrl::FdcGains gains;
  ctrl::FdcController ctl(p, gains);

  const double t_hit = 3.0, t_dur = 0.3;
  sim::DisturbanceSchedule sched;
  sched.windows.push_back({{30.0, 100.0}, sim::ApplicationPoint::RightFoot, t_hit, t_dur});
  const btslip::TemplateParams pc = p;
  auto wrench = [&sched, pc](double t, const btslip::TemplateState& s) {
    const auto a = sched.active(t);
    btslip::ExternalWrench w;
    const Eigen::Vector2d f = a[2];
    if (!f.isZero()) {
      const btslip::FootContact* foot =
          s.feet[1] ? &*s.feet[1] : (s.feet[0] ? &*s.feet[0] : nullptr);
      if (foot) {
        w.fx += f[0];
        w.fy += f[1];
        w.mz += (foot->x - s.x) * f[1] - (foot->y - s.y) * f[0];
      }
    }
    return w;
  };

  const auto fp = poincare::find_fixed_point(ctrl::nominal::section_seed(), ctrl::nominal::delta(),
                                             p, ctrl::vpp_factory(p));
  btslip::TemplateState init;
  init.y = fp.S_star.y;
  init.phi = fp.S_star.phi;
  init.xd = fp.S_star.xd;
  init.yd = fp.S_star.yd;
  init.phid = fp.S_star.phid;
  init.feet[0] = btslip::FootContact{init.hip_x(p), 0.0};

  btslip::SimulateTemplateOptions opts;
  opts.duration = 20.0;
  const auto run = simulate_template(init, ctl, p, sim::Terrain{}, wrench, opts);
  if (run.fell) return {false, fmt("fell at %.2f s under the foot disturbance", run.t_end)};

  // Pre-disturbance pitch band over the 2 s before the hit.
  double lo = M_PI / 2, hi = M_PI / 2;
  for (const auto& smp : run.samples)
    if (smp.t >= t_hit - 2.0 && smp.t < t_hit) {
      lo = std::min(lo, smp.state.phi);
      hi = std::max(hi, smp.state.phi);
    }
  bool decayed = true;
  double worst = 0.0;
  for (const auto& smp : run.samples)
    if (smp.t >= t_hit + 5.0) {
      const double over = std::max(smp.state.phi - (hi + 0.02), (lo - 0.02) - smp.state.phi);
      if (over > 0.0) {
        decayed = false;
        worst = std::max(worst, over);
      }
    }
  if (!decayed)
    return {false, fmt("pitch stayed %.3f rad outside the pre-hit band after 5 s", worst)};

  // (b) sine terrain with heights <= 2 cm.
  const sim::Terrain terr = sim::Terrain::sine(1.0, 1.0, 20.0);
  btslip::TemplateState init_t = init;
  const double h0 = terr.height(init_t.feet[0]->x);
  init_t.feet[0]->y = h0;
  init_t.y += h0;
  const auto run_t = simulate_template(init_t, ctl, p, terr, nullptr, opts);
  if (run_t.fell) return {false, fmt("fell at %.2f s on the sine terrain", run_t.t_end)};

  return {true, fmt("disturbed walk %.0f s (band [%.3f, %.3f]), terrain walk %.0f s", run.t_end,
                    lo, hi, run_t.t_end)};
}

// ---------------------------------------------------------------- criterion 5
Outcome fivelink_limit_cycle() {
  const fivelink::RobotParams p;
  fivelink::WalkerConfig cfg;  // Table-3.2 gains, OSC
  fivelink::WalkOptions opts;
  opts.duration = 25.0;
  opts.tol = {1e-7, 1e-9};

  const fivelink::RobotState init = fivelink::nominal_initial_state(p);
  const auto run = fivelink::walk(init, cfg, p, sim::Terrain{}, nullptr, opts);
  if (run.fell) return {false, fmt("fell at %.2f s (%s)", run.t_end, run.fall_reason.c_str())};
  if (run.impacts.size() < 31)
    return {false, fmt("only %zu steps completed", run.impacts.size())};

  const auto res = fivelink::stride_residuals(run.impacts);
  double best10 = 1e9, best30 = 1e9;
  for (size_t k = 0; k < res.size(); ++k) {
    if (k < 10) best10 = std::min(best10, res[k]);
    if (k < 30) best30 = std::min(best30, res[k]);
  }
  const bool conv10 = best10 < 5e-2;
  const bool conv30 = best30 < 5e-3;

  // Steady state: everything after the 30th impact.
  const double t_ss = run.impacts[29].t;
  double lo = 1e9, hi = -1e9, fric = 0.0;
  for (const auto& smp : run.samples) {
    if (smp.t < t_ss) continue;
    lo = std::min(lo, smp.state.q[4]);
    hi = std::max(hi, smp.state.q[4]);
    if (smp.grf[1] > 1.0) fric = std::max(fric, std::abs(smp.grf[0] / smp.grf[1]));
  }
  const bool band_ok = (hi - lo) <= 0.02;
  const bool fric_ok = fric <= 0.5;
  return {conv10 && conv30 && band_ok && fric_ok,
          fmt("residuals: %.3f by 10, %.4f by 30; pitch band %.4f rad; friction %.3f "
              "(%zu steps)",
              best10, best30, hi - lo, fric, run.impacts.size())};
}

// ---------------------------------------------------------------- criterion 6
Outcome osc_invariants() {
  const fivelink::RobotParams p;
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> angle(-0.7, 0.7);
  std::uniform_real_distribution<double> force(-250.0, 250.0);

  double worst_row = 0.0, worst_proj = 0.0, worst_oracle = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    fivelink::RobotState s;
    for (int i = 0; i < 5; ++i) s.q[i] = angle(rng);
    s.q[5] = angle(rng);
    s.q[6] = 0.3 + 0.3 * std::abs(angle(rng));
    const fivelink::DynamicsTerms t = dynamics_terms(s, p);
    const auto tj = torque::task_jacobians(t);
    worst_proj = std::max({worst_proj, (tj.P * tj.P - tj.P).norm(),
                           (tj.P - tj.P.transpose()).norm(),
                           (tj.P * tj.J_c.transpose()).norm()});

    Eigen::Vector4d F;
    for (int i = 0; i < 4; ++i) F[i] = force(rng);
    const fivelink::Vector7d tau = torque::osc_torques_full(t, F, t.B);
    const double scale = std::max(1.0, tau.norm());
    worst_row = std::max(worst_row, tau.tail<3>().norm() / scale);

    if (trial % 10 == 0) {
      // Least-squares oracle on a subsample (it is itself a dense solve).
      const fivelink::Matrix7d Mc_inv = tj.M_c.partialPivLu().inverse();
      const Eigen::Matrix<double, 4, 7> T = tj.J * Mc_inv * tj.P;
      const Eigen::Matrix<double, 4, 7> JTsharp =
          (T * tj.J.transpose()).partialPivLu().solve(T);
      const fivelink::Matrix7d N =
          fivelink::Matrix7d::Identity() - tj.J.transpose() * JTsharp;
      const fivelink::Matrix7d U = fivelink::Matrix7d::Identity() - t.B;
      Eigen::MatrixXd kkt(14, 14);
      kkt.setZero();
      kkt.topLeftCorner<7, 7>() = fivelink::Matrix7d::Identity();
      kkt.topRightCorner<7, 7>() = (U * N).transpose();
      kkt.bottomLeftCorner<7, 7>() = U * N;
      Eigen::VectorXd rhs(14);
      rhs.setZero();
      rhs.tail<7>() = -U * (tj.J.transpose() * F);
      const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
      const fivelink::Vector7d tau_oracle = tj.J.transpose() * F + N * sol.head<7>();
      worst_oracle =
          std::max(worst_oracle, (tau - tau_oracle).norm() / std::max(1.0, tau_oracle.norm()));
    }
  }
  const bool ok = worst_row <= 1e-9 && worst_proj < 1e-10 && worst_oracle <= 1e-6;
  return {ok, fmt("unactuated rows %.1e, projector %.1e, oracle gap %.1e", worst_row, worst_proj,
                  worst_oracle)};
}

// ---------------------------------------------------------------- criterion 7
Outcome impact_invariants() {
  const fivelink::RobotParams p;
  std::mt19937 rng(654);
  std::uniform_real_distribution<double> angle(-0.8, 0.8);
  std::uniform_real_distribution<double> vel(-2.0, 2.0);

  const fivelink::Matrix7d R = fivelink::relabeling_matrix();
  if ((R * R - fivelink::Matrix7d::Identity()).norm() != 0.0)
    return {false, "relabeling matrix is not an involution"};

  double worst_constraint = 0.0, worst_momentum = 0.0, worst_energy = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    fivelink::RobotState s;
    for (int i = 0; i < 5; ++i) s.q[i] = angle(rng);
    s.q[5] = angle(rng);
    s.q[6] = 0.3 + 0.3 * std::abs(angle(rng));
    for (int i = 0; i < 7; ++i) s.qd[i] = vel(rng);

    const fivelink::DynamicsTerms t = dynamics_terms(s, p);
    const auto imp = impact_map(s, p);
    worst_constraint = std::max(worst_constraint, (t.J_sw * imp.qd_plus).norm());
    worst_momentum = std::max(
        worst_momentum,
        (t.D * (imp.qd_plus - s.qd) - t.J_sw.transpose() * imp.deltaF).norm());
    const double T_minus = 0.5 * s.qd.dot(t.D * s.qd);
    const double T_plus = 0.5 * imp.qd_plus.dot(t.D * imp.qd_plus);
    worst_energy = std::max(worst_energy, (T_plus - T_minus) / std::max(1.0, T_minus));
  }
  const bool ok = worst_constraint < 1e-9 && worst_momentum < 1e-9 && worst_energy <= 1e-12;
  return {ok, fmt("constraint %.1e, momentum %.1e, max energy gain %.1e", worst_constraint,
                  worst_momentum, worst_energy)};
}

// ---------------------------------------------------------------- criterion 8
Outcome derivative_consistency() {
  // Poincare Jacobians: step halving.
  const btslip::TemplateParams p = ctrl::nominal::params();
  const auto factory = ctrl::vpp_factory(p);
  const auto fp = poincare::find_fixed_point(ctrl::nominal::section_seed(), ctrl::nominal::delta(),
                                             p, factory);
  poincare::LinearizeOptions o1, o2;
  o2.h_state = o1.h_state / 2;
  o2.h_delta = o1.h_delta / 2;
  const auto l1 = poincare::linearize(fp.S_star, ctrl::nominal::delta(), p, factory, o1);
  const auto l2 = poincare::linearize(fp.S_star, ctrl::nominal::delta(), p, factory, o2);
  const double gap_S = (l1.J_S - l2.J_S).cwiseAbs().maxCoeff();
  const double gap_d = (l1.J_delta - l2.J_delta).cwiseAbs().maxCoeff();

  // 5-link analytic Jacobians and gravity against central differences.
  const fivelink::RobotParams rp;
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> angle(-0.7, 0.7);
  double worst_J = 0.0, worst_G = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    fivelink::RobotState s;
    for (int i = 0; i < 5; ++i) s.q[i] = angle(rng);
    s.q[5] = angle(rng);
    s.q[6] = 0.3 + 0.3 * std::abs(angle(rng));
    const fivelink::DynamicsTerms t = dynamics_terms(s, rp);
    for (int j = 0; j < 7; ++j) {
      fivelink::RobotState sp = s, sm = s;
      sp.q[j] += 1e-6;
      sm.q[j] -= 1e-6;
      const auto tp = dynamics_terms(sp, rp);
      const auto tm = dynamics_terms(sm, rp);
      worst_J = std::max(worst_J,
                         (t.J_st.col(j) - (tp.p_st - tm.p_st) / 2e-6).cwiseAbs().maxCoeff());
      worst_J = std::max(worst_J,
                         (t.J_sw.col(j) - (tp.p_sw - tm.p_sw) / 2e-6).cwiseAbs().maxCoeff());
      worst_G = std::max(worst_G, std::abs(t.G[j] - (tp.V - tm.V) / 2e-6));
    }
  }
  const bool ok = gap_S < 1e-4 && gap_d < 1e-4 && worst_J < 1e-6 && worst_G < 1e-6;
  return {ok, fmt("Richardson gaps %.1e / %.1e; J gap %.1e; G gap %.1e", gap_S, gap_d, worst_J,
                  worst_G)};
}

// ---------------------------------------------------------------- criterion 9
Outcome dare_dlqr() {
  std::mt19937 rng(13);
  std::normal_distribution<double> dist;
  double worst_residual = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4, m = 1 + trial % 2;
    Eigen::MatrixXd A(n, n), B(n, m), C(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = dist(rng), C(i, j) = dist(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) B(i, j) = dist(rng);
    A *= 0.9 / std::max(0.9, num::spectral_radius(A));
    const Eigen::MatrixXd Q = C.transpose() * C;
    const Eigen::MatrixXd R = Eigen::MatrixXd::Identity(m, m);
    const auto sol = num::solve_dare(A, B, Q, R);
    const Eigen::MatrixXd res =
        A.transpose() * sol.P * A - sol.P - A.transpose() * sol.P * B * sol.K + Q;
    worst_residual = std::max(worst_residual, res.norm());
    if (num::spectral_radius(A - B * sol.K) >= 1.0)
      return {false, "closed loop unstable on a random system"};
  }

  Eigen::MatrixXd A1(1, 1), B1(1, 1), Q1(1, 1), R1(1, 1);
  A1 << 0.5;
  B1 << 1.0;
  Q1 << 1.0;
  R1 << 1.0;
  const auto scalar = num::solve_dare(A1, B1, Q1, R1);
  const bool scalar_ok = std::abs(scalar.P(0, 0) - 1.13278) < 1e-4 &&
                         std::abs(scalar.K(0, 0) - 0.26556) < 1e-4;

  const auto lin = ctrl::nominal::analyze();
  const double rho = num::spectral_radius(lin.J_S - lin.J_delta * (*lin.K));
  return {worst_residual < 1e-8 && scalar_ok && rho < 1.0,
          fmt("max residual %.1e, scalar P=%.5f K=%.5f, closed-loop rho %.4f", worst_residual,
              scalar.P(0, 0), scalar.K(0, 0), rho)};
}

// --------------------------------------------------------------- criterion 10
Outcome fsm_conformance() {
  using namespace biped::fsm;
  if (classify_foot(0.0, 0.0) != FootCondition::FootFlat ||
      classify_foot(0.02, 0.0) != FootCondition::HeelOff ||
      classify_foot(0.0, 0.03) != FootCondition::HeelStrike ||
      classify_foot(0.02, 0.03) != FootCondition::ToeOff)
    return {false, "foot-condition boundary examples misclassified"};

  FsmState fsm;
  fsm.swing_leg = 0;
  std::vector<Phase> trace;
  std::vector<int> swing_legs{fsm.swing_leg};
  for (int cycle = 0; cycle < 8; ++cycle) {
    Measurements m;
    m.foot[fsm.swing_leg] = FootCondition::ToeOff;
    m.foot[1 - fsm.swing_leg] = FootCondition::FootFlat;
    m.p_toe_stance = 0.4;
    m.p_com_x = 0.0;
    fsm = fsm_step(fsm, m);
    trace.push_back(fsm.phase);
    m.p_com_x = 0.5;
    fsm = fsm_step(fsm, m);
    trace.push_back(fsm.phase);
    m.swing_heel_touchdown = true;
    fsm = fsm_step(fsm, m);
    trace.push_back(fsm.phase);
    Measurements wrap;
    fsm = fsm_step(fsm, wrap);
    trace.push_back(fsm.phase);
    swing_legs.push_back(fsm.swing_leg);
  }
  for (size_t i = 0; i < trace.size(); i += 4) {
    if (trace[i] != Phase::S2 || trace[i + 1] != Phase::S3 || trace[i + 2] != Phase::S4 ||
        trace[i + 3] != Phase::S1)
      return {false, "phase trace is not (S1 S2 S3 S4)*"};
  }
  for (size_t i = 1; i < swing_legs.size(); ++i)
    if (swing_legs[i] != 1 - swing_legs[i - 1]) return {false, "swing leg does not alternate"};
  return {true, fmt("%zu cycles traced", swing_legs.size() - 1)};
}

struct Criterion {
  int number;
  const char* title;
  double budget_s;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "passive BTSLIP energy conservation", 1.0, passive_energy},
    {2, "periodic VPP gait and orbital stability band", 60.0, periodic_vpp_gait},
    {3, "combined controller rejects (-100,300) N hits; plain VPP falls", 60.0,
     combined_disturbance_rejection},
    {4, "force-direction controller: foot disturbance and sine terrain", 120.0, fdc_disturbance},
    {5, "5-link + OSC limit cycle, trunk band, friction ratio", 120.0, fivelink_limit_cycle},
    {6, "OSC invariants over 1000 random states", 10.0, osc_invariants},
    {7, "impact-map invariants over 1000 random states", 10.0, impact_invariants},
    {8, "numerical-derivative consistency", 60.0, derivative_consistency},
    {9, "DARE/DLQR residuals, scalar oracle, closed-loop stability", 5.0, dare_dlqr},
    {10, "FSM conformance on the scripted nominal stream", 1.0, fsm_conformance},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    const auto t0 = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    const bool in_budget = dt < c.budget_s;
    const bool pass = out.pass && in_budget;
    std::printf("[%s] %2d. %s — %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.number, c.title,
                out.detail.c_str(), dt, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
