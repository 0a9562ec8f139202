#include "biped/fsm/flatfoot.hpp"

#include <istream>
#include <sstream>

namespace biped::fsm {

FootCondition classify_foot(double p_heel, double p_toe, double eps) {
  const bool heel_down = p_heel <= eps;
  const bool toe_down = p_toe <= eps;
  if (heel_down && toe_down) return FootCondition::FootFlat;
  if (heel_down) return FootCondition::HeelStrike;
  if (toe_down) return FootCondition::HeelOff;
  return FootCondition::ToeOff;
}

FsmState fsm_step(const FsmState& fsm, const Measurements& m) {
  if (!std::isfinite(m.p_toe_stance) || !std::isfinite(m.p_com_x)) throw InvalidMeasurement();

  FsmState next = fsm;
  switch (fsm.phase) {
    case Phase::S1:
      if (m.foot[fsm.swing_leg] == FootCondition::ToeOff) next.phase = Phase::S2;
      break;
    case Phase::S2:
      if (m.p_com_x >= m.p_toe_stance) {
        next.phase = Phase::S3;
        next.mode[fsm.stance_leg()] = LegMode::StancePushOff;
      }
      break;
    case Phase::S3:
      if (m.swing_heel_touchdown) next.phase = Phase::S4;
      break;
    case Phase::S4:
      // Transient: the cycle restarts at once with the roles swapped.
      next.phase = Phase::S1;
      next.swing_leg = 1 - fsm.swing_leg;
      next.mode[next.swing_leg] = LegMode::Swing;
      next.mode[next.stance_leg()] = LegMode::Stance;
      break;
  }
  return next;
}

double ankle_torque(AnkleMode mode, double q_i, double qdot_i, const AnkleGains& gains) {
  const double damping = -(gains.k_a / 10.0) * qdot_i;
  switch (mode) {
    case AnkleMode::HeelStrikeDamping:
      return damping;
    case AnkleMode::PushOff:
      // As printed the push-off term is a constant torque k_a q_a_p, not an
      // angle error; the error-based variant is selectable.
      return (gains.error_based_pushoff ? gains.k_a * (gains.q_a_p - q_i)
                                        : gains.k_a * gains.q_a_p) +
             damping;
    case AnkleMode::SwingServo:
      return gains.k_a * (q_i - gains.q_a_sw) + damping;
  }
  return 0.0;
}

double flatfoot_swing_length(double psi_tilde, double L0, double dLd, double dpsi) {
  if (psi_tilde >= dpsi / 2 || psi_tilde <= -dpsi / 2) return L0;
  return 0.8 * L0 + dLd / 2 - dLd / 2 * std::cos(psi_tilde * 2.0 * M_PI / dpsi);
}

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    TraceRecord r{};
    if (!(ls >> r.t >> r.heel[0] >> r.toe[0] >> r.heel[1] >> r.toe[1] >> r.com_x >> r.toe_x[0] >>
          r.toe_x[1]))
      throw std::runtime_error("event trace: malformed line: " + line);
    out.push_back(r);
  }
  return out;
}

Measurements measurements_from(const TraceRecord& rec, const FsmState& fsm, double eps) {
  Measurements m;
  for (int leg = 0; leg < 2; ++leg) m.foot[leg] = classify_foot(rec.heel[leg], rec.toe[leg], eps);
  m.p_toe_stance = rec.toe_x[fsm.stance_leg()];
  m.p_com_x = rec.com_x;
  m.swing_heel_touchdown = rec.heel[fsm.swing_leg] <= eps;
  return m;
}

}  // namespace biped::fsm
