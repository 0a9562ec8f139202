#pragma once

#include <cmath>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace biped::fsm {

/// Foot contact condition from heel/toe heights against the threshold eps.
enum class FootCondition { HeelStrike, FootFlat, HeelOff, ToeOff };

FootCondition classify_foot(double p_heel, double p_toe, double eps = 1e-3);

enum class Phase { S1, S2, S3, S4 };
enum class LegMode { Swing, Stance, StancePushOff };

struct FsmState {
  Phase phase = Phase::S1;
  int swing_leg = 0;  // 0 or 1
  LegMode mode[2] = {LegMode::Swing, LegMode::Stance};

  int stance_leg() const { return 1 - swing_leg; }
};

struct Measurements {
  FootCondition foot[2] = {FootCondition::FootFlat, FootCondition::FootFlat};
  double p_toe_stance = 0.0;      // stance toe abscissa [m]
  double p_com_x = 0.0;           // CoM abscissa [m]
  bool swing_heel_touchdown = false;
};

struct InvalidMeasurement : std::runtime_error {
  InvalidMeasurement() : std::runtime_error("FSM measurement contains NaN") {}
};

/// One deterministic step of the walking state machine:
///   S1 -> S2 at swing-foot toe-off, S2 -> S3 when the CoM passes the stance
///   toe (push-off arms), S3 -> S4 at swing-heel touchdown, S4 -> S1 with the
///   leg roles swapped. No transition when no trigger fires.
FsmState fsm_step(const FsmState& fsm, const Measurements& m);

struct AnkleGains {
  double k_a = 15.0;
  double q_a_sw = M_PI / 6;   // swing servo target [rad]
  double q_a_p = -M_PI / 9;   // push-off target [rad]
  bool error_based_pushoff = false;  // k_a (q_a_p - q) variant instead of the printed law
};

enum class AnkleMode { HeelStrikeDamping, PushOff, SwingServo };

double ankle_torque(AnkleMode mode, double q_i, double qdot_i, const AnkleGains& gains);

/// Swing-leg length retraction rule of the flat-foot configuration:
/// 0.8 L0 + dLd/2 - dLd/2 cos(2 pi psi_tilde / dpsi) inside the +-dpsi/2
/// window, L0 outside. psi_tilde is the trunk-referenced swing angle; note
/// this psi is unrelated to the template model's hip-CoM angle of the same
/// name.
double flatfoot_swing_length(double psi_tilde, double L0, double dLd, double dpsi);

/// One record of the line-oriented event-trace format used by the FSM tests:
///   t heel1 toe1 heel2 toe2 com_x toe1_x toe2_x
struct TraceRecord {
  double t;
  double heel[2], toe[2];
  double com_x;
  double toe_x[2];
};

std::vector<TraceRecord> parse_trace(std::istream& in);
Measurements measurements_from(const TraceRecord& rec, const FsmState& fsm, double eps = 1e-3);

}  // namespace biped::fsm
