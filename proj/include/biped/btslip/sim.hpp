#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "biped/btslip/model.hpp"
#include "biped/numerics/integrate.hpp"
#include "biped/sim/terrain.hpp"

namespace biped::btslip {

/// Per-stride controller interface for the template model. commands() is a
/// pure function of the state; at_section() is the once-per-stride hook fired
/// at vertical leg orientation (used by the DLQR update).
class TemplateController {
 public:
  virtual ~TemplateController() = default;

  /// Fill one LegForce per contact leg; geoms[i] belongs to legs[i].
  virtual void commands(const TemplateState& s, std::span<const LegGeometry> geoms,
                        std::span<const int> legs, std::span<LegForce> out) const = 0;

  /// Commanded attack angle for the swing leg, ray convention.
  virtual double touchdown_ray(const TemplateState& s) const = 0;

  virtual void at_section(double t, const TemplateState& s) { (void)t, (void)s; }
};

using ExternalWrenchFn = std::function<ExternalWrench(double t, const TemplateState&)>;

enum class SimEventType { Touchdown, Takeoff, Vlo, Fell };

struct SimEvent {
  double t = 0.0;
  SimEventType type{};
  int leg = -1;
  TemplateState state;
};

struct SampleLeg {
  bool contact = false;
  double F_s = 0.0, tau = 0.0;
  double grf_x = 0.0, grf_y = 0.0;
};

struct Sample {
  double t = 0.0;
  TemplateState state;
  std::array<SampleLeg, 2> legs;
  std::string event;  // empty for plain integrator steps
};

struct FallCriteria {
  double min_hip_frac = 0.2;   // of L0
  double pitch_band = 1.0;     // |phi - pi/2| limit [rad]
  double min_com_frac = 0.3;   // of the nominal CoM height
  double com_ref = 0.0;        // 0: max(L0, initial y)
};

struct SimulateTemplateOptions {
  double t0 = 0.0;
  double duration = 20.0;
  num::Tolerances tol{1e-9, 1e-11};
  bool record = true;
  bool stop_at_section = false;  // terminate at the first VLO crossing
  FallCriteria fall;
  int max_instant_transitions = 4;
};

struct TemplateRun {
  std::vector<Sample> samples;
  std::vector<SimEvent> events;
  bool fell = false;
  std::string fall_reason;
  bool reached_section = false;
  double t_end = 0.0;
  TemplateState final_state;
};

struct SimulationError : std::runtime_error {
  explicit SimulationError(const std::string& what) : std::runtime_error(what) {}
};

/// Closed-loop hybrid simulation: integrates phase-wise, locates touchdown,
/// takeoff, VLO and fall events, and applies the transition rules (massless
/// legs: state is continuous across transitions).
TemplateRun simulate_template(const TemplateState& init, TemplateController& controller,
                              const TemplateParams& p, const sim::Terrain& terrain,
                              const ExternalWrenchFn& ext, const SimulateTemplateOptions& opts);

}  // namespace biped::btslip
