#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace biped::num {

using Eigen::VectorXd;

using VectorField = std::function<void(double t, const VectorXd& x, VectorXd& dx)>;
using EventFn = std::function<double(double t, const VectorXd& x)>;

enum class EventDirection { Rising, Falling, Any };

/// Scalar guard g(t, x). A directional sign change of g across an accepted
/// step is located on the dense output; terminal events stop the integration
/// at the located time.
struct EventFunction {
  int index = 0;
  EventFn g;
  EventDirection direction = EventDirection::Any;
  bool terminal = false;
};

struct EventRecord {
  double t = 0.0;
  int index = -1;
  VectorXd state;
};

struct Trajectory {
  std::vector<double> times;           // strictly increasing
  std::vector<VectorXd> states;        // one per time
  std::vector<EventRecord> events;
  bool terminated_by_event = false;
  int terminal_event_index = -1;

  double t_end() const { return times.back(); }
  const VectorXd& x_end() const { return states.back(); }
};

struct Tolerances {
  double rel = 1e-9;
  double abs = 1e-11;
};

struct IntegrateOptions {
  Tolerances tol;
  double h_init = 0.0;       // 0: choose automatically
  double h_max = 0.0;        // 0: (tf - t0) / 10
  double h_min = 1e-14;
  bool record_steps = true;  // keep every accepted step in the trajectory
  // Width of the bisection bracket used for event location, in seconds.
  double event_time_tol = 1e-12;
};

struct StepSizeUnderflow : std::runtime_error {
  explicit StepSizeUnderflow(double t)
      : std::runtime_error("integrator step size underflow at t=" + std::to_string(t)) {}
};

struct NonFiniteState : std::runtime_error {
  explicit NonFiniteState(double t)
      : std::runtime_error("non-finite state produced at t=" + std::to_string(t)) {}
};

/// Dormand-Prince 4(5) with PI step control and event location by bisection
/// on cubic Hermite dense output. Simultaneous events within a step resolve
/// to the earliest time, ties to the lowest event index.
Trajectory integrate_with_events(const VectorField& f, const VectorXd& x0, double t0, double tf,
                                 std::span<const EventFunction> events,
                                 const IntegrateOptions& opts = {});

}  // namespace biped::num
