#include "biped/numerics/integrate.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>

namespace biped::num {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// 4th-order weights for the embedded error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct DenseSegment {
  double t0, t1;
  const VectorXd *x0, *x1, *f0, *f1;

  // Cubic Hermite interpolation between step endpoints.
  void eval(double t, VectorXd& out) const {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    out = h00 * (*x0) + (h * h10) * (*f0) + h01 * (*x1) + (h * h11) * (*f1);
  }
};

bool crossed(double g0, double g1, EventDirection dir) {
  switch (dir) {
    case EventDirection::Rising:
      return g0 < 0.0 && g1 >= 0.0;
    case EventDirection::Falling:
      return g0 > 0.0 && g1 <= 0.0;
    case EventDirection::Any:
      return (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0);
  }
  return false;
}

double initial_step(const VectorField& f, double t0, const VectorXd& x0, const VectorXd& f0,
                    double tf, const Tolerances& tol) {
  // Hairer-Norsett-Wanner starting step heuristic, 5th order method.
  const double n = static_cast<double>(x0.size());
  auto wnorm = [&](const VectorXd& v, const VectorXd& ref) {
    double acc = 0.0;
    for (int i = 0; i < v.size(); ++i) {
      const double sc = tol.abs + tol.rel * std::abs(ref[i]);
      acc += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(acc / n);
  };
  const double d0 = wnorm(x0, x0);
  const double d1 = wnorm(f0, x0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, tf - t0);
  VectorXd x1 = x0 + h0 * f0;
  VectorXd f1(x0.size());
  f(t0 + h0, x1, f1);
  const double d2 = wnorm(f1 - f0, x0) / h0;
  double h1;
  if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 6.0);
  }
  return std::min({100 * h0, h1, tf - t0});
}

}  // namespace

Trajectory integrate_with_events(const VectorField& f, const VectorXd& x0, double t0, double tf,
                                 std::span<const EventFunction> events,
                                 const IntegrateOptions& opts) {
  if (!(tf > t0)) throw std::invalid_argument("integrate_with_events: tf must exceed t0");
  if (!(opts.tol.rel > 0.0) || !(opts.tol.abs > 0.0))
    throw std::invalid_argument("integrate_with_events: tolerances must be positive");

  const int n = static_cast<int>(x0.size());
  Trajectory traj;
  traj.times.push_back(t0);
  traj.states.push_back(x0);

  VectorXd y = x0;
  double t = t0;
  VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n), err(n);
  f(t, y, k1);
  if (!k1.allFinite()) throw NonFiniteState(t);

  const double h_max = opts.h_max > 0.0 ? opts.h_max : (tf - t0) / 10.0;
  double h = opts.h_init > 0.0 ? opts.h_init : initial_step(f, t0, y, k1, tf, opts.tol);
  h = std::min(h, h_max);

  std::vector<double> g_old(events.size());
  for (size_t i = 0; i < events.size(); ++i) g_old[i] = events[i].g(t, y);

  double err_prev = 1.0;
  bool done = false;
  while (!done) {
    if (t + h >= tf) {
      h = tf - t;
      done = true;
    }
    if (h < opts.h_min) throw StepSizeUnderflow(t);

    // Stage evaluations.
    ytmp = y + h * (a21 * k1);
    f(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, ytmp, k6);
    y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, y5, k7);  // FSAL

    if (!y5.allFinite() || !k7.allFinite()) throw NonFiniteState(t + h);

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double errnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = opts.tol.abs + opts.tol.rel * std::max(std::abs(y[i]), std::abs(y5[i]));
      errnorm += (err[i] / sc) * (err[i] / sc);
    }
    errnorm = std::sqrt(errnorm / n);

    if (errnorm > 1.0) {
      // Reject; shrink and retry.
      const double fac = std::max(0.2, 0.9 * std::pow(errnorm, -0.2));
      h *= fac;
      done = false;
      continue;
    }

    // Accepted. Check events on the dense output of this step.
    const double t_new = t + h;
    DenseSegment seg{t, t_new, &y, &y5, &k1, &k7};

    double t_hit = std::numeric_limits<double>::infinity();
    int hit_idx = -1;
    VectorXd x_hit;
    for (size_t ie = 0; ie < events.size(); ++ie) {
      const double g1 = events[ie].g(t_new, y5);
      if (crossed(g_old[ie], g1, events[ie].direction)) {
        // Bisect for the crossing time.
        double ta = t, tb = t_new;
        double ga = g_old[ie];
        VectorXd xm(n);
        for (int it = 0; it < 60 && (tb - ta) > opts.event_time_tol; ++it) {
          const double tm = 0.5 * (ta + tb);
          seg.eval(tm, xm);
          const double gm = events[ie].g(tm, xm);
          if ((ga < 0.0) == (gm < 0.0) && gm != 0.0) {
            ta = tm;
            ga = gm;
          } else {
            tb = tm;
          }
        }
        const double tc = tb;  // first time past the crossing
        if (tc < t_hit - opts.event_time_tol ||
            (std::abs(tc - t_hit) <= opts.event_time_tol &&
             events[ie].index < (hit_idx >= 0 ? events[hit_idx].index : INT_MAX))) {
          t_hit = tc;
          hit_idx = static_cast<int>(ie);
          seg.eval(tc, xm);
          x_hit = xm;
        }
      }
      g_old[ie] = g1;
    }

    if (hit_idx >= 0) {
      const EventFunction& ev = events[hit_idx];
      if (ev.terminal) {
        // The interpolated state is only location-grade; the handoff state
        // is re-integrated over the step prefix at full accuracy.
        if (t_hit - t > 1e-10) {
          IntegrateOptions sub = opts;
          sub.record_steps = false;
          sub.h_init = std::min(h, t_hit - t);
          const Trajectory fine = integrate_with_events(f, y, t, t_hit, {}, sub);
          x_hit = fine.states.back();
        }
        traj.events.push_back({t_hit, ev.index, x_hit});
        traj.times.push_back(t_hit);
        traj.states.push_back(x_hit);
        traj.terminated_by_event = true;
        traj.terminal_event_index = ev.index;
        return traj;
      }
      // Non-terminal: recorded at the interpolated state; integration
      // continues from the end of the step (the crossing is not restarted).
      traj.events.push_back({t_hit, ev.index, x_hit});
    }

    t = t_new;
    y.swap(y5);
    k1.swap(k7);
    if (opts.record_steps || done) {
      traj.times.push_back(t);
      traj.states.push_back(y);
    }

    // PI controller (Gustafsson).
    const double fac =
        0.9 * std::pow(std::max(errnorm, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
    err_prev = std::max(errnorm, 1e-10);
    h = std::min(h * std::clamp(fac, 0.2, 5.0), h_max);
  }

  return traj;
}

}  // namespace biped::num
