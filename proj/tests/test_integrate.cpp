#include <doctest.h>

#include <cmath>

#include "biped/numerics/integrate.hpp"

using namespace biped::num;
using Eigen::VectorXd;

namespace {

VectorXd scalar(double v) {
  VectorXd x(1);
  x << v;
  return x;
}

const VectorField decay = [](double, const VectorXd& x, VectorXd& dx) {
  dx.resize(1);
  dx[0] = -x[0];
};

}  // namespace

TEST_CASE("exponential decay hits the closed form") {
  auto traj = integrate_with_events(decay, scalar(1.0), 0.0, 1.0, {});
  CHECK(traj.x_end()[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(traj.t_end() == doctest::Approx(1.0));
}

TEST_CASE("terminal falling event lands on ln 2") {
  EventFunction ev{0, [](double, const VectorXd& x) { return x[0] - 0.5; },
                   EventDirection::Falling, true};
  auto traj = integrate_with_events(decay, scalar(1.0), 0.0, 1.0, {&ev, 1});
  REQUIRE(traj.terminated_by_event);
  CHECK(traj.terminal_event_index == 0);
  CHECK(std::abs(traj.t_end() - std::log(2.0)) < 1e-8);
  CHECK(traj.events.size() == 1);
}

TEST_CASE("time-affine event located at t = 0.5") {
  const VectorField frozen = [](double, const VectorXd&, VectorXd& dx) {
    dx.resize(1);
    dx[0] = 0.0;
  };
  EventFunction ev{3, [](double t, const VectorXd&) { return t - 0.5; }, EventDirection::Any,
                   false};
  auto traj = integrate_with_events(frozen, scalar(1.0), 0.0, 1.0, {&ev, 1});
  REQUIRE(traj.events.size() == 1);
  CHECK(std::abs(traj.events[0].t - 0.5) < 1e-10);
  CHECK(traj.events[0].index == 3);
  CHECK_FALSE(traj.terminated_by_event);
  CHECK(traj.t_end() == doctest::Approx(1.0));
}

TEST_CASE("event residual |g| is small at the reported state") {
  // Nonlinear oscillator, event on a state function.
  const VectorField osc = [](double, const VectorXd& x, VectorXd& dx) {
    dx.resize(2);
    dx[0] = x[1];
    dx[1] = -std::sin(x[0]);
  };
  VectorXd x0(2);
  x0 << 0.0, 1.0;
  EventFunction ev{0, [](double, const VectorXd& x) { return x[0] - 0.3; }, EventDirection::Rising,
                   false};
  auto traj = integrate_with_events(osc, x0, 0.0, 10.0, {&ev, 1});
  REQUIRE(traj.events.size() >= 1);
  for (const auto& e : traj.events) CHECK(std::abs(e.state[0] - 0.3) < 1e-9);
}

TEST_CASE("halving tolerances reduces the decay error at least 4x") {
  auto error_at = [&](double rel, double abs) {
    IntegrateOptions opts;
    opts.tol = {rel, abs};
    auto traj = integrate_with_events(decay, scalar(1.0), 0.0, 1.0, {}, opts);
    return std::abs(traj.x_end()[0] - std::exp(-1.0));
  };
  const double coarse = error_at(1e-5, 1e-7);
  const double fine = error_at(5e-6, 5e-8);
  CHECK(fine * 4.0 <= coarse);
}

TEST_CASE("simultaneous events break ties by lowest index") {
  const VectorField drift = [](double, const VectorXd&, VectorXd& dx) {
    dx.resize(1);
    dx[0] = 1.0;
  };
  // Both guards cross zero at exactly t = 0.5 (x starts at -0.5).
  EventFunction hi{7, [](double, const VectorXd& x) { return x[0]; }, EventDirection::Rising, true};
  EventFunction lo{2, [](double, const VectorXd& x) { return x[0]; }, EventDirection::Rising, true};
  std::vector<EventFunction> evs{hi, lo};
  auto traj = integrate_with_events(drift, scalar(-0.5), 0.0, 1.0, evs);
  REQUIRE(traj.terminated_by_event);
  CHECK(traj.terminal_event_index == 2);
}

TEST_CASE("blow-up raises NonFiniteState or StepSizeUnderflow") {
  const VectorField blowup = [](double, const VectorXd& x, VectorXd& dx) {
    dx.resize(1);
    dx[0] = x[0] * x[0];
  };
  CHECK_THROWS_AS(integrate_with_events(blowup, scalar(1.0), 0.0, 2.0, {}),
                  const std::runtime_error&);
}

TEST_CASE("invalid tolerances are rejected") {
  IntegrateOptions opts;
  opts.tol = {0.0, 1e-9};
  CHECK_THROWS_AS(integrate_with_events(decay, scalar(1.0), 0.0, 1.0, {}, opts),
                  const std::invalid_argument&);
}
