#pragma once

#include <vector>

namespace biped::num {

/// C2 cubic spline on a uniform grid over [0, period), extended periodically.
class PeriodicCubicSpline {
 public:
  PeriodicCubicSpline() = default;
  PeriodicCubicSpline(std::vector<double> values, double period);

  double operator()(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;

  double period() const { return period_; }
  bool valid() const { return !values_.empty(); }

 private:
  void locate(double x, int& j, double& u) const;

  std::vector<double> values_;
  std::vector<double> m_;  // second derivatives at knots
  double period_ = 0.0;
  double h_ = 0.0;
};

}  // namespace biped::num
