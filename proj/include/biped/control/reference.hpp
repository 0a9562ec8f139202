#pragma once

#include <vector>

#include "biped/numerics/spline.hpp"

namespace biped::ctrl {

/// Desired CoM height and forward speed over one stride, parameterized by the
/// CoM abscissa and extended periodically (C2 splines on 512 uniform knots).
class ReferenceGait {
 public:
  ReferenceGait() = default;

  struct Sample {
    double x, y, xd;
  };

  /// Build from stride samples with strictly increasing x. The first and last
  /// samples are one stride apart.
  static ReferenceGait from_stride(const std::vector<Sample>& samples, int knots = 512);

  bool valid() const { return ybar_.valid(); }
  double stride_length() const { return stride_; }

  double y(double x) const { return ybar_(x - x0_); }
  double y_d(double x) const { return ybar_.derivative(x - x0_); }
  double y_dd(double x) const { return ybar_.second_derivative(x - x0_); }
  double xd(double x) const { return xdbar_(x - x0_); }
  double xd_d(double x) const { return xdbar_.derivative(x - x0_); }

 private:
  num::PeriodicCubicSpline ybar_, xdbar_;
  double stride_ = 0.0;
  double x0_ = 0.0;
};

}  // namespace biped::ctrl
