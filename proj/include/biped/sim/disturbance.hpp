#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

namespace biped::sim {

enum class ApplicationPoint { Com = 0, StanceFoot = 1, RightFoot = 2 };

struct DisturbanceWindow {
  Eigen::Vector2d force = Eigen::Vector2d::Zero();  // [N]
  ApplicationPoint point = ApplicationPoint::Com;
  double t_start = 0.0;
  double duration = 0.0;
};

/// Active external force per application point at time t: the sum of all
/// windows containing t, zero outside.
struct DisturbanceSchedule {
  std::vector<DisturbanceWindow> windows;

  std::array<Eigen::Vector2d, 3> active(double t) const;
  bool empty() const { return windows.empty(); }
};

}  // namespace biped::sim
