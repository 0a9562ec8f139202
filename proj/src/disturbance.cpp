#include "biped/sim/disturbance.hpp"

namespace biped::sim {

std::array<Eigen::Vector2d, 3> DisturbanceSchedule::active(double t) const {
  std::array<Eigen::Vector2d, 3> out{Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
                                     Eigen::Vector2d::Zero()};
  for (const DisturbanceWindow& w : windows) {
    if (t >= w.t_start && t < w.t_start + w.duration)
      out[static_cast<int>(w.point)] += w.force;
  }
  return out;
}

}  // namespace biped::sim
