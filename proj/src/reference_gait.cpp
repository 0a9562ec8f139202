#include "biped/control/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace biped::ctrl {

ReferenceGait ReferenceGait::from_stride(const std::vector<Sample>& samples, int knots) {
  if (samples.size() < 8) throw std::invalid_argument("ReferenceGait: too few stride samples");
  for (size_t i = 1; i < samples.size(); ++i)
    if (!(samples[i].x > samples[i - 1].x))
      throw std::invalid_argument("ReferenceGait: x must be strictly increasing over the stride");

  ReferenceGait ref;
  ref.x0_ = samples.front().x;
  ref.stride_ = samples.back().x - samples.front().x;
  if (!(ref.stride_ > 0)) throw std::invalid_argument("ReferenceGait: empty stride");

  // Resample to a uniform grid by linear interpolation; the knot at x0 +
  // stride wraps onto x0.
  std::vector<double> ys(knots), xds(knots);
  size_t j = 0;
  for (int i = 0; i < knots; ++i) {
    const double x = ref.x0_ + ref.stride_ * i / knots;
    while (j + 2 < samples.size() && samples[j + 1].x < x) ++j;
    const double u = (x - samples[j].x) / (samples[j + 1].x - samples[j].x);
    ys[i] = samples[j].y + u * (samples[j + 1].y - samples[j].y);
    xds[i] = samples[j].xd + u * (samples[j + 1].xd - samples[j].xd);
  }
  ref.ybar_ = num::PeriodicCubicSpline(std::move(ys), ref.stride_);
  ref.xdbar_ = num::PeriodicCubicSpline(std::move(xds), ref.stride_);
  return ref;
}

}  // namespace biped::ctrl
