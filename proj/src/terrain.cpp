#include "biped/sim/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace biped::sim {

Terrain Terrain::sine(double amplitude_cm, double base_cm, double spatial_freq) {
  Terrain t;
  t.kind_ = Kind::Sine;
  t.amp_m_ = 0.01 * amplitude_cm;
  t.base_m_ = 0.01 * base_cm;
  t.freq_ = spatial_freq;
  return t;
}

Terrain Terrain::custom(std::vector<double> xs, std::vector<double> hs) {
  if (xs.size() != hs.size() || xs.size() < 2)
    throw std::invalid_argument("Terrain::custom: need matching sample arrays of length >= 2");
  for (size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("Terrain::custom: x not increasing");
  for (double h : hs)
    if (h < 0.0) throw std::invalid_argument("Terrain::custom: heights must be >= 0");
  Terrain t;
  t.kind_ = Kind::Custom;
  t.xs_ = std::move(xs);
  t.hs_ = std::move(hs);
  return t;
}

double Terrain::height(double x) const {
  switch (kind_) {
    case Kind::Flat:
      return 0.0;
    case Kind::Sine:
      return std::max(0.0, base_m_ + amp_m_ * std::sin(freq_ * x));
    case Kind::Custom: {
      if (x <= xs_.front()) return hs_.front();
      if (x >= xs_.back()) return hs_.back();
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const size_t j = static_cast<size_t>(it - xs_.begin()) - 1;
      const double u = (x - xs_[j]) / (xs_[j + 1] - xs_[j]);
      return hs_[j] + u * (hs_[j + 1] - hs_[j]);
    }
  }
  return 0.0;
}

}  // namespace biped::sim
