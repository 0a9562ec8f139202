#pragma once

#include <vector>

namespace biped::sim {

/// Ground height profile h(x) >= 0 along the sagittal line.
class Terrain {
 public:
  /// Flat ground, h = 0.
  Terrain() = default;

  /// h(x) = 0.01 * (base_cm + amplitude_cm * sin(freq * x)), clamped >= 0.
  static Terrain sine(double amplitude_cm, double base_cm, double spatial_freq);

  /// Piecewise-linear samples; flat extension outside the sampled range.
  static Terrain custom(std::vector<double> xs, std::vector<double> hs);

  double height(double x) const;
  double operator()(double x) const { return height(x); }
  bool is_flat() const { return kind_ == Kind::Flat; }

 private:
  enum class Kind { Flat, Sine, Custom };
  Kind kind_ = Kind::Flat;
  double amp_m_ = 0.0, base_m_ = 0.0, freq_ = 0.0;
  std::vector<double> xs_, hs_;
};

}  // namespace biped::sim
