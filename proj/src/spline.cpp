#include "biped/numerics/spline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace biped::num {

PeriodicCubicSpline::PeriodicCubicSpline(std::vector<double> values, double period)
    : values_(std::move(values)), period_(period) {
  const int n = static_cast<int>(values_.size());
  if (n < 3) throw std::invalid_argument("PeriodicCubicSpline: need at least 3 knots");
  if (!(period_ > 0.0)) throw std::invalid_argument("PeriodicCubicSpline: period must be positive");
  h_ = period_ / n;

  // Cyclic tridiagonal system for knot second derivatives:
  //   m[j-1] + 4 m[j] + m[j+1] = 6 (v[j-1] - 2 v[j] + v[j+1]) / h^2
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < n; ++j) {
    A(j, (j + n - 1) % n) += 1.0;
    A(j, j) += 4.0;
    A(j, (j + 1) % n) += 1.0;
    const double vm = values_[(j + n - 1) % n], v0 = values_[j], vp = values_[(j + 1) % n];
    rhs(j) = 6.0 * (vm - 2.0 * v0 + vp) / (h_ * h_);
  }
  Eigen::VectorXd m = A.partialPivLu().solve(rhs);
  m_.assign(m.data(), m.data() + n);
}

void PeriodicCubicSpline::locate(double x, int& j, double& u) const {
  const int n = static_cast<int>(values_.size());
  double xw = std::fmod(x, period_);
  if (xw < 0.0) xw += period_;
  j = static_cast<int>(xw / h_);
  if (j >= n) j = n - 1;
  u = xw - j * h_;
}

double PeriodicCubicSpline::operator()(double x) const {
  int j;
  double u;
  locate(x, j, u);
  const int n = static_cast<int>(values_.size());
  const int jp = (j + 1) % n;
  const double a = (h_ - u), b = u;
  return (m_[j] * a * a * a + m_[jp] * b * b * b) / (6.0 * h_) +
         (values_[j] / h_ - m_[j] * h_ / 6.0) * a + (values_[jp] / h_ - m_[jp] * h_ / 6.0) * b;
}

double PeriodicCubicSpline::derivative(double x) const {
  int j;
  double u;
  locate(x, j, u);
  const int n = static_cast<int>(values_.size());
  const int jp = (j + 1) % n;
  const double a = (h_ - u), b = u;
  return (-m_[j] * a * a + m_[jp] * b * b) / (2.0 * h_) -
         (values_[j] / h_ - m_[j] * h_ / 6.0) + (values_[jp] / h_ - m_[jp] * h_ / 6.0);
}

double PeriodicCubicSpline::second_derivative(double x) const {
  int j;
  double u;
  locate(x, j, u);
  const int n = static_cast<int>(values_.size());
  const int jp = (j + 1) % n;
  return (m_[j] * (h_ - u) + m_[jp] * u) / h_;
}

}  // namespace biped::num
