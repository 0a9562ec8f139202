#include "biped/numerics/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace biped::num {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M, double rel_tol) {
  if (M.size() == 0) return Eigen::MatrixXd(M.cols(), M.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = rel_tol * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv_sv(sv.size());
  for (int i = 0; i < sv.size(); ++i) inv_sv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> out(M.rows());
  for (int i = 0; i < M.rows(); ++i) out[i] = es.eigenvalues()(i);
  return out;
}

double spectral_radius(const Eigen::MatrixXd& M) {
  double r = 0.0;
  for (const auto& ev : eigenvalues(M)) r = std::max(r, std::abs(ev));
  return r;
}

}  // namespace biped::num
