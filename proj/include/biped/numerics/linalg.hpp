#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace biped::num {

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// rel_tol * max_singular_value are treated as zero.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M, double rel_tol = 1e-12);

/// Eigenvalues of a real square matrix, with multiplicity.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& M);

double spectral_radius(const Eigen::MatrixXd& M);

}  // namespace biped::num
