#pragma once

#include <Eigen/Core>
#include <stdexcept>

namespace biped::num {

struct DareSolution {
  Eigen::MatrixXd P;  // symmetric PSD solution
  Eigen::MatrixXd K;  // (R + B'PB)^{-1} B'PA
  int iterations = 0;
  double residual = 0.0;
};

struct NotStabilizable : std::runtime_error {
  NotStabilizable() : std::runtime_error("DARE iteration failed to converge; (A,B) not stabilizable?") {}
};

struct DareOptions {
  double convergence = 1e-12;
  int max_iterations = 200;
};

/// Discrete-time algebraic Riccati equation, solved by the structured
/// doubling algorithm. Q must be symmetric PSD, R symmetric PD.
DareSolution solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                        const DareOptions& opts = {});

}  // namespace biped::num
