#include "biped/numerics/dare.hpp"

#include <Eigen/Dense>

namespace biped::num {

DareSolution solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                        const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                        const DareOptions& opts) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != B.cols() || R.cols() != B.cols())
    throw std::invalid_argument("solve_dare: dimension mismatch");

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Ak = A;
  Eigen::MatrixXd Gk = B * R.ldlt().solve(B.transpose());
  Eigen::MatrixXd Hk = Q;

  bool converged = false;
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const Eigen::MatrixXd W = I + Gk * Hk;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(W);
    const Eigen::MatrixXd WinvA = lu.solve(Ak);
    const Eigen::MatrixXd WinvG = lu.solve(Gk);  // (I + GH)^{-1} G = G (I + HG)^{-1}
    const Eigen::MatrixXd H_next = Hk + Ak.transpose() * Hk * WinvA;
    const Eigen::MatrixXd G_next = Gk + Ak * WinvG * Ak.transpose();
    const Eigen::MatrixXd A_next = Ak * WinvA;
    const double delta = (H_next - Hk).norm();
    const double scale = std::max(1.0, H_next.norm());
    Hk = 0.5 * (H_next + H_next.transpose());
    Gk = 0.5 * (G_next + G_next.transpose());
    Ak = A_next;
    if (!Hk.allFinite()) throw NotStabilizable();
    if (delta <= opts.convergence * scale) {
      converged = true;
      ++iter;
      break;
    }
  }
  if (!converged) throw NotStabilizable();

  DareSolution sol;
  sol.P = Hk;
  const Eigen::MatrixXd BtPB_R = R + B.transpose() * sol.P * B;
  sol.K = BtPB_R.ldlt().solve(B.transpose() * sol.P * A);
  sol.iterations = iter;
  const Eigen::MatrixXd res = A.transpose() * sol.P * A - sol.P -
                              A.transpose() * sol.P * B * sol.K + Q;
  sol.residual = res.norm();
  if (!(sol.residual < 1e-8 * std::max(1.0, sol.P.norm()))) throw NotStabilizable();
  return sol;
}

}  // namespace biped::num
