#pragma once

#include <Eigen/Core>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "biped/btslip/sim.hpp"
#include "biped/control/laws.hpp"
#include "biped/numerics/dare.hpp"

namespace biped::poincare {

using Vector5d = Eigen::Matrix<double, 5, 1>;
using Matrix5d = Eigen::Matrix<double, 5, 5>;
using Matrix52d = Eigen::Matrix<double, 5, 2>;
using Matrix25d = Eigen::Matrix<double, 2, 5>;

/// State on the vertical-leg-orientation section: the hip stands exactly
/// above the stance foot within single support. x is dropped (translation
/// invariance).
struct SectionState {
  double y = 0.0, phi = M_PI / 2, xd = 0.0, yd = 0.0, phid = 0.0;

  Vector5d vec() const {
    Vector5d v;
    v << y, phi, xd, yd, phid;
    return v;
  }
  static SectionState from_vec(const Vector5d& v) { return {v[0], v[1], v[2], v[3], v[4]}; }
};

SectionState section_from_state(const btslip::TemplateState& s);

/// Errors of the stride map. FellBeforeSection / NoSectionCrossing derive
/// from MapFailure so callers can catch any map breakdown at once.
struct MapFailure : std::runtime_error {
  explicit MapFailure(const std::string& what) : std::runtime_error(what) {}
};
struct FellBeforeSection : MapFailure {
  FellBeforeSection() : MapFailure("model fell before reaching the section") {}
};
struct NoSectionCrossing : MapFailure {
  NoSectionCrossing() : MapFailure("no section crossing within the time cap") {}
};
struct NoConvergence : std::runtime_error {
  NoConvergence() : std::runtime_error("fixed-point Newton iteration did not converge") {}
};
struct Uncontrollable : std::runtime_error {
  Uncontrollable() : std::runtime_error("(J_S, J_delta) failed the controllability rank check") {}
};

/// Builds the stride controller for a given VPP input.
using ControllerFactory =
    std::function<std::unique_ptr<btslip::TemplateController>(const ctrl::VppInput&)>;

struct ReturnMapOptions {
  num::Tolerances tol{1e-11, 1e-13};
  double time_cap = 5.0;  // seconds of simulated time before NoSectionCrossing
};

/// One full stride: integrate the hybrid system from a VLO state to the next
/// VLO crossing and report the section state there.
SectionState return_map(const SectionState& S, const ctrl::VppInput& delta,
                        const btslip::TemplateParams& p, const ControllerFactory& make_controller,
                        const ReturnMapOptions& opts = {});

struct FixedPointOptions {
  double residual_tol = 1e-9;
  int max_iterations = 20;
  double fd_step = 1e-6;
  ReturnMapOptions map;
};

struct FixedPointResult {
  SectionState S_star;
  double residual = 0.0;
  int iterations = 0;
};

FixedPointResult find_fixed_point(const SectionState& S_guess, const ctrl::VppInput& delta,
                                  const btslip::TemplateParams& p,
                                  const ControllerFactory& make_controller,
                                  const FixedPointOptions& opts = {});

/// Grid-search seeding over (y, xdot) at phi = pi/2, ydot = phidot = 0,
/// followed by Newton refinement from the most promising seeds.
struct SeedGrid {
  double y_min = 0.95, y_max = 1.06;
  int y_count = 8;
  double xd_min = 0.6, xd_max = 1.5;
  int xd_count = 10;
};

std::optional<FixedPointResult> find_periodic_gait(const ctrl::VppInput& delta,
                                                   const btslip::TemplateParams& p,
                                                   const ControllerFactory& make_controller,
                                                   const SeedGrid& grid = {},
                                                   const FixedPointOptions& opts = {});

struct PoincareLinearization {
  SectionState S_star;
  ctrl::VppInput delta_star;
  Matrix5d J_S = Matrix5d::Zero();
  Matrix52d J_delta = Matrix52d::Zero();
  std::vector<std::complex<double>> eigenvalues;
  double fp_residual = 0.0;  // ||P(S*) - S*|| at the linearization point

  // Set by make_dlqr:
  Matrix5d Q = Matrix5d::Zero();
  Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
  std::optional<Matrix25d> K;
};

struct LinearizeOptions {
  double h_state = 1e-5;  // scaled per component
  double h_delta = 1e-5;
  bool parallel = false;  // OpenMP over the finite-difference probes
  ReturnMapOptions map;
};

/// Central-difference Jacobians of the return map. The probes are
/// independent strides; with parallel=true they run under OpenMP and the
/// result is bitwise identical to the serial path.
PoincareLinearization linearize(const SectionState& S_star, const ctrl::VppInput& delta_star,
                                const btslip::TemplateParams& p,
                                const ControllerFactory& make_controller,
                                const LinearizeOptions& opts = {});

/// Default stride-to-stride weights (the thesis leaves Q, R unspecified).
Matrix5d default_Q();
Eigen::Matrix2d default_R();

/// Solves the DARE for the stride map and attaches the DLQR gain.
void make_dlqr(PoincareLinearization& lin, const Matrix5d& Q, const Eigen::Matrix2d& R);

/// Once-per-stride update delta_n = delta* - K (S_n - S*), r_vpp clamped >= 0.
ctrl::VppInput dlqr_update(const PoincareLinearization& lin, const SectionState& S_n);

}  // namespace biped::poincare
