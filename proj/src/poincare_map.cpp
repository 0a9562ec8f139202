#include "biped/poincare/map.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <cmath>

#include "biped/numerics/linalg.hpp"

namespace biped::poincare {

SectionState section_from_state(const btslip::TemplateState& s) {
  return {s.y, s.phi, s.xd, s.yd, s.phid};
}

namespace {

btslip::TemplateState state_on_section(const SectionState& S, const btslip::TemplateParams& p) {
  btslip::TemplateState s;
  s.x = 0.0;
  s.y = S.y;
  s.phi = S.phi;
  s.xd = S.xd;
  s.yd = S.yd;
  s.phid = S.phid;
  s.phase = btslip::Phase::SingleSupport;
  // VLO: stance foot exactly below the hip, leg 1 by convention.
  s.feet[0] = btslip::FootContact{s.hip_x(p), 0.0};
  return s;
}

}  // namespace

SectionState return_map(const SectionState& S, const ctrl::VppInput& delta,
                        const btslip::TemplateParams& p, const ControllerFactory& make_controller,
                        const ReturnMapOptions& opts) {
  const Vector5d v = S.vec();
  if (!v.allFinite()) throw std::invalid_argument("return_map: non-finite section state");
  const btslip::TemplateState s0 = state_on_section(S, p);
  const double y_h = s0.hip_y(p);
  if (!(y_h > p.L0 * std::sin(p.alpha0) && y_h < p.L0)) throw FellBeforeSection();

  auto controller = make_controller(delta);
  btslip::SimulateTemplateOptions sopts;
  sopts.duration = opts.time_cap;
  sopts.tol = opts.tol;
  sopts.record = false;
  sopts.stop_at_section = true;

  btslip::TemplateRun run;
  try {
    run = simulate_template(s0, *controller, p, sim::Terrain{}, nullptr, sopts);
  } catch (const btslip::SimulationError& e) {
    throw MapFailure(e.what());
  }
  if (run.fell) throw FellBeforeSection();
  if (!run.reached_section) throw NoSectionCrossing();
  return section_from_state(run.final_state);
}

FixedPointResult find_fixed_point(const SectionState& S_guess, const ctrl::VppInput& delta,
                                  const btslip::TemplateParams& p,
                                  const ControllerFactory& make_controller,
                                  const FixedPointOptions& opts) {
  auto residual_of = [&](const Vector5d& v) -> Vector5d {
    const SectionState S = SectionState::from_vec(v);
    return return_map(S, delta, p, make_controller, opts.map).vec() - v;
  };

  Vector5d v = S_guess.vec();
  Vector5d F = residual_of(v);
  FixedPointResult result;
  if (F.norm() < opts.residual_tol) {
    result.S_star = SectionState::from_vec(v);
    result.residual = F.norm();
    result.iterations = 0;
    return result;
  }

  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    Matrix5d J;
    for (int j = 0; j < 5; ++j) {
      const double h = opts.fd_step * std::max(1.0, std::abs(v[j]));
      Vector5d vp = v;
      vp[j] += h;
      J.col(j) = (residual_of(vp) - F) / h;
    }
    const Vector5d step = J.fullPivLu().solve(-F);
    if (!step.allFinite()) throw NoConvergence();

    // Damped acceptance.
    double lambda = 1.0;
    Vector5d v_next = v + step;
    Vector5d F_next;
    bool ok = false;
    for (int ls = 0; ls < 5; ++ls) {
      try {
        F_next = residual_of(v_next);
        if (F_next.norm() < F.norm() || ls == 4) {
          ok = true;
          break;
        }
      } catch (const MapFailure&) {
        if (ls == 4) throw;
      }
      lambda *= 0.5;
      v_next = v + lambda * step;
    }
    if (!ok) throw NoConvergence();
    v = v_next;
    F = F_next;
    if (F.norm() < opts.residual_tol) {
      result.S_star = SectionState::from_vec(v);
      result.residual = F.norm();
      result.iterations = iter;
      return result;
    }
  }
  throw NoConvergence();
}

std::optional<FixedPointResult> find_periodic_gait(const ctrl::VppInput& delta,
                                                   const btslip::TemplateParams& p,
                                                   const ControllerFactory& make_controller,
                                                   const SeedGrid& grid,
                                                   const FixedPointOptions& opts) {
  // Rank seeds by one-stride residual, then refine the best ones by Newton.
  struct Seed {
    double score;
    SectionState S;
  };
  std::vector<Seed> seeds;
  for (int iy = 0; iy < grid.y_count; ++iy) {
    for (int ix = 0; ix < grid.xd_count; ++ix) {
      SectionState S;
      S.y = grid.y_min + (grid.y_max - grid.y_min) * iy / std::max(1, grid.y_count - 1);
      S.xd = grid.xd_min + (grid.xd_max - grid.xd_min) * ix / std::max(1, grid.xd_count - 1);
      S.phi = M_PI / 2;
      S.yd = 0.0;
      S.phid = 0.0;
      try {
        const Vector5d r = return_map(S, delta, p, make_controller, opts.map).vec() - S.vec();
        seeds.push_back({r.norm(), S});
      } catch (const MapFailure&) {
      } catch (const std::invalid_argument&) {
      }
    }
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.score < b.score; });

  const size_t tries = std::min<size_t>(seeds.size(), 6);
  for (size_t i = 0; i < tries; ++i) {
    try {
      return find_fixed_point(seeds[i].S, delta, p, make_controller, opts);
    } catch (const std::runtime_error&) {
    }
  }
  return std::nullopt;
}

PoincareLinearization linearize(const SectionState& S_star, const ctrl::VppInput& delta_star,
                                const btslip::TemplateParams& p,
                                const ControllerFactory& make_controller,
                                const LinearizeOptions& opts) {
  PoincareLinearization lin;
  lin.S_star = S_star;
  lin.delta_star = delta_star;

  const Vector5d v0 = S_star.vec();
  lin.fp_residual = (return_map(S_star, delta_star, p, make_controller, opts.map).vec() - v0).norm();

  // 14 independent probes: +-h for 5 state and 2 input components.
  struct Probe {
    int kind;  // 0: state, 1: input
    int j;
    double sign;
    double h;
    Vector5d result;
    std::exception_ptr error;
  };
  std::vector<Probe> probes;
  std::array<double, 5> h_s{};
  for (int j = 0; j < 5; ++j) {
    h_s[j] = opts.h_state * std::max(1.0, std::abs(v0[j]));
    probes.push_back({0, j, +1.0, h_s[j], Vector5d::Zero(), nullptr});
    probes.push_back({0, j, -1.0, h_s[j], Vector5d::Zero(), nullptr});
  }
  const double h_d0 = opts.h_delta * std::max(1.0, std::abs(delta_star.r_vpp));
  const double h_d1 = opts.h_delta * std::max(1.0, std::abs(delta_star.gamma));
  probes.push_back({1, 0, +1.0, h_d0, Vector5d::Zero(), nullptr});
  probes.push_back({1, 0, -1.0, h_d0, Vector5d::Zero(), nullptr});
  probes.push_back({1, 1, +1.0, h_d1, Vector5d::Zero(), nullptr});
  probes.push_back({1, 1, -1.0, h_d1, Vector5d::Zero(), nullptr});

  auto run_probe = [&](Probe& pr) {
    try {
      if (pr.kind == 0) {
        Vector5d v = v0;
        v[pr.j] += pr.sign * pr.h;
        pr.result =
            return_map(SectionState::from_vec(v), delta_star, p, make_controller, opts.map).vec();
      } else {
        ctrl::VppInput d = delta_star;
        (pr.j == 0 ? d.r_vpp : d.gamma) += pr.sign * pr.h;
        pr.result = return_map(S_star, d, p, make_controller, opts.map).vec();
      }
    } catch (...) {
      pr.error = std::current_exception();
    }
  };

  if (opts.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(probes.size()); ++i) run_probe(probes[i]);
  } else {
    for (auto& pr : probes) run_probe(pr);
  }
  for (auto& pr : probes)
    if (pr.error) std::rethrow_exception(pr.error);

  for (size_t i = 0; i + 1 < probes.size(); i += 2) {
    const Probe& plus = probes[i];
    const Probe& minus = probes[i + 1];
    const Vector5d col = (plus.result - minus.result) / (2.0 * plus.h);
    if (plus.kind == 0)
      lin.J_S.col(plus.j) = col;
    else
      lin.J_delta.col(plus.j) = col;
  }
  lin.eigenvalues = num::eigenvalues(lin.J_S);
  return lin;
}

Matrix5d default_Q() {
  Matrix5d Q = Matrix5d::Zero();
  Q.diagonal() << 10.0, 10.0, 1.0, 1.0, 1.0;
  return Q;
}

Eigen::Matrix2d default_R() {
  Eigen::Matrix2d R = Eigen::Matrix2d::Zero();
  R.diagonal() << 100.0, 100.0;
  return R;
}

void make_dlqr(PoincareLinearization& lin, const Matrix5d& Q, const Eigen::Matrix2d& R) {
  // Controllability of the stride pair.
  Eigen::Matrix<double, 5, 10> ctrb;
  Eigen::Matrix<double, 5, 2> col = lin.J_delta;
  for (int i = 0; i < 5; ++i) {
    ctrb.block<5, 2>(0, 2 * i) = col;
    col = lin.J_S * col;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctrb);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-10 * sv(0)) throw Uncontrollable();

  const num::DareSolution sol = num::solve_dare(lin.J_S, lin.J_delta, Q, R);
  lin.Q = Q;
  lin.R = R;
  lin.K = Matrix25d(sol.K);
}

ctrl::VppInput dlqr_update(const PoincareLinearization& lin, const SectionState& S_n) {
  if (!lin.K.has_value()) throw Uncontrollable();
  const Eigen::Vector2d dd = -(*lin.K) * (S_n.vec() - lin.S_star.vec());
  ctrl::VppInput d;
  d.r_vpp = std::max(0.0, lin.delta_star.r_vpp + dd[0]);
  d.gamma = lin.delta_star.gamma + dd[1];
  return d;
}

}  // namespace biped::poincare
