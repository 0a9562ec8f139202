// Times the Poincare-map linearization with the serial and the OpenMP probe
// loops and checks they agree bitwise.
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "biped/control/controllers.hpp"

using Clock = std::chrono::steady_clock;

int main() {
  using namespace biped;

  const btslip::TemplateParams p = ctrl::nominal::params();
  const ctrl::VppInput delta = ctrl::nominal::delta();
  const auto factory = ctrl::vpp_factory(p);

  std::printf("searching for the periodic gait...\n");
  const auto t0 = Clock::now();
  const poincare::FixedPointResult fp =
      poincare::find_fixed_point(ctrl::nominal::section_seed(), delta, p, factory);
  const double t_fp = std::chrono::duration<double>(Clock::now() - t0).count();
  std::printf("fixed point in %.2f s (residual %.2e, %d Newton steps)\n", t_fp, fp.residual,
              fp.iterations);

  poincare::LinearizeOptions opts;
  opts.parallel = false;
  const auto t1 = Clock::now();
  const auto lin_serial = poincare::linearize(fp.S_star, delta, p, factory, opts);
  const double dt_serial = std::chrono::duration<double>(Clock::now() - t1).count();

  opts.parallel = true;
  const auto t2 = Clock::now();
  const auto lin_parallel = poincare::linearize(fp.S_star, delta, p, factory, opts);
  const double dt_parallel = std::chrono::duration<double>(Clock::now() - t2).count();

  const bool identical = (lin_serial.J_S.array() == lin_parallel.J_S.array()).all() &&
                         (lin_serial.J_delta.array() == lin_parallel.J_delta.array()).all();

  std::printf("\n%-28s %10s\n", "variant", "time [s]");
  std::printf("%-28s %10.3f\n", "linearize (serial)", dt_serial);
  std::printf("%-28s %10.3f   (%d threads)\n", "linearize (OpenMP)", dt_parallel,
              omp_get_max_threads());
  std::printf("speedup %.2fx, results %s\n", dt_serial / dt_parallel,
              identical ? "bitwise identical" : "DIFFER");
  return identical ? 0 : 1;
}
