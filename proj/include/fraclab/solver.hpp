#ifndef FRACLAB_SOLVER_HPP
#define FRACLAB_SOLVER_HPP

#include <optional>
#include <vector>

#include "fraclab/core.hpp"
#include "fraclab/drift.hpp"
#include "fraclab/fft.hpp"
#include "fraclab/fracops.hpp"

namespace fraclab {

// Initial-value problem for u_t + b u_x + (-lap)^s u - eps u_xx = f on the
// torus. The scheme is first-order IMEX: upwind advection treated
// explicitly, diffusion by exact multiplier division in frequency space,
//   u_hat <- (u_hat - dt (b u_x - f)_hat) / (1 + dt (|xi|^{2s} + eps xi^2)).
// Monotone under the CFL guard dt <= h / (2 sup|b|).
struct Problem {
  FractionalOrder order;
  Grid grid;
  DriftSpec drift;
  SpaceTimeFn forcing;       // may be null (zero forcing)
  double forcing_sup = 0.0;  // declared sup norm of f, used by diagnostics
  std::vector<double> u0;
  double eps_visc = 0.0;
  double t_start = 0.0;
  double t_end = 1.0;
  double dt = 1e-3;
  // storage: every step inside the trailing dense window, strided earlier
  double dense_window = 1.0;
  int early_stride = 10;

  void validate() const;
  bool eps_exceeds_lemma_bound() const { return eps_visc >= 1.0; }  // flagged vs the eps<1 hypothesis
};

struct Trajectory {
  Field field;
  Problem problem;
  // per-step diagnostics (every step, not just stored levels)
  std::vector<double> step_times;
  std::vector<double> sup_series;
  std::vector<double> min_series;
  std::vector<double> mean_series;
  double cfl_margin = 0.0;
  // max over steps of (sup_{n+1} - sup_n - dt ||f||) / max(1, |sup_n|); <= 0
  // means the forcing-adjusted maximum principle held at every step
  double max_principle_excess = 0.0;
};

std::vector<double> step(std::span<const double> state, double t, const Problem& p,
                         const RealFft& fft);

Trajectory solve(const Problem& p);

std::vector<Trajectory> vanishing_viscosity_sweep(const Problem& p,
                                                  const std::vector<double>& eps_list);

}  // namespace fraclab

#endif
