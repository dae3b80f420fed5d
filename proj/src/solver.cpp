#include "fraclab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fraclab {

void Problem::validate() const {
  require(grid.n_points >= 2, Errc::invalid_argument, "problem needs a grid");
  require(u0.size() == grid.n_points, Errc::invalid_argument, "u0 must match the grid");
  for (double v : u0) require(std::isfinite(v), Errc::non_finite_input, "u0 must be finite");
  require(dt > 0, Errc::invalid_argument, "dt must be > 0");
  require(t_end > t_start, Errc::invalid_argument, "t_span must be increasing");
  require(eps_visc >= 0, Errc::invalid_argument, "eps_visc must be >= 0");
  const double a = drift.sup_norm();
  if (a > 0)
    require(dt <= grid.spacing / (2.0 * a) + 1e-15, Errc::cfl_violation,
            "dt exceeds the CFL guard h/(2 sup|b|)");
}

namespace {

std::vector<double> diffusion_multiplier(const Problem& p) {
  std::vector<double> m(p.grid.n_points / 2 + 1);
  const double base = 2.0 * M_PI / p.grid.period;
  for (std::size_t k = 0; k < m.size(); ++k) {
    double xi = base * static_cast<double>(k);
    m[k] = 1.0 / (1.0 + p.dt * (std::pow(xi, 2.0 * p.order.s) + p.eps_visc * xi * xi));
  }
  return m;
}

}  // namespace

std::vector<double> step(std::span<const double> state, double t, const Problem& p,
                         const RealFft& fft) {
  const Grid& g = p.grid;
  require(state.size() == g.n_points, Errc::invalid_argument, "state size mismatch");
  const std::size_t n = g.n_points;
  std::vector<double> rhs(n);
  const double inv_h = 1.0 / g.spacing;
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(state[i]), Errc::non_finite_input, "non-finite state (blow-up guard)");
    const double bv = p.drift(g.x(i), t);
    double adv;
    if (bv >= 0) {
      adv = bv * (state[i] - state[(i + n - 1) % n]) * inv_h;
    } else {
      adv = bv * (state[(i + 1) % n] - state[i]) * inv_h;
    }
    double fv = p.forcing ? p.forcing(g.x(i), t) : 0.0;
    rhs[i] = state[i] - p.dt * (adv - fv);
  }
  auto spec = fft.forward(rhs);
  auto mult = diffusion_multiplier(p);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= mult[k];
  return fft.inverse(spec);
}

Trajectory solve(const Problem& p) {
  p.validate();
  const Grid& g = p.grid;
  RealFft fft(g.n_points);
  const std::size_t n_steps = static_cast<std::size_t>(std::llround((p.t_end - p.t_start) / p.dt));
  require(n_steps >= 1, Errc::invalid_argument, "t_span shorter than one step");

  const double u0_sup = *std::max_element(p.u0.begin(), p.u0.end(),
                                          [](double a, double b) { return std::fabs(a) < std::fabs(b); });
  const double blow_up_guard = 1e6 * (std::fabs(u0_sup) + p.forcing_sup + 1e-30);

  std::vector<double> u = p.u0;
  std::vector<double> stored_times{p.t_start};
  std::vector<double> stored_vals(u);

  Trajectory traj{Field(g, {p.t_start}, p.u0), p, {}, {}, {}, {}, 0.0, 0.0};
  auto record_diag = [&](double t, std::span<const double> v) {
    double lo = v[0], hi = v[0], sum = 0.0;
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      sum += x;
    }
    traj.step_times.push_back(t);
    traj.sup_series.push_back(hi);
    traj.min_series.push_back(lo);
    traj.mean_series.push_back(sum / static_cast<double>(v.size()));
  };
  record_diag(p.t_start, u);

  const double dense_from = p.t_end - p.dense_window;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = p.t_start + static_cast<double>(k) * p.dt;
    u = step(u, t, p, fft);
    const double t_next = p.t_start + static_cast<double>(k + 1) * p.dt;

    double hi = *std::max_element(u.begin(), u.end());
    require(std::fabs(hi) < blow_up_guard && std::isfinite(hi), Errc::blow_up,
            "solution exceeded the blow-up guard");
    const double prev_sup = traj.sup_series.back();
    const double excess =
        (hi - prev_sup - p.dt * p.forcing_sup) / std::max(1.0, std::fabs(prev_sup));
    traj.max_principle_excess = std::max(traj.max_principle_excess, excess);
    record_diag(t_next, u);

    const bool dense = t_next >= dense_from - 1e-12;
    if (dense || (k + 1) % static_cast<std::size_t>(p.early_stride) == 0 || k + 1 == n_steps) {
      stored_times.push_back(t_next);
      stored_vals.insert(stored_vals.end(), u.begin(), u.end());
    }
  }

  const double a = p.drift.sup_norm();
  traj.cfl_margin = a > 0 ? g.spacing / (2.0 * a) - p.dt : std::numeric_limits<double>::infinity();
  traj.field = Field(g, std::move(stored_times), std::move(stored_vals));
  return traj;
}

std::vector<Trajectory> vanishing_viscosity_sweep(const Problem& p,
                                                  const std::vector<double>& eps_list) {
  require(!eps_list.empty(), Errc::invalid_argument, "eps list must be nonempty");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
    require(eps_list[i] > eps_list[i + 1], Errc::invalid_argument,
            "eps list must be strictly descending");
  std::vector<Trajectory> out;
  out.reserve(eps_list.size());
  for (double eps : eps_list) {
    Problem q = p;
    q.eps_visc = eps;
    out.push_back(solve(q));
  }
  return out;
}

}  // namespace fraclab
