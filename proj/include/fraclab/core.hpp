#ifndef FRACLAB_CORE_HPP
#define FRACLAB_CORE_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fraclab/errors.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

enum class Regime { supercritical, critical, subcritical };

// Order s of the diffusion (-lap)^s, s in (0,1). The regime records whether
// advection dominates (s < 1/2), balances (s = 1/2) or is dominated by
// diffusion (s > 1/2).
struct FractionalOrder {
  double s;
  Regime regime;

  static FractionalOrder of(double s);
  bool supercritical() const { return regime == Regime::supercritical; }
};

// Uniform periodic grid with nodes x_i = -L/2 + i*h, i = 0..n-1. The whole
// line is modeled by a large torus; n is kept a power of two for the
// transforms.
struct Grid {
  double period = 0.0;
  std::size_t n_points = 0;
  double spacing = 0.0;

  static Grid make(double period, std::size_t n_points);
  double x(std::size_t i) const { return -0.5 * period + spacing * static_cast<double>(i); }
  // wrap into [-L/2, L/2)
  double wrap(double x) const {
    double y = std::fmod(x + 0.5 * period, period);
    if (y < 0) y += period;
    return y - 0.5 * period;
  }
  // periodic distance
  double dist(double a, double b) const { return std::fabs(wrap(a - b)); }
  bool operator==(const Grid& o) const {
    return period == o.period && n_points == o.n_points;
  }
};

// A space-time sampled scalar function: one row of grid samples per stored
// time stamp, times strictly increasing. Evaluation between samples uses
// periodic cubic (Lagrange, 4-point) interpolation in space and linear
// interpolation in time.
class Field {
 public:
  Field(Grid grid, std::vector<double> times, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t n_times() const { return times_.size(); }
  double t_lo() const { return times_.front(); }
  double t_hi() const { return times_.back(); }

  std::span<const double> level(std::size_t j) const;
  double at(std::size_t j, std::size_t i) const { return values_[j * grid_.n_points + i]; }

  // cubic in x (periodic), linear in t; t must lie in [t_lo, t_hi] up to slack
  double eval(double x, double t) const;
  double eval_at_level(std::size_t j, double x) const;

  double sup_abs() const;
  double max_value() const;
  double min_value() const;

  Field with_shifted_times(double delta) const;
  Field scaled_values(double factor) const;

  const std::vector<double>& raw_values() const { return values_; }

 private:
  Grid grid_;
  std::vector<double> times_;
  std::vector<double> values_;  // row-major, time x space
};

// Parabolic cylinder Q_r anchored at (x0, t0): spatial extent [x0-r, x0+r],
// temporal extent [t0 - r^{2s}, t0].
struct Cylinder {
  double center_x = 0.0;
  double center_t = 0.0;
  double radius = 0.0;
  FractionalOrder order;

  static Cylinder make(double x0, double t0, double r, FractionalOrder s);
  double depth() const { return std::pow(radius, 2.0 * order.s); }
  double t_lo() const { return center_t - depth(); }
  double t_hi() const { return center_t; }
  Cylinder scaled_by(double lambda) const { return make(center_x, center_t, lambda * radius, order); }
};

struct ScalingParams {
  double lambda = 1.0;
  double alpha = 1.0;
  FractionalOrder order;

  static ScalingParams of(double lambda, double alpha, FractionalOrder s);
};

// ---------------------------------------------------------------------------
// Interpolation helpers (shared by rescale, gauge transform, analysis)
// ---------------------------------------------------------------------------

// 4-point Lagrange cubic on a uniform periodic grid.
double periodic_cubic_interp(std::span<const double> vals, double period, double x);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

enum class OscillationMode {
  grid_samples,   // max - min over stored samples inside Q (the basic estimator)
  interpolated,   // dense virtual sampling via cubic/linear interpolation,
                  // needed for cylinders finer than the stored grid
};

// max - min of u over the cylinder. grid_samples mode requires at least one
// sample in the cylinder; interpolated mode samples a fixed dense lattice.
double oscillation(const Field& u, const Cylinder& q,
                   OscillationMode mode = OscillationMode::grid_samples);

// u^lambda(x,t) = lambda^{-alpha} u(lambda x, lambda^{2s} t), sampled on
// out_grid at out_times. Spatial wrap is legitimate only when the output
// period maps onto a whole number of input periods (lambda * L_out = m * L),
// otherwise the output would carry a seam; grid_incompatible is raised.
Field rescale(const Field& u, const ScalingParams& p, const Grid& out_grid,
              const std::vector<double>& out_times);

// output times for rescale that stay inside u's sampled range
std::vector<double> rescaled_time_range(const Field& u, const ScalingParams& p,
                                        std::size_t n_times);

// R = 2 + A for s >= 1/2; the unique fixed point >= 2 of R -> A R^{1-2s} + 2
// for s < 1/2 (monotone iteration, relative tolerance 1e-12).
double effective_radius(FractionalOrder s, double sup_norm_b);

}  // namespace fraclab

#endif
