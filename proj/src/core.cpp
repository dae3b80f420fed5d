#include "fraclab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclab {

FractionalOrder FractionalOrder::of(double s) {
  require(std::isfinite(s) && s > 0.0 && s < 1.0, Errc::invalid_argument,
          "fractional order must lie in (0,1)");
  Regime r = s < 0.5 ? Regime::supercritical : (s > 0.5 ? Regime::subcritical : Regime::critical);
  return FractionalOrder{s, r};
}

Grid Grid::make(double period, std::size_t n_points) {
  require(std::isfinite(period) && period > 0.0, Errc::invalid_argument, "grid period must be > 0");
  require(n_points >= 2 && (n_points & (n_points - 1)) == 0, Errc::invalid_argument,
          "n_points must be a power of two");
  return Grid{period, n_points, period / static_cast<double>(n_points)};
}

Field::Field(Grid grid, std::vector<double> times, std::vector<double> values)
    : grid_(grid), times_(std::move(times)), values_(std::move(values)) {
  require(!times_.empty(), Errc::invalid_argument, "field needs at least one time stamp");
  require(values_.size() == times_.size() * grid_.n_points, Errc::invalid_argument,
          "field values size must be n_times * n_points");
  for (std::size_t j = 1; j < times_.size(); ++j)
    require(times_[j] > times_[j - 1], Errc::invalid_argument, "time stamps must be strictly increasing");
  for (double v : values_)
    require(std::isfinite(v), Errc::non_finite_input, "field values must be finite");
}

std::span<const double> Field::level(std::size_t j) const {
  require(j < times_.size(), Errc::invalid_argument, "level index out of range");
  return {values_.data() + j * grid_.n_points, grid_.n_points};
}

double periodic_cubic_interp(std::span<const double> vals, double period, double x) {
  const std::size_t n = vals.size();
  const double h = period / static_cast<double>(n);
  double s = (x + 0.5 * period) / h;
  double fl = std::floor(s);
  double t = s - fl;
  long i1 = static_cast<long>(fl);
  auto idx = [&](long i) {
    long m = i % static_cast<long>(n);
    if (m < 0) m += static_cast<long>(n);
    return static_cast<std::size_t>(m);
  };
  const double f0 = vals[idx(i1 - 1)];
  const double f1 = vals[idx(i1)];
  const double f2 = vals[idx(i1 + 1)];
  const double f3 = vals[idx(i1 + 2)];
  // Lagrange basis on nodes -1, 0, 1, 2
  const double l0 = -t * (t - 1.0) * (t - 2.0) / 6.0;
  const double l1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  const double l2 = -(t + 1.0) * t * (t - 2.0) / 2.0;
  const double l3 = (t + 1.0) * t * (t - 1.0) / 6.0;
  return l0 * f0 + l1 * f1 + l2 * f2 + l3 * f3;
}

namespace {
constexpr double kTimeSlack = 1e-9;
}

double Field::eval_at_level(std::size_t j, double x) const {
  return periodic_cubic_interp(level(j), grid_.period, x);
}

double Field::eval(double x, double t) const {
  require(t >= times_.front() - kTimeSlack && t <= times_.back() + kTimeSlack,
          Errc::domain_exceeded, "field eval: time outside sampled range");
  if (times_.size() == 1) return eval_at_level(0, x);
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  if (hi == 0) hi = 1;
  if (hi == times_.size()) hi = times_.size() - 1;
  std::size_t lo = hi - 1;
  double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  w = std::clamp(w, 0.0, 1.0);
  return (1.0 - w) * eval_at_level(lo, x) + w * eval_at_level(hi, x);
}

double Field::sup_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

double Field::max_value() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

Field Field::with_shifted_times(double delta) const {
  std::vector<double> t2(times_);
  for (double& t : t2) t += delta;
  return Field(grid_, std::move(t2), values_);
}

Field Field::scaled_values(double factor) const {
  std::vector<double> v2(values_);
  for (double& v : v2) v *= factor;
  return Field(grid_, times_, std::move(v2));
}

Cylinder Cylinder::make(double x0, double t0, double r, FractionalOrder s) {
  require(std::isfinite(x0) && std::isfinite(t0), Errc::invalid_argument, "cylinder center must be finite");
  require(std::isfinite(r) && r > 0.0, Errc::invalid_argument, "cylinder radius must be > 0");
  return Cylinder{x0, t0, r, s};
}

ScalingParams ScalingParams::of(double lambda, double alpha, FractionalOrder s) {
  require(std::isfinite(lambda) && lambda > 0.0, Errc::invalid_argument, "lambda must be > 0");
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 2.0 * s.s + 1e-15, Errc::invalid_argument,
          "alpha must lie in (0, 2s]");
  return ScalingParams{lambda, alpha, s};
}

namespace {

struct TimeWindow {
  std::size_t lo, hi;  // inclusive level range
};

TimeWindow locate_levels(const Field& u, double t_lo, double t_hi) {
  const auto& ts = u.times();
  require(t_lo >= ts.front() - kTimeSlack && t_hi <= ts.back() + kTimeSlack,
          Errc::cylinder_out_of_range, "cylinder time extent exceeds sampled range");
  auto lo_it = std::lower_bound(ts.begin(), ts.end(), t_lo - kTimeSlack);
  auto hi_it = std::upper_bound(ts.begin(), ts.end(), t_hi + kTimeSlack);
  std::size_t lo = static_cast<std::size_t>(lo_it - ts.begin());
  std::size_t hi = static_cast<std::size_t>(hi_it - ts.begin());
  require(hi > lo, Errc::empty_cylinder, "no stored time level inside cylinder");
  return {lo, hi - 1};
}

}  // namespace

double oscillation(const Field& u, const Cylinder& q, OscillationMode mode) {
  const Grid& g = u.grid();
  require(2.0 * q.radius < g.period, Errc::cylinder_out_of_range,
          "cylinder wider than the torus");
  const double t_lo = q.t_lo();
  const double t_hi = q.t_hi();

  if (mode == OscillationMode::grid_samples) {
    TimeWindow w = locate_levels(u, t_lo, t_hi);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    bool any = false;
    for (std::size_t j = w.lo; j <= w.hi; ++j) {
      auto row = u.level(j);
      for (std::size_t i = 0; i < g.n_points; ++i) {
        if (g.dist(g.x(i), q.center_x) <= q.radius + 1e-12) {
          any = true;
          lo = std::min(lo, row[i]);
          hi = std::max(hi, row[i]);
        }
      }
    }
    require(any, Errc::empty_cylinder, "no grid sample inside cylinder");
    return hi - lo;
  }

  // interpolated: fixed dense lattice, cubic in x and linear in t
  require(t_lo >= u.t_lo() - kTimeSlack && t_hi <= u.t_hi() + kTimeSlack,
          Errc::cylinder_out_of_range, "cylinder time extent exceeds sampled range");
  constexpr int kNx = 65;
  constexpr int kNt = 17;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int jt = 0; jt < kNt; ++jt) {
    double t = t_lo + (t_hi - t_lo) * static_cast<double>(jt) / (kNt - 1);
    t = std::clamp(t, u.t_lo(), u.t_hi());
    for (int jx = 0; jx < kNx; ++jx) {
      double x = q.center_x - q.radius + 2.0 * q.radius * static_cast<double>(jx) / (kNx - 1);
      double v = u.eval(x, t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  // include stored samples inside the cylinder so the interpolated estimate
  // never undercuts the grid one on resolved cylinders
  TimeWindow w{0, 0};
  bool have_levels = true;
  try {
    w = locate_levels(u, t_lo, t_hi);
  } catch (const Error&) {
    have_levels = false;
  }
  if (have_levels) {
    for (std::size_t j = w.lo; j <= w.hi; ++j) {
      auto row = u.level(j);
      for (std::size_t i = 0; i < g.n_points; ++i) {
        if (g.dist(g.x(i), q.center_x) <= q.radius + 1e-12) {
          lo = std::min(lo, row[i]);
          hi = std::max(hi, row[i]);
        }
      }
    }
  }
  return hi - lo;
}

Field rescale(const Field& u, const ScalingParams& p, const Grid& out_grid,
              const std::vector<double>& out_times) {
  require(!out_times.empty(), Errc::invalid_argument, "rescale needs output times");
  const Grid& g = u.grid();
  // lambda * L_out must be a whole number of input periods; otherwise the
  // output samples do not describe an L_out-periodic function.
  const double m = p.lambda * out_grid.period / g.period;
  require(std::fabs(m - std::round(m)) < 1e-9 && std::round(m) >= 1.0, Errc::grid_incompatible,
          "rescale: lambda * output period must be a multiple of the input period");
  const double ts = std::pow(p.lambda, 2.0 * p.order.s);
  for (double t : out_times) {
    double tin = ts * t;
    require(tin >= u.t_lo() - kTimeSlack && tin <= u.t_hi() + kTimeSlack, Errc::domain_exceeded,
            "rescale: requested time maps outside the sampled range");
  }
  const double amp = std::pow(p.lambda, -p.alpha);
  std::vector<double> vals(out_times.size() * out_grid.n_points);
  for (std::size_t j = 0; j < out_times.size(); ++j) {
    double tin = std::clamp(ts * out_times[j], u.t_lo(), u.t_hi());
    for (std::size_t i = 0; i < out_grid.n_points; ++i) {
      double xin = g.wrap(p.lambda * out_grid.x(i));
      vals[j * out_grid.n_points + i] = amp * u.eval(xin, tin);
    }
  }
  std::vector<double> t2(out_times);
  return Field(out_grid, std::move(t2), std::move(vals));
}

std::vector<double> rescaled_time_range(const Field& u, const ScalingParams& p,
                                        std::size_t n_times) {
  require(n_times >= 2, Errc::invalid_argument, "need at least two output times");
  const double ts = std::pow(p.lambda, 2.0 * p.order.s);
  const double lo = u.t_lo() / ts;
  const double hi = u.t_hi() / ts;
  std::vector<double> out(n_times);
  for (std::size_t j = 0; j < n_times; ++j)
    out[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n_times - 1);
  return out;
}

double effective_radius(FractionalOrder s, double sup_norm_b) {
  require(std::isfinite(sup_norm_b) && sup_norm_b >= 0.0, Errc::invalid_argument,
          "drift sup norm must be >= 0");
  if (s.s >= 0.5) return 2.0 + sup_norm_b;
  // R = A R^{1-2s} + 2 has a unique fixed point >= 2; the iteration from
  // R = 2 is monotone increasing and contracts near the fixed point.
  double r = 2.0;
  for (int it = 0; it < 200; ++it) {
    double next = sup_norm_b * std::pow(r, 1.0 - 2.0 * s.s) + 2.0;
    if (std::fabs(next - r) <= 1e-12 * next) return next;
    r = next;
  }
  return r;
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::non_finite_input: return "non-finite-input";
    case Errc::cylinder_out_of_range: return "cylinder-out-of-range";
    case Errc::empty_cylinder: return "empty-cylinder";
    case Errc::under_resolved: return "under-resolved";
    case Errc::domain_exceeded: return "domain-exceeded";
    case Errc::grid_incompatible: return "grid-incompatible";
    case Errc::tail_undeclared: return "tail-undeclared";
    case Errc::tail_divergent: return "tail-divergent";
    case Errc::calibration_failed: return "calibration-failed";
    case Errc::cfl_violation: return "cfl-violation";
    case Errc::blow_up: return "blow-up";
    case Errc::insufficient_time_levels: return "insufficient-time-levels";
    case Errc::no_valid_level: return "no-valid-level";
    case Errc::envelope_violated: return "envelope-violated";
    case Errc::search_exhausted: return "search-exhausted";
    case Errc::degenerate_input: return "degenerate-input";
    case Errc::hypothesis_violated: return "hypothesis-violated";
    case Errc::config_invalid: return "config-invalid";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

}  // namespace fraclab
