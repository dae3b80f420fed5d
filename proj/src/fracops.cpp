#include "fraclab/fracops.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace fraclab {

namespace {

std::vector<double> multipliers(const Grid& g, FractionalOrder s) {
  std::vector<double> m(g.n_points / 2 + 1);
  const double base = 2.0 * M_PI / g.period;
  for (std::size_t k = 0; k < m.size(); ++k)
    m[k] = std::pow(base * static_cast<double>(k), 2.0 * s.s);
  m[0] = 0.0;
  return m;
}

void check_finite(std::span<const double> u) {
  for (double v : u)
    require(std::isfinite(v), Errc::non_finite_input, "non-finite input sample");
}

using Gauss = boost::math::quadrature::gauss<double, 24>;

template <class F>
double panel(const F& f, double a, double b) {
  return Gauss::integrate(f, a, b);
}

// geometric panels [a, 2a] from lo to hi
template <class F>
double graded_integral(const F& f, double lo, double hi) {
  double total = 0.0;
  double a = lo;
  while (a < hi) {
    double b = std::min(2.0 * a, hi);
    total += panel(f, a, b);
    a = b;
  }
  return total;
}

// sum_{m>=1} (y + mP)^{-1-2s}, direct to m=64, Euler-Maclaurin closure
double image_kernel_sum(double y, double P, double two_s) {
  constexpr int M = 64;
  double s = 0.0;
  for (int m = 1; m <= M; ++m) s += std::pow(y + m * P, -1.0 - two_s);
  const double z = y + (M + 1) * P;
  const double f0 = std::pow(z, -1.0 - two_s);
  const double f1 = -(1.0 + two_s) * P * std::pow(z, -2.0 - two_s);
  s += std::pow(z, -two_s) / (two_s * P) + 0.5 * f0 - f1 / 12.0;
  return s;
}

}  // namespace

TailSpec TailSpec::compact(double support_radius) {
  require(support_radius > 0, Errc::invalid_argument, "support radius must be > 0");
  TailSpec t;
  t.kind = Kind::compact_support;
  t.support_radius = support_radius;
  return t;
}

TailSpec TailSpec::periodic_tail(double period) {
  require(period > 0, Errc::invalid_argument, "period must be > 0");
  TailSpec t;
  t.kind = Kind::periodic;
  t.period = period;
  return t;
}

TailSpec TailSpec::power(double coeff, double exponent) {
  TailSpec t;
  t.kind = Kind::power_growth;
  t.growth_coeff = coeff;
  t.growth_exponent = exponent;
  return t;
}

std::vector<double> frac_lap_spectral(std::span<const double> u, const Grid& g, FractionalOrder s,
                                      const RealFft& fft) {
  require(u.size() == g.n_points, Errc::invalid_argument, "sample count must match the grid");
  check_finite(u);
  auto spec = fft.forward(u);
  auto m = multipliers(g, s);
  for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= m[k];
  return fft.inverse(spec);
}

std::vector<double> frac_lap_spectral(std::span<const double> u, const Grid& g, FractionalOrder s) {
  RealFft fft(g.n_points);
  return frac_lap_spectral(u, g, s, fft);
}

std::vector<double> spectral_derivative(std::span<const double> u, const Grid& g,
                                        const RealFft& fft) {
  auto spec = fft.forward(u);
  const double base = 2.0 * M_PI / g.period;
  for (std::size_t k = 0; k < spec.size(); ++k)
    spec[k] *= std::complex<double>(0.0, base * static_cast<double>(k));
  spec.back() = 0.0;  // Nyquist mode has no well-defined odd derivative
  return fft.inverse(spec);
}

std::vector<double> spectral_laplacian(std::span<const double> u, const Grid& g,
                                       const RealFft& fft) {
  auto spec = fft.forward(u);
  const double base = 2.0 * M_PI / g.period;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    double xi = base * static_cast<double>(k);
    spec[k] *= -xi * xi;
  }
  return fft.inverse(spec);
}

double frac_lap_integral(const PointFunction& u, double x, FractionalOrder s,
                         const QuadratureScheme& q) {
  require(u.tail.kind != TailSpec::Kind::undeclared, Errc::tail_undeclared,
          "tail behavior must be declared");
  const double two_s = 2.0 * s.s;
  if (u.tail.kind == TailSpec::Kind::power_growth)
    require(u.tail.growth_exponent < two_s, Errc::tail_divergent,
            "tail growth exponent must be < 2s");
  const double rho = q.inner_cutoff;
  require(rho > 0 && rho < q.outer_cutoff, Errc::invalid_argument,
          "need 0 < inner_cutoff < outer_cutoff");

  const double ux = u.f(x);
  require(std::isfinite(ux), Errc::non_finite_input, "function value not finite");
  auto neg_delta = [&](double y) { return 2.0 * ux - u.f(x + y) - u.f(x - y); };
  auto integrand = [&](double y) { return neg_delta(y) * std::pow(y, -1.0 - two_s); };

  // inner Taylor piece: -delta(y) ~ (-delta(rho)/rho^2) y^2 on [0, rho]
  double total = (neg_delta(rho) / (rho * rho)) * std::pow(rho, 2.0 - two_s) / (2.0 - two_s);

  switch (u.tail.kind) {
    case TailSpec::Kind::compact_support: {
      const double T = std::max(q.outer_cutoff, u.tail.support_radius + std::fabs(x) + 1.0);
      total += graded_integral(integrand, rho, T);
      total += 2.0 * ux * std::pow(T, -two_s) / two_s;
      break;
    }
    case TailSpec::Kind::periodic: {
      const double P = u.tail.period;
      total += graded_integral(integrand, rho, P);
      auto smooth = [&](double y) { return neg_delta(y) * image_kernel_sum(y, P, two_s); };
      const int n_panels = 32;
      for (int i = 0; i < n_panels; ++i)
        total += panel(smooth, P * i / n_panels, P * (i + 1) / n_panels);
      break;
    }
    case TailSpec::Kind::power_growth: {
      const double T = std::max(q.outer_cutoff, 4.0 * (std::fabs(x) + 1.0));
      total += graded_integral(integrand, rho, T);
      // beyond T use the declared asymptotic u(y) ~ coeff |y|^a:
      //   int_T^inf (2 u(x) - coeff((y+x)^a + (y-x)^a)) y^{-1-2s} dy
      total += 2.0 * ux * std::pow(T, -two_s) / two_s;
      const double a = u.tail.growth_exponent;
      const double cf = u.tail.growth_coeff;
      auto tail_fn = [&](double w) {
        // w = T/y in (0,1]
        double y = T / w;
        double v = std::pow(y + x, a) + std::pow(y - x, a);
        return cf * v * std::pow(y, -1.0 - two_s) * T / (w * w);
      };
      total -= graded_integral(tail_fn, 1e-8, 1.0);
      break;
    }
    default:
      raise(Errc::tail_undeclared, "unreachable");
  }
  return total;
}

double frac_lap_quadrature(const PointFunction& u, double x, FractionalOrder s,
                           const QuadratureScheme& q) {
  require(q.normalization > 0, Errc::calibration_failed,
          "scheme must be calibrated before use");
  return q.normalization * frac_lap_integral(u, x, s, q);
}

double calibrate_normalization(FractionalOrder s, QuadratureScheme& q) {
  PointFunction cosine{[](double x) { return std::cos(x); },
                       TailSpec::periodic_tail(2.0 * M_PI)};
  double raw = frac_lap_integral(cosine, 0.0, s, q);
  require(std::isfinite(raw) && raw > 0, Errc::calibration_failed,
          "uncalibrated integral of cos at 0 must be positive");
  q.normalization = 1.0 / raw;
  return q.normalization;
}

ExtremalBounds ExtremalBounds::of(double lo, double hi) {
  require(0 < lo && lo <= hi, Errc::invalid_argument, "need 0 < lambda <= Lambda");
  return ExtremalBounds{lo, hi};
}

ExtremalPair extremal_ops(std::span<const double> u, const Grid& g, const ExtremalBounds& bounds,
                          FractionalOrder s, const QuadratureScheme& q) {
  require(u.size() == g.n_points, Errc::invalid_argument, "sample count must match the grid");
  check_finite(u);
  const double two_s = 2.0 * s.s;
  const double P = g.period;
  std::vector<double> samples(u.begin(), u.end());
  auto ueval = [samples = std::move(samples), P](double x) {
    return periodic_cubic_interp(std::span<const double>(samples), P, x);
  };

  ExtremalPair out;
  out.m_plus.resize(g.n_points);
  out.m_minus.resize(g.n_points);
  const double rho = q.inner_cutoff;
  for (std::size_t i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    const double ux = u[i];
    auto delta = [&](double y) { return ueval(x + y) + ueval(x - y) - 2.0 * ux; };
    auto num_plus = [&](double y) {
      double d = delta(y);
      return d >= 0 ? bounds.lambda_high * d : bounds.lambda_low * d;
    };
    auto num_minus = [&](double y) {
      double d = delta(y);
      return d >= 0 ? bounds.lambda_low * d : bounds.lambda_high * d;
    };
    // inner Taylor: delta ~ (delta(rho)/rho^2) y^2, sign fixed on [0,rho]
    const double d2 = delta(rho) / (rho * rho);
    const double inner = std::pow(rho, 2.0 - two_s) / (2.0 - two_s);
    double mp = (d2 >= 0 ? bounds.lambda_high : bounds.lambda_low) * d2 * inner;
    double mm = (d2 >= 0 ? bounds.lambda_low : bounds.lambda_high) * d2 * inner;
    auto kern_plus = [&](double y) { return num_plus(y) * std::pow(y, -1.0 - two_s); };
    auto kern_minus = [&](double y) { return num_minus(y) * std::pow(y, -1.0 - two_s); };
    mp += graded_integral(kern_plus, rho, P);
    mm += graded_integral(kern_minus, rho, P);
    auto smooth_plus = [&](double y) { return num_plus(y) * image_kernel_sum(y, P, two_s); };
    auto smooth_minus = [&](double y) { return num_minus(y) * image_kernel_sum(y, P, two_s); };
    const int n_panels = 32;
    for (int k = 0; k < n_panels; ++k) {
      mp += panel(smooth_plus, P * k / n_panels, P * (k + 1) / n_panels);
      mm += panel(smooth_minus, P * k / n_panels, P * (k + 1) / n_panels);
    }
    // the integral over R doubles the (0,inf) half by symmetry of delta
    out.m_plus[i] = 2.0 * mp;
    out.m_minus[i] = 2.0 * mm;
  }
  return out;
}

Field equation_residual(const Field& u, const DriftSpec& b, const SpaceTimeFn& f,
                        FractionalOrder s, double eps_visc) {
  require(u.n_times() >= 3, Errc::insufficient_time_levels,
          "residual needs at least three time levels");
  const Grid& g = u.grid();
  RealFft fft(g.n_points);
  const auto& ts = u.times();
  std::vector<double> out_times(ts.begin() + 1, ts.end() - 1);
  std::vector<double> vals;
  vals.reserve(out_times.size() * g.n_points);
  for (std::size_t j = 1; j + 1 < ts.size(); ++j) {
    const double dm = ts[j] - ts[j - 1];
    const double dp = ts[j + 1] - ts[j];
    const double c_prev = -dp / (dm * (dm + dp));
    const double c_mid = (dp - dm) / (dm * dp);
    const double c_next = dm / (dp * (dm + dp));
    auto mid = u.level(j);
    auto dx = spectral_derivative(mid, g, fft);
    auto fl = frac_lap_spectral(mid, g, s, fft);
    std::vector<double> lap;
    if (eps_visc != 0.0) lap = spectral_laplacian(mid, g, fft);
    const double t = ts[j];
    for (std::size_t i = 0; i < g.n_points; ++i) {
      double ut = c_prev * u.at(j - 1, i) + c_mid * u.at(j, i) + c_next * u.at(j + 1, i);
      double r = ut + b(g.x(i), t) * dx[i] + fl[i] - (f ? f(g.x(i), t) : 0.0);
      if (eps_visc != 0.0) r -= eps_visc * lap[i];
      vals.push_back(r);
    }
  }
  return Field(g, std::move(out_times), std::move(vals));
}

}  // namespace fraclab
