#include "fraclab/drift.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "fraclab/rng.hpp"

namespace fraclab {

namespace {

struct FourierSum {
  std::vector<double> amps, freqs, phases;
  double eval(double x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < amps.size(); ++j)
      v += amps[j] * std::cos(freqs[j] * x + phases[j]);
    return v;
  }
};

double scan_max_abs(const FourierSum& f, double period, int n, double* argmax = nullptr) {
  double best = -1.0, bx = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = -0.5 * period + period * static_cast<double>(i) / n;
    double v = std::fabs(f.eval(x));
    if (v > best) {
      best = v;
      bx = x;
    }
  }
  // golden-section polish around the best sample
  double a = bx - period / n, b = bx + period / n;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 80; ++it) {
    if (std::fabs(f.eval(c)) > std::fabs(f.eval(d))) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  double xm = 0.5 * (a + b);
  if (std::fabs(f.eval(xm)) > best) {
    best = std::fabs(f.eval(xm));
    bx = xm;
  }
  if (argmax) *argmax = bx;
  return best;
}

// certified seminorm bound for a cosine sum: |b(y+d)-b(y)| <= sum_j a_j min(2, f_j d)
double certified_seminorm(const FourierSum& f, double gamma, double period) {
  double best = 0.0;
  const double dlo = 1e-9, dhi = 0.5 * period;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    double d = dlo * std::pow(dhi / dlo, static_cast<double>(i) / n);
    double s = 0.0;
    for (std::size_t j = 0; j < f.amps.size(); ++j)
      s += std::fabs(f.amps[j]) * std::min(2.0, f.freqs[j] * d);
    best = std::max(best, s / std::pow(d, gamma));
  }
  return best;
}

}  // namespace

DriftSpec DriftSpec::zero() {
  DriftSpec d;
  d.fn_ = [](double, double) { return 0.0; };
  d.sup_norm_ = 0.0;
  d.holder_seminorm_ = 0.0;
  d.divergence_free_ = true;
  d.kind_ = "zero";
  return d;
}

DriftSpec DriftSpec::constant(double value) {
  require(std::isfinite(value), Errc::non_finite_input, "constant drift must be finite");
  DriftSpec d;
  d.fn_ = [value](double, double) { return value; };
  d.sup_norm_ = std::fabs(value);
  d.holder_seminorm_ = 0.0;
  d.divergence_free_ = true;  // constants are the only divergence-free fields in 1-d
  d.kind_ = "constant";
  return d;
}

DriftSpec DriftSpec::rough_bounded(double period, double sup_norm, int n_modes, std::uint64_t seed) {
  require(period > 0 && sup_norm >= 0 && n_modes >= 1, Errc::invalid_argument,
          "rough_bounded: bad parameters");
  Rng rng(seed);
  auto sum = std::make_shared<FourierSum>();
  const double base = 2.0 * M_PI / period;
  for (int j = 1; j <= n_modes; ++j) {
    sum->freqs.push_back(base * j);
    sum->amps.push_back(rng.normal() / std::sqrt(static_cast<double>(j)));
    sum->phases.push_back(rng.uniform(0.0, 2.0 * M_PI));
  }
  double raw_max = scan_max_abs(*sum, period, 65536);
  // scale so the raw sum exceeds the target somewhere, then clip: the clip
  // is guaranteed active and the measured sup equals the target exactly
  double scale = raw_max > 0 ? 1.25 * sup_norm / raw_max : 0.0;
  for (double& a : sum->amps) a *= scale;
  DriftSpec d;
  d.fn_ = [sum, sup_norm](double x, double) {
    return std::clamp(sum->eval(x), -sup_norm, sup_norm);
  };
  d.sup_norm_ = sup_norm;
  d.kind_ = "rough_bounded";
  return d;
}

DriftSpec DriftSpec::holder_weierstrass(double period, double sup_norm, double gamma, int octaves,
                                        std::uint64_t seed) {
  require(period > 0 && sup_norm > 0 && gamma > 0 && gamma < 1 && octaves >= 2,
          Errc::invalid_argument, "holder_weierstrass: bad parameters");
  Rng rng(seed);
  auto sum = std::make_shared<FourierSum>();
  const double base = 2.0 * M_PI / period;
  for (int j = 0; j < octaves; ++j) {
    // frequencies 2^j, snapped to the torus lattice so b is exactly periodic
    double f = std::pow(2.0, j);
    double k = std::max(1.0, std::round(f / base));
    sum->freqs.push_back(base * k);
    sum->amps.push_back(std::pow(base * k, -gamma));
    sum->phases.push_back(rng.uniform(0.0, 2.0 * M_PI));
  }
  double xstar = 0.0;
  double raw_max = scan_max_abs(*sum, period, 2000000, &xstar);
  double scale = sup_norm / raw_max;
  for (double& a : sum->amps) a *= scale;
  for (std::size_t j = 0; j < sum->phases.size(); ++j)
    sum->phases[j] += sum->freqs[j] * xstar;  // translate the argmax to x = 0
  DriftSpec d;
  d.fn_ = [sum](double x, double) { return sum->eval(x); };
  d.sup_norm_ = sup_norm;
  d.holder_seminorm_ = certified_seminorm(*sum, gamma, period);
  d.gamma_ = gamma;
  d.kind_ = "holder";
  return d;
}

DriftSpec DriftSpec::custom(Fn f, double sup_norm, std::optional<double> holder_seminorm,
                            std::string kind, bool divergence_free) {
  DriftSpec d;
  d.fn_ = std::move(f);
  d.sup_norm_ = sup_norm;
  d.holder_seminorm_ = holder_seminorm;
  d.divergence_free_ = divergence_free;
  d.kind_ = std::move(kind);
  return d;
}

double measure_sup_norm(const DriftSpec& b, double period, int n_samples, double t) {
  double best = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    double x = -0.5 * period + period * static_cast<double>(i) / n_samples;
    best = std::max(best, std::fabs(b(x, t)));
  }
  return best;
}

double measure_holder_seminorm(const DriftSpec& b, double period, double gamma, int n_base,
                               int n_seps, double t) {
  double best = 0.0;
  const double dlo = period * 1e-7, dhi = 0.5 * period;
  for (int k = 0; k < n_seps; ++k) {
    double d = dlo * std::pow(dhi / dlo, static_cast<double>(k) / (n_seps - 1));
    double dg = std::pow(d, gamma);
    for (int i = 0; i < n_base; ++i) {
      double y = -0.5 * period + period * static_cast<double>(i) / n_base;
      best = std::max(best, std::fabs(b(y + d, t) - b(y, t)) / dg);
    }
  }
  return best;
}

}  // namespace fraclab
