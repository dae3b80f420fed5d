#ifndef FRACLAB_DRIFT_HPP
#define FRACLAB_DRIFT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "fraclab/core.hpp"

namespace fraclab {

// Vector field b(x,t) (scalar in 1-d) with its declared norms. sup_norm is
// measured on a fine grid at construction; holder_seminorm, when present, is
// a valid upper bound for the C^gamma seminorm (certified analytically for
// the built-in families, so that measured difference quotients can never
// exceed it).
class DriftSpec {
 public:
  using Fn = std::function<double(double, double)>;

  static DriftSpec zero();
  static DriftSpec constant(double value);
  // band-limited random Fourier sum, clipped to the target sup norm
  static DriftSpec rough_bounded(double period, double sup_norm, int n_modes, std::uint64_t seed);
  // Weierstrass-type sum a_j = freq_j^{-gamma}, freq_j = 2^j, translated so
  // the global maximum of |b| sits at x = 0 and scaled to the target sup
  static DriftSpec holder_weierstrass(double period, double sup_norm, double gamma, int octaves,
                                      std::uint64_t seed);
  static DriftSpec custom(Fn f, double sup_norm, std::optional<double> holder_seminorm,
                          std::string kind = "custom", bool divergence_free = false);

  double operator()(double x, double t) const { return fn_(x, t); }

  double sup_norm() const { return sup_norm_; }
  const std::optional<double>& holder_seminorm() const { return holder_seminorm_; }
  bool divergence_free() const { return divergence_free_; }
  const std::string& kind() const { return kind_; }
  double holder_gamma() const { return gamma_; }

  bool is_zero() const { return kind_ == "zero"; }

 private:
  DriftSpec() = default;
  Fn fn_;
  double sup_norm_ = 0.0;
  std::optional<double> holder_seminorm_;
  double gamma_ = 0.0;
  bool divergence_free_ = false;
  std::string kind_;
};

// max |b| over n uniformly spaced points and the stored time
double measure_sup_norm(const DriftSpec& b, double period, int n_samples = 65536, double t = 0.0);

// sup over sampled pairs of |b(y+d,t)-b(y,t)| / d^gamma; a lower bound for
// the true seminorm that sharpens with the sampling
double measure_holder_seminorm(const DriftSpec& b, double period, double gamma,
                               int n_base = 8192, int n_seps = 96, double t = 0.0);

}  // namespace fraclab

#endif
