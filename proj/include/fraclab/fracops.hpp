#ifndef FRACLAB_FRACOPS_HPP
#define FRACLAB_FRACOPS_HPP

#include <functional>
#include <span>
#include <vector>

#include "fraclab/core.hpp"
#include "fraclab/drift.hpp"
#include "fraclab/fft.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// Spectral backend: (-lap)^s as the Fourier multiplier |xi_k|^{2s} on the
// torus, xi_k = 2 pi k / L. Ground truth for the operator's normalization.
// ---------------------------------------------------------------------------

std::vector<double> frac_lap_spectral(std::span<const double> u, const Grid& g, FractionalOrder s,
                                      const RealFft& fft);
std::vector<double> frac_lap_spectral(std::span<const double> u, const Grid& g, FractionalOrder s);

std::vector<double> spectral_derivative(std::span<const double> u, const Grid& g, const RealFft& fft);
std::vector<double> spectral_laplacian(std::span<const double> u, const Grid& g, const RealFft& fft);

// ---------------------------------------------------------------------------
// Quadrature backend: the singular integral
//
//   (-lap)^s u(x) = c * I(x),   I(x) = int_0^inf (2u(x)-u(x+y)-u(x-y)) / y^{1+2s} dy
//
// Below the inner cutoff rho the integrand is replaced by its Taylor value
// (second difference at rho), contributing  -d2 * rho^{2-2s}/(2-2s).  The
// rest is integrated on geometrically graded Gauss panels.  Tails:
//   compact support S: beyond T >= S+|x| the integrand is exactly
//     2u(x) y^{-1-2s}, giving u(x) T^{-2s}/s;
//   periodic (period P): fold onto one period, I = int_0^P g(y) S(y) dy with
//     S(y) = y^{-1-2s} + sum_{m>=1} (y+mP)^{-1-2s}; the image sum is summed
//     directly to m = 64 and closed with Euler-Maclaurin;
//   power growth |u| ~ coeff |x|^a, a < 2s: the asymptotic form is
//     integrated exactly beyond the outer cutoff (w = T/y substitution).
// The normalization c is calibrated against the spectral multiplier,
// never transcribed.
// ---------------------------------------------------------------------------

struct TailSpec {
  enum class Kind { undeclared, compact_support, periodic, power_growth };
  Kind kind = Kind::undeclared;
  double support_radius = 0.0;
  double period = 0.0;
  double growth_coeff = 0.0;
  double growth_exponent = 0.0;

  static TailSpec compact(double support_radius);
  static TailSpec periodic_tail(double period);
  static TailSpec power(double coeff, double exponent);
};

struct PointFunction {
  std::function<double(double)> f;
  TailSpec tail;
};

struct QuadratureScheme {
  double inner_cutoff = 1e-6;   // rho
  double outer_cutoff = 64.0;   // T for compact/power tails
  double normalization = 0.0;   // c, set by calibrate_normalization
};

// un-normalized integral I(x); exposed for calibration studies
double frac_lap_integral(const PointFunction& u, double x, FractionalOrder s,
                         const QuadratureScheme& q);

// c * I(x); requires a calibrated scheme
double frac_lap_quadrature(const PointFunction& u, double x, FractionalOrder s,
                           const QuadratureScheme& q);

// sets q.normalization so that the quadrature of cos at 0 equals |1|^{2s} = 1
double calibrate_normalization(FractionalOrder s, QuadratureScheme& q);

// ---------------------------------------------------------------------------
// Extremal operators of order 2s (un-normalized, as the second-difference
// integrals): with delta(y) = u(x+y)+u(x-y)-2u(x),
//   M+ u(x) = int [ Lambda delta^+ - lambda delta^- ] / |y|^{1+2s} dy
//   M- u(x) = int [ lambda delta^+ - Lambda delta^- ] / |y|^{1+2s} dy
// For lambda = Lambda = 1 both equal -(2/c) (-lap)^s u.
// ---------------------------------------------------------------------------

struct ExtremalBounds {
  double lambda_low = 1.0;
  double lambda_high = 1.0;
  static ExtremalBounds of(double lo, double hi);
};

struct ExtremalPair {
  std::vector<double> m_plus, m_minus;
};

ExtremalPair extremal_ops(std::span<const double> u, const Grid& g, const ExtremalBounds& bounds,
                          FractionalOrder s, const QuadratureScheme& q);

// ---------------------------------------------------------------------------
// Equation residual u_t + b u_x + (-lap)^s u - eps u_xx - f on the interior
// stored levels (3-point nonuniform stencil in time, spectral in space).
// ---------------------------------------------------------------------------

using SpaceTimeFn = std::function<double(double, double)>;

Field equation_residual(const Field& u, const DriftSpec& b, const SpaceTimeFn& f,
                        FractionalOrder s, double eps_visc);

}  // namespace fraclab

#endif
