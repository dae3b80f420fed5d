#ifndef FRACLAB_BARRIER_HPP
#define FRACLAB_BARRIER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/fracops.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// The comparison objects of the point-estimate lemma: a smooth nonincreasing
// bump beta (1 below 1, 0 above 2), the shrinking cutoff
// eta(x,t) = beta(|x| + A t), the memory function m(t) driven by the good-set
// measure, and the constants (c0, C1, eps0, theta, beta1).
// ---------------------------------------------------------------------------

// beta(z) = 1 for z <= 1, 0 for z >= 2; on (1,2) a mollifier-style step
// exp(1 - 1/(1 - q^2)) precomposed with a quintic smoothstep q(z-1) so both
// junctions have two continuous derivatives.
struct BumpProfile {
  std::string id = "mollifier-quintic-v1";
  double operator()(double z) const;
  static BumpProfile standard() { return {}; }
};

struct BarrierKit {
  BumpProfile bump;
  double speed_A = 0.0;  // drift bound; eta's support shrinks at this speed
  double mu = 0.0;       // good-set mass hypothesis, in (0, |B1 x [-2,-1]|]
  double c0 = 0.0;
  double C1 = 0.0;
  double eps0 = 0.0;
  double theta = 0.0;  // = c0 exp(-2 C1) mu / 2, checked at construction
  double beta1 = 0.0;
  std::uint64_t battery_hash = 0;  // identity of the calibration battery

  static BarrierKit make(BumpProfile bump, double speed_A, double mu, double c0, double C1,
                         double eps0, double beta1, std::uint64_t battery_hash = 0);
};

double eta(double x, double t, const BarrierKit& kit);

// |{x in B1 : u(x,t) <= 0}| per stored time, grid-cell counting times h
struct MeasureSeries {
  std::vector<double> times;
  std::vector<double> values;
};

MeasureSeries good_set_measure(const Field& u);

// m(t) = int_{-2}^{t} c0 measure(s) e^{-C1 (t-s)} ds on the series' time
// grid (trapezoid; exact telescoping of the exponential between stamps)
std::vector<double> solve_m(const MeasureSeries& measure, double c0, double C1);

// largest dyadic level b* with (-lap)^s eta <= 0 wherever eta <= b*, scanned
// over x >= 0 (eta is even) and t in {-2,-1.5,-1,-0.5,0}. scan_refine
// multiplies the x-resolution (used by the certificate re-verification).
double find_beta1(const BumpProfile& bump, double speed_A, FractionalOrder s,
                  const QuadratureScheme& q, int scan_refine = 1);

// ---------------------------------------------------------------------------
// Lemma verification on trajectories
// ---------------------------------------------------------------------------

struct HypothesisReport {
  bool ok = true;
  std::string violated;        // empty when ok
  double max_u_global = 0.0;   // sup of u over the sampled window
  double mu_measured = 0.0;    // good-set mass over B1 x [-2,-1]
  double residual_measured = 0.0;  // sup of u_t - A|u_x| + (-lap)^s u - eps u_xx on B_R
  double residual_allowed = 0.0;   // eps0 + discretization tolerance
};

struct GapReport {
  HypothesisReport hypotheses;
  double gap = 0.0;  // min over B1 x [-1,0] of barrier - u
  double arg_x = 0.0;
  double arg_t = 0.0;
};

struct PointEstimateVerdict {
  HypothesisReport hypotheses;
  double theta_required = 0.0;
  double max_u_on_q = 0.0;  // max of u over B1 x [-1,0]
  bool pass = false;
};

// discretization allowance for the measured inequality residual; the
// hypothesis itself holds exactly for exact solutions with |b| <= A and
// ||f|| <= eps0, the allowance only absorbs the O(dt) consistency error
constexpr double kResidualTolerance = 2e-2;

GapReport supersolution_gap(const Trajectory& u, const BarrierKit& kit,
                            double residual_tolerance = kResidualTolerance);

PointEstimateVerdict verify_point_estimate(const Trajectory& u, const BarrierKit& kit,
                                           double residual_tolerance = kResidualTolerance);

// ---------------------------------------------------------------------------
// Empirical constant extraction. The battery is a fixed seeded family of
// solver runs whose hypotheses (u <= 1 with headroom, drift bound A, forcing
// bound eps0, good-set mass >= mu) are met by construction and re-measured;
// the search keeps the feasible cell with the largest theta.
// ---------------------------------------------------------------------------

struct BatteryParams {
  FractionalOrder order;
  double speed_A = 1.0;
  double eps0 = 0.1;
  Grid grid;
  double dt = 2e-3;
  std::uint64_t seed_base = 1000;
};

// deterministic battery member: seeded well-shaped initial data, drift
// cycling through {0, +A, -A, rough}, forcing through {0, +eps0, eps0 cos}
Problem battery_problem(const BatteryParams& params, int index);

struct SearchOptions {
  int battery_size = 8;
  std::vector<double> eps0_grid = {0.1, 0.05, 0.02, 0.01};
  std::vector<double> c1_grid = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
  int c0_levels = 4;            // c0 = c0_max(C1) 2^{-j}
  double theta_floor = 1e-4;
  double pass_margin = 1.5;     // battery must clear 1 - margin*theta
  Grid grid;
  double dt = 2e-3;
  std::uint64_t seed_base = 1000;
};

BarrierKit search_constants(FractionalOrder s, double speed_A, double mu,
                            const BumpProfile& bump, const QuadratureScheme& q,
                            const SearchOptions& opt);

}  // namespace fraclab

#endif
