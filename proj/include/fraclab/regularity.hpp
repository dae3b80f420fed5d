#ifndef FRACLAB_REGULARITY_HPP
#define FRACLAB_REGULARITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "fraclab/barrier.hpp"
#include "fraclab/flowmap.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

// ---------------------------------------------------------------------------
// Oscillation decay across nested parabolic cylinders and the Hoelder fit.
// ---------------------------------------------------------------------------

struct DecaySequence {
  double ratio = 0.5;                // r in (0,1)
  std::vector<double> oscillations;  // osc over Q_{r^k}, k = 0..K
  double anchor_x = 0.0;
  double anchor_t = 0.0;
};

struct FitResult {
  double alpha_hat = 0.0;
  double C_hat = 0.0;
  bool clamped = false;   // raw slope fell outside (0, 2s]
  bool all_zero = false;  // degenerate exact fit (constant field)
};

struct NormalizeResult {
  Field field;
  bool degenerate = false;
  double denom = 0.0;
  double effective_forcing_sup = 0.0;  // ||f|| / denom, <= eps0 by construction
};

// v = u / (2||u|| + ||f||/eps0); oscillation of v over the whole domain <= 1
NormalizeResult normalize(const Field& u, double f_sup, double eps0);

// oscillations over Q_{r^k} anchored at (x0, t0). grid_samples mode enforces
// the 8-sample / 4-level floor (under-resolved otherwise); interpolated mode
// keeps measuring through the stored-grid scale via cubic/linear evaluation.
DecaySequence decay_sequence(const Field& u, double anchor_x, double anchor_t, double ratio,
                             int levels, FractionalOrder s,
                             OscillationMode mode = OscillationMode::grid_samples);

// least squares of log osc_k against k log r, slope clamped into (0, 2s]
FitResult fit_alpha(const DecaySequence& seq, FractionalOrder s);

// ---------------------------------------------------------------------------
// Diminish-of-oscillation verification (the lemma's hypotheses -> conclusion
// implication measured on a field anchored at (0,0), normalized upstream).
// ---------------------------------------------------------------------------

struct DiminishVerdict {
  bool hypotheses_ok = true;
  std::string violated;
  double f_sup = 0.0;
  double osc_q1 = 0.0;
  double worst_tail_ratio = 0.0;  // max over M of osc_{B_M x [-1,0]} / (M/r)^alpha
  double tail_witness_m = 0.0;
  double tail_cap_m = 0.0;        // largest M the torus can check
  double r = 0.0;                 // 1/(2R)
  double rescaled_drift_bound = 0.0;  // (2R)^{1-2s} ||b||
  double theta = 0.0;
  double osc_qr = 0.0;
  bool pass = false;
};

DiminishVerdict check_diminish(const Field& u, const DriftSpec& b, double f_sup,
                               FractionalOrder s, const BarrierKit& kit, double alpha,
                               OscillationMode mode = OscillationMode::interpolated,
                               double anchor_x = 0.0);

// ---------------------------------------------------------------------------
// The oscillation-decay iteration: per level k the field is examined at
// scale r^k (equivalently, the parabolic rescaling w_k = r^{-alpha k}
// v(r^k x, r^{2sk} t) is examined at scale one). Supercritical runs gauge
// the field and the drift along the flow first; the recorded per-level
// drift bounds document why (bounded when gauged, growing like r^{k(2s-1)}
// when not).
// ---------------------------------------------------------------------------

struct LevelRecord {
  int k = 0;
  double scale = 1.0;          // r^k
  double drift_bound = 0.0;    // sup of the rescaled drift on |x| <= 1
  bool speed_ok = true;        // kit speed covers (2R)^{1-2s} * drift_bound
  double osc = 0.0;            // osc over Q_{r^k}
  bool hypothesis_ok = true;   // induction bound osc <= r^{alpha k}
  bool conclusion_ok = true;   // osc over Q_{r^{k+1}} <= (1-theta) r^{alpha k}
};

struct IterationResult {
  DecaySequence seq;
  std::vector<LevelRecord> levels;
  double alpha_used = 0.0;  // min(2s, log(1-theta)/log r)
  bool gauged = false;
  double gauge_envelope = 0.0;  // measured sup |bt|/|x|^{1-2s} (supercritical)
};

struct IterateOptions {
  double ratio = 0.0;  // 0 -> derive r = 1/(2R) from the drift bound
  int levels = 4;
  double anchor_x = 0.0;
  OscillationMode mode = OscillationMode::interpolated;
  bool skip_gauge = false;  // diagnostic: measure the raw drift even for s < 1/2
};

IterationResult iterate_oscillation(const Trajectory& traj, const DriftSpec& b, double f_sup,
                                    FractionalOrder s, const BarrierKit& kit,
                                    const FlowPath* flow, const IterateOptions& opt);

// ---------------------------------------------------------------------------
// Final check of the main estimate
//   |u(x,t)-u(y,r)| <= C (|x-y|^a + |t-r|^{a/2s}) / t^{a/2s} (||u||+||f||)
// over seeded low-discrepancy pairs with 0 <= r <= t <= 1, x,y in B_{1/2}.
// ---------------------------------------------------------------------------

struct RegularityReport {
  double alpha_hat = 0.0;
  double C_hat = 0.0;
  bool theorem_pass = false;
  double stability = 0.0;  // relative growth of C_hat when doubling the budget
  double worst_x = 0.0, worst_t = 0.0, worst_y = 0.0, worst_r = 0.0;
};

RegularityReport theorem_check(const Field& u, double f_sup, double alpha_hat, FractionalOrder s,
                               int pair_budget, double anchor_x = 0.0);

}  // namespace fraclab

#endif
