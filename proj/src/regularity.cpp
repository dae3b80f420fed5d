#include "fraclab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclab {

namespace {

// oscillation over the box B_M(x0) x [t_lo, t_hi] (time depth independent of
// the parabolic scaling; used by the tail hypothesis)
double box_oscillation(const Field& u, double x0, double radius, double t_lo, double t_hi,
                       OscillationMode mode) {
  const Grid& g = u.grid();
  require(2.0 * radius < g.period, Errc::cylinder_out_of_range, "box wider than the torus");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  if (mode == OscillationMode::grid_samples) {
    for (std::size_t j = 0; j < u.n_times(); ++j) {
      const double t = u.times()[j];
      if (t < t_lo - 1e-9 || t > t_hi + 1e-9) continue;
      auto row = u.level(j);
      for (std::size_t i = 0; i < g.n_points; ++i)
        if (g.dist(g.x(i), x0) <= radius + 1e-12) {
          lo = std::min(lo, row[i]);
          hi = std::max(hi, row[i]);
        }
    }
    require(hi >= lo, Errc::empty_cylinder, "no sample inside box");
    return hi - lo;
  }
  constexpr int kNx = 129, kNt = 17;
  for (int jt = 0; jt < kNt; ++jt) {
    double t = t_lo + (t_hi - t_lo) * static_cast<double>(jt) / (kNt - 1);
    t = std::clamp(t, u.t_lo(), u.t_hi());
    for (int jx = 0; jx < kNx; ++jx) {
      double x = x0 - radius + 2.0 * radius * static_cast<double>(jx) / (kNx - 1);
      double v = u.eval(x, t);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return hi - lo;
}

int grid_samples_in(const Field& u, const Cylinder& q) {
  const Grid& g = u.grid();
  int count = 0;
  for (std::size_t i = 0; i < g.n_points; ++i)
    if (g.dist(g.x(i), q.center_x) <= q.radius + 1e-12) ++count;
  return count;
}

int levels_in(const Field& u, double t_lo, double t_hi) {
  int count = 0;
  for (double t : u.times())
    if (t >= t_lo - 1e-9 && t <= t_hi + 1e-9) ++count;
  return count;
}

}  // namespace

NormalizeResult normalize(const Field& u, double f_sup, double eps0) {
  require(eps0 > 0, Errc::invalid_argument, "eps0 must be > 0");
  require(f_sup >= 0, Errc::invalid_argument, "forcing sup must be >= 0");
  const double sup = u.sup_abs();
  const double denom = 2.0 * sup + f_sup / eps0;
  if (denom == 0.0) {
    return NormalizeResult{u, true, 0.0, 0.0};
  }
  return NormalizeResult{u.scaled_values(1.0 / denom), false, denom, f_sup / denom};
}

DecaySequence decay_sequence(const Field& u, double anchor_x, double anchor_t, double ratio,
                             int levels, FractionalOrder s, OscillationMode mode) {
  require(ratio > 0 && ratio < 1, Errc::invalid_argument, "ratio must lie in (0,1)");
  require(levels >= 1, Errc::invalid_argument, "need at least one level");
  DecaySequence seq;
  seq.ratio = ratio;
  seq.anchor_x = anchor_x;
  seq.anchor_t = anchor_t;
  for (int k = 0; k <= levels; ++k) {
    Cylinder q = Cylinder::make(anchor_x, anchor_t, std::pow(ratio, k), s);
    if (mode == OscillationMode::grid_samples) {
      require(grid_samples_in(u, q) >= 8, Errc::under_resolved,
              "fewer than 8 spatial samples across the cylinder");
      require(levels_in(u, q.t_lo(), q.t_hi()) >= 4, Errc::under_resolved,
              "fewer than 4 stored time levels across the cylinder");
    }
    seq.oscillations.push_back(oscillation(u, q, mode));
  }
  return seq;
}

FitResult fit_alpha(const DecaySequence& seq, FractionalOrder s) {
  const double two_s = 2.0 * s.s;
  FitResult out;
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < seq.oscillations.size(); ++k) {
    const double o = seq.oscillations[k];
    require(o >= 0 && std::isfinite(o), Errc::invalid_argument, "oscillations must be finite, >= 0");
    if (o > 0) {
      xs.push_back(static_cast<double>(k) * std::log(seq.ratio));
      ys.push_back(std::log(o));
    }
  }
  if (xs.empty()) {
    out.alpha_hat = two_s;
    out.C_hat = 0.0;
    out.all_zero = true;
    return out;
  }
  require(xs.size() >= 3, Errc::invalid_argument, "need at least 3 nonzero oscillations");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  out.alpha_hat = slope;
  out.C_hat = std::exp(intercept);
  if (out.alpha_hat > two_s) {
    out.alpha_hat = two_s;
    out.clamped = true;
  } else if (out.alpha_hat <= 0.0) {
    out.alpha_hat = 1e-6;
    out.clamped = true;
  }
  return out;
}

namespace {

// measured hypotheses and conclusion of the diminish lemma for the field
// examined at scale lambda = r^k around the anchor; scale = 1 is the lemma
// itself. All oscillations are measured on the unscaled field; the
// equivalences are
//   osc_{Q_1} w_k          = r^{-alpha k} osc_{Q_{r^k}} v
//   osc_{B_M x [-1,0]} w_k = r^{-alpha k} osc over B_{M r^k} x [-r^{2sk}, 0]
//   osc_{Q_r} w_k          = r^{-alpha k} osc_{Q_{r^{k+1}}} v
DiminishVerdict diminish_at_scale(const Field& u, double drift_sup, double f_sup,
                                  FractionalOrder s, const BarrierKit& kit, double alpha,
                                  double anchor_x, double scale, double ind_bound,
                                  OscillationMode mode) {
  DiminishVerdict v;
  const double big_r = effective_radius(s, drift_sup);
  v.r = 1.0 / (2.0 * big_r);
  v.theta = kit.theta;
  v.rescaled_drift_bound = std::pow(2.0 * big_r, 1.0 - 2.0 * s.s) * drift_sup;
  v.f_sup = f_sup;
  if (f_sup > kit.eps0 + 1e-12) {
    v.hypotheses_ok = false;
    v.violated = "||f|| <= eps0";
  }

  const double depth = std::pow(scale, 2.0 * s.s);
  Cylinder q1 = Cylinder::make(anchor_x, 0.0, scale, s);
  v.osc_q1 = oscillation(u, q1, mode) / ind_bound;
  if (v.hypotheses_ok && v.osc_q1 > 1.0 + 1e-9) {
    v.hypotheses_ok = false;
    v.violated = "osc_{Q_1} <= 1";
  }

  // tail hypothesis osc_{B_M x [-1,0]} <= (M/r)^alpha for M > 1, capped by
  // the torus half-width
  v.tail_cap_m = 0.45 * u.grid().period / scale;
  double worst = 0.0, witness = 0.0;
  for (double m = 1.25; m <= v.tail_cap_m; m *= 1.6) {
    double o = box_oscillation(u, anchor_x, m * scale, -depth, 0.0, mode) / ind_bound;
    double ratio = o / std::pow(m / v.r, alpha);
    if (ratio > worst) {
      worst = ratio;
      witness = m;
    }
  }
  v.worst_tail_ratio = worst;
  v.tail_witness_m = witness;
  if (v.hypotheses_ok && worst > 1.0 + 1e-9) {
    v.hypotheses_ok = false;
    v.violated = "osc_{B_M x [-1,0]} <= (M/r)^alpha";
  }

  Cylinder qr = q1.scaled_by(v.r);
  v.osc_qr = oscillation(u, qr, mode) / ind_bound;
  v.pass = v.osc_qr <= 1.0 - kit.theta + 1e-12;
  return v;
}

}  // namespace

DiminishVerdict check_diminish(const Field& u, const DriftSpec& b, double f_sup,
                               FractionalOrder s, const BarrierKit& kit, double alpha,
                               OscillationMode mode, double anchor_x) {
  return diminish_at_scale(u, b.sup_norm(), f_sup, s, kit, alpha, anchor_x, 1.0, 1.0, mode);
}

IterationResult iterate_oscillation(const Trajectory& traj, const DriftSpec& b, double f_sup,
                                    FractionalOrder s, const BarrierKit& kit,
                                    const FlowPath* flow, const IterateOptions& opt) {
  IterationResult out;
  const Field* field = &traj.field;
  Field gauged_field = traj.field;
  DriftSpec drift = b;
  double drift_sup = b.sup_norm();

  const bool supercritical = s.supercritical();
  if (supercritical && !opt.skip_gauge) {
    require(flow != nullptr, Errc::invalid_argument,
            "supercritical iteration needs a flow path (or skip_gauge)");
    GaugedDrift gd = gauged_drift(b, *flow, s, traj.field.grid().period);
    gauged_field = gauge_transform(traj.field, *flow);
    field = &gauged_field;
    drift = gd.drift;
    out.gauged = true;
    out.gauge_envelope = gd.envelope_constant;
  }

  const double big_r = effective_radius(s, drift_sup);
  const double r = opt.ratio > 0 ? opt.ratio : 1.0 / (2.0 * big_r);
  out.alpha_used = std::min(2.0 * s.s, std::log(1.0 - kit.theta) / std::log(r));
  const double alpha = out.alpha_used;

  out.seq.ratio = r;
  out.seq.anchor_x = opt.anchor_x;
  out.seq.anchor_t = 0.0;

  const double gamma = 1.0 - 2.0 * s.s;
  for (int k = 0; k <= opt.levels; ++k) {
    const double lambda = std::pow(r, k);
    LevelRecord rec;
    rec.k = k;
    rec.scale = lambda;

    // sup of the rescaled drift lambda^{2s-1} b(lambda x, lambda^{2s} t) on
    // |x| <= 1, t in [-1, 0]
    const double coef = std::pow(lambda, 2.0 * s.s - 1.0);
    if (!supercritical) {
      rec.drift_bound = coef * drift_sup;
    } else {
      double sup = 0.0;
      const double depth = std::pow(lambda, 2.0 * s.s);
      for (int jt = 0; jt <= 8; ++jt) {
        double t = -depth + depth * static_cast<double>(jt) / 8.0;
        for (int jx = 0; jx <= 256; ++jx) {
          double x = -1.0 + 2.0 * static_cast<double>(jx) / 256.0;
          sup = std::max(sup, std::fabs(coef * drift(lambda * x, t)));
        }
      }
      rec.drift_bound = sup;
      (void)gamma;
    }
    rec.speed_ok =
        kit.speed_A + 1e-9 >= std::pow(2.0 * big_r, 1.0 - 2.0 * s.s) * rec.drift_bound;

    Cylinder q = Cylinder::make(opt.anchor_x, 0.0, lambda, s);
    if (opt.mode == OscillationMode::grid_samples) {
      if (grid_samples_in(*field, q) < 8 || levels_in(*field, q.t_lo(), q.t_hi()) < 4) {
        break;  // stops at under-resolution
      }
    }
    rec.osc = oscillation(*field, q, opt.mode);
    out.seq.oscillations.push_back(rec.osc);
    const double ind_bound = std::pow(r, alpha * k);
    rec.hypothesis_ok = rec.osc <= ind_bound + 1e-9;
    const double osc_next =
        oscillation(*field, Cylinder::make(opt.anchor_x, 0.0, lambda * r, s), opt.mode);
    rec.conclusion_ok = osc_next <= (1.0 - kit.theta) * ind_bound + 1e-9;
    out.levels.push_back(rec);
  }
  return out;
}

namespace {

double halton(int index, int base) {
  double f = 1.0, r = 0.0;
  int i = index;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}

}  // namespace

RegularityReport theorem_check(const Field& u, double f_sup, double alpha_hat, FractionalOrder s,
                               int pair_budget, double anchor_x) {
  require(pair_budget >= 16, Errc::invalid_argument, "pair budget too small");
  require(alpha_hat > 0 && alpha_hat <= 2.0 * s.s + 1e-12, Errc::invalid_argument,
          "alpha_hat must lie in (0, 2s]");
  require(u.t_lo() <= 1e-9 && u.t_hi() >= 1.0 - 1e-9, Errc::invalid_argument,
          "theorem_check expects a field covering [0, 1]");
  const double norm = u.sup_abs() + f_sup;
  RegularityReport rep;
  rep.alpha_hat = alpha_hat;
  if (norm == 0.0) {
    rep.C_hat = 0.0;
    rep.theorem_pass = true;
    return rep;
  }
  const double p = alpha_hat / (2.0 * s.s);
  double c1 = 0.0, c2 = 0.0;
  for (int i = 1; i <= 2 * pair_budget; ++i) {
    const double x = anchor_x - 0.5 + halton(i, 2);
    const double y = anchor_x - 0.5 + halton(i, 3);
    double t = halton(i, 5);
    if (t < 1e-3) t = 1e-3;  // the bound is vacuous as t -> 0 (weight blows up)
    const double rr = t * halton(i, 7);
    const double denom = (std::pow(std::fabs(x - y), alpha_hat) + std::pow(t - rr, p)) * norm;
    if (denom < 1e-14) continue;
    const double val = std::fabs(u.eval(x, t) - u.eval(y, rr)) * std::pow(t, p) / denom;
    if (val > c2) {
      c2 = val;
      rep.worst_x = x;
      rep.worst_t = t;
      rep.worst_y = y;
      rep.worst_r = rr;
    }
    if (i == pair_budget) c1 = c2;
  }
  rep.C_hat = c2;
  rep.stability = c1 > 0 ? (c2 - c1) / c1 : (c2 > 0 ? 1.0 : 0.0);
  rep.theorem_pass = std::isfinite(c2) && rep.stability <= 0.10;
  return rep;
}

}  // namespace fraclab
