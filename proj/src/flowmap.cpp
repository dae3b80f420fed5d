#include "fraclab/flowmap.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace fraclab {

double FlowPath::at(double t) const {
  if (t <= times.front()) return positions.front();
  if (t >= times.back()) return positions.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times.begin());
  std::size_t lo = hi - 1;
  double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * positions[lo] + w * positions[hi];
}

FlowPath FlowPath::negated() const {
  FlowPath p = *this;
  for (double& a : p.positions) a = -a;
  return p;
}

FlowPath integrate_flow(const DriftSpec& b, double t_lo, double t_hi, double dt) {
  require(dt > 0, Errc::invalid_argument, "flow dt must be > 0");
  require(t_lo <= 0.0 && t_hi >= 0.0, Errc::invalid_argument,
          "flow span must contain the anchor t = 0");

  std::vector<double> fwd_t{0.0}, fwd_a{0.0};
  double t = 0.0, a = 0.0;
  while (t < t_hi - 1e-12) {
    double d = std::min(dt, t_hi - t);
    double v = b(a, t);
    require(std::isfinite(v), Errc::non_finite_input, "drift sample not finite");
    a += d * v;
    t += d;
    fwd_t.push_back(t);
    fwd_a.push_back(a);
  }
  std::vector<double> bwd_t, bwd_a;
  t = 0.0;
  a = 0.0;
  while (t > t_lo + 1e-12) {
    double d = std::min(dt, t - t_lo);
    double v = b(a, t);
    require(std::isfinite(v), Errc::non_finite_input, "drift sample not finite");
    a -= d * v;
    t -= d;
    bwd_t.push_back(t);
    bwd_a.push_back(a);
  }
  FlowPath path;
  path.times.assign(bwd_t.rbegin(), bwd_t.rend());
  path.positions.assign(bwd_a.rbegin(), bwd_a.rend());
  path.times.insert(path.times.end(), fwd_t.begin(), fwd_t.end());
  path.positions.insert(path.positions.end(), fwd_a.begin(), fwd_a.end());

  // midpoint residual |(A_{j+1}-A_j)/dt - b(midpoint)|
  double worst = 0.0;
  for (std::size_t j = 0; j + 1 < path.times.size(); ++j) {
    double d = path.times[j + 1] - path.times[j];
    double slope = (path.positions[j + 1] - path.positions[j]) / d;
    double mid = b(0.5 * (path.positions[j] + path.positions[j + 1]),
                   0.5 * (path.times[j] + path.times[j + 1]));
    worst = std::max(worst, std::fabs(slope - mid));
  }
  path.residual_norm = worst;
  return path;
}

Field gauge_transform(const Field& u, const FlowPath& path) {
  const Grid& g = u.grid();
  std::vector<double> vals;
  vals.reserve(u.n_times() * g.n_points);
  for (std::size_t j = 0; j < u.n_times(); ++j) {
    const double shift = path.at(u.times()[j]);
    for (std::size_t i = 0; i < g.n_points; ++i)
      vals.push_back(u.eval_at_level(j, g.wrap(g.x(i) + shift)));
  }
  return Field(g, u.times(), std::move(vals));
}

GaugedDrift gauged_drift(const DriftSpec& b, const FlowPath& path, FractionalOrder s,
                         double domain_period, double tolerance) {
  require(s.supercritical(), Errc::invalid_argument,
          "the gauge is only used in the supercritical regime");
  require(b.holder_seminorm().has_value(), Errc::invalid_argument,
          "gauged drift needs a declared Hoelder seminorm");
  const double gamma = 1.0 - 2.0 * s.s;
  const double declared = *b.holder_seminorm();

  auto shared_path = std::make_shared<FlowPath>(path);
  auto base = std::make_shared<DriftSpec>(b);
  auto fn = [shared_path, base](double x, double t) {
    double a = shared_path->at(t);
    return (*base)(x + a, t) - (*base)(a, t);
  };

  // measured envelope over a dense (x, t) lattice
  double worst = 0.0;
  const int nx = 1024, nt = 40;
  const double t0 = path.times.front(), t1 = path.times.back();
  for (int jt = 0; jt <= nt; ++jt) {
    double t = t0 + (t1 - t0) * static_cast<double>(jt) / nt;
    for (int jx = 1; jx <= nx; ++jx) {
      double x = 0.49 * domain_period *
                 std::pow(10.0, -6.0 * (1.0 - static_cast<double>(jx) / nx));
      for (double sign : {-1.0, 1.0}) {
        double v = std::fabs(fn(sign * x, t)) / std::pow(x, gamma);
        worst = std::max(worst, v);
      }
    }
  }
  require(worst <= declared + tolerance, Errc::envelope_violated,
          "measured gauged-drift envelope exceeds the declared seminorm");

  GaugedDrift out;
  out.envelope_constant = worst;
  // |bt| <= declared * min(|x|, L/2)^gamma globally; its sup norm on the
  // torus is bounded by declared * (L/2)^gamma, capped by 2 sup|b|
  double sup = std::min(2.0 * b.sup_norm(), declared * std::pow(0.5 * domain_period, gamma));
  out.drift = DriftSpec::custom(fn, sup, declared, "gauged:" + b.kind());
  return out;
}

}  // namespace fraclab
