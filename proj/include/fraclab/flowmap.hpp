#ifndef FRACLAB_FLOWMAP_HPP
#define FRACLAB_FLOWMAP_HPP

#include <vector>

#include "fraclab/core.hpp"
#include "fraclab/drift.hpp"

namespace fraclab {

// Path following the flow of b, anchored at the analysis point: A(0) = 0,
// A'(t) = b(A(t), t). Euler integrated away from the anchor; any path with
// small midpoint residual is acceptable (uniqueness is not needed for
// merely Hoelder drifts).
struct FlowPath {
  std::vector<double> times;      // ascending, containing 0
  std::vector<double> positions;  // A(t)
  double residual_norm = 0.0;     // sup over steps of the midpoint residual

  double at(double t) const;  // linear interpolation, clamped at the ends
  FlowPath negated() const;
};

FlowPath integrate_flow(const DriftSpec& b, double t_lo, double t_hi, double dt);

// gauge transform: output(x,t) = u(x + A(t), t), periodic cubic in space
Field gauge_transform(const Field& u, const FlowPath& path);

// gauged drift bt(x,t) = b(x + A(t), t) - b(A(t), t); bt(0,t) = 0 exactly.
// The measured envelope sup |bt| / |x|^{1-2s} must not exceed the declared
// seminorm (envelope-violated otherwise).
struct GaugedDrift {
  DriftSpec drift;
  double envelope_constant = 0.0;  // measured sup |bt(x,t)| / |x|^{1-2s}
};

GaugedDrift gauged_drift(const DriftSpec& b, const FlowPath& path, FractionalOrder s,
                         double domain_period, double tolerance = 1e-6);

}  // namespace fraclab

#endif
