#include "decaylab/probe.hpp"

#include <algorithm>
#include <cmath>

#include "decaylab/conformal.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/sampling.hpp"

namespace decaylab {

WorldlineSeries probe_field(const std::vector<FieldSnapshot>& snapshots,
                            const std::vector<SpacetimePoint>& worldline,
                            bool map_to_physical) {
  WorldlineSeries out;
  if (snapshots.empty()) {
    for (const auto& p : worldline) out.excluded.push_back({p, "no snapshots"});
    return out;
  }
  for (std::size_t i = 1; i < snapshots.size(); ++i) {
    if (!(snapshots[i].time() > snapshots[i - 1].time())) {
      throw ConfigError("snapshots must be in increasing time order");
    }
  }
  const double t_first = snapshots.front().time();
  const double t_last = snapshots.back().time();

  for (const auto& p : worldline) {
    SpacetimePoint q = p;
    double scale = 1.0;
    if (map_to_physical) {
      if (!(p.interval() > 0.0)) {
        out.excluded.push_back({p, "point outside the light cone"});
        continue;
      }
      q = phi_map(p);
      scale = conformal_factor(p);
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(q.t));
    if (q.t < t_first - tol || q.t > t_last + tol) {
      out.excluded.push_back({p, "time outside the snapshot range"});
      continue;
    }
    auto hi = std::lower_bound(snapshots.begin(), snapshots.end(), q.t - tol,
                               [](const FieldSnapshot& s, double t) { return s.time() < t; });
    if (hi == snapshots.end()) --hi;
    auto lo = hi;
    if (hi->time() > q.t + tol && hi != snapshots.begin()) lo = hi - 1;
    try {
      double v;
      if (lo == hi || std::abs(hi->time() - q.t) <= tol) {
        v = sample_field(*hi, {hi->time(), q.x});
      } else {
        const double w = (q.t - lo->time()) / (hi->time() - lo->time());
        v = (1.0 - w) * sample_field(*lo, {lo->time(), q.x}) +
            w * sample_field(*hi, {hi->time(), q.x});
      }
      out.points.push_back(p);
      out.values.push_back(std::abs(v * scale));
    } catch (const SamplingError& e) {
      out.excluded.push_back({p, e.what()});
    }
  }
  return out;
}

}  // namespace decaylab
