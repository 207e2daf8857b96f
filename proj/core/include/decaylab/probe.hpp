#pragma once

#include <string>
#include <vector>

#include "decaylab/snapshot.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

struct ProbeExclusion {
  SpacetimePoint point;
  std::string reason;
};

struct WorldlineSeries {
  std::vector<SpacetimePoint> points;
  std::vector<double> values;  // |field| at each accepted point
  std::vector<ProbeExclusion> excluded;
};

/// Samples |field| along a worldline, linear in time between the bracketing
/// snapshots. With `map_to_physical`, compactified snapshots are read at the
/// image of each (physical) worldline point and rescaled by Omega.
/// Points that cannot be sampled are reported, never silently dropped.
WorldlineSeries probe_field(const std::vector<FieldSnapshot>& snapshots,
                            const std::vector<SpacetimePoint>& worldline,
                            bool map_to_physical = false);

}  // namespace decaylab
