#pragma once

#include <optional>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/snapshot.hpp"
#include "decaylab/solver_radial.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

// The slice {t~ = -1} of the compactified frame is the image of the physical
// hyperboloid t = 1/2 + sqrt(1/4 + r^2) (equivalently uv = t). A compactified
// node at radius s lies over the physical point
//   t = 1/(1 - s^2),  r = s/(1 - s^2),
// so nodes approaching s = 1 need the physical solution at ever later times.
// Data beyond a truncation radius s_c is set to zero; there the field is the
// radiation field evaluated next to the inner edge v = 1 - alpha of the
// outgoing shell, where it vanishes to high order. An optional taper
// multiplies the data by a C-infinity step falling from 1 at `taper_start`
// to 0 at s_c, which avoids injecting a jump into the compactified grid.

/// Physical time needed to cover compactified radii up to s_c.
double handoff_required_time(double truncation_radius) noexcept;

/// Streaming sampler of the physical solution on the hyperboloid. Feed it
/// physical snapshots in increasing time order (e.g. as a solver sink); it
/// interpolates cubically (Hermite) in time between consecutive snapshots and
/// with sample_jet in space, then applies the conformal chain rule.
class HyperboloidHandoff {
 public:
  /// Target is a compactified radial or Cartesian grid (nodes with |x| >= s_c
  /// receive zero data). A negative `taper_start` disables the taper.
  HyperboloidHandoff(GridVariant target, double truncation_radius = 0.99,
                     double taper_start = -1.0);

  double required_time() const noexcept;
  void consume(const FieldSnapshot& physical);
  SnapshotSink sink();
  bool complete() const noexcept;

  /// psi and d psi/dt on {t~ = -1}; frame compactified, mask r < 1 - collar.
  /// Throws ConfigError if the consumed snapshots stop short of required_time.
  FieldSnapshot result() const;

 private:
  struct Target {
    std::size_t node;
    SpacetimePoint physical;
    SpacetimePoint compact;
  };
  void sample_between(const FieldSnapshot& a, const FieldSnapshot& b);

  GridVariant grid_;
  double truncation_;
  double taper_start_;
  std::vector<Target> targets_;  // sorted by physical time
  std::size_t next_ = 0;
  std::vector<double> value_;
  std::vector<double> rate_;
  std::optional<FieldSnapshot> previous_;
  double covered_until_ = 0.0;
};

/// Batch form over stored physical snapshots.
FieldSnapshot hyperboloid_handoff(const std::vector<FieldSnapshot>& physical,
                                  const GridVariant& target,
                                  double truncation_radius = 0.99,
                                  double taper_start = -1.0);

/// Convenience pipeline for radial data: runs the physical solver just long
/// enough (streaming, every step) and returns the handoff data.
struct HandoffSettings {
  double physical_spacing = 1.0 / 256.0;
  double cfl = 0.5;
  double truncation_radius = 0.99;
  double taper_start = -1.0;
};
/// The taper factor at compactified radius s (1 below taper_start, 0 at and
/// beyond the truncation radius).
double handoff_taper(double s, double taper_start, double truncation_radius) noexcept;
FieldSnapshot radial_handoff(const FieldSnapshot& physical_data, Power p,
                             const GridVariant& target,
                             const HandoffSettings& settings);

}  // namespace decaylab
