#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "decaylab/snapshot.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

struct DecayFit {
  double exponent = 0.0;   // positive decay rate
  double amplitude = 0.0;
  double rms_residual = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::size_t samples = 0;
  std::size_t zero_excluded = 0;
  bool envelope = false;   // fitted on local maxima of |y|
  std::string probe;
};

struct FitWindow {
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Least squares on (log t, log |y|). Exact zeros are excluded (and counted);
/// a series that changes sign inside the window is replaced by its local
/// maxima of |y|. Throws FitError with fewer than 8 usable samples.
DecayFit fit_power_law(std::span<const double> t, std::span<const double> y,
                       FitWindow window, std::string probe = {});

enum class WeightKind { strong, weak };

struct WeightedSup {
  double value = 0.0;
  SpacetimePoint argmax;
  bool on_collar = false;
};

/// sup over masked nodes and snapshots of
///   strong: |phi| (1+t+|x|)(1+t-|x|)^{p-2}
///   weak:   |phi| (t^2 - |x|^2)          (points inside the forward cone)
/// Compactified snapshots are mapped to the physical frame first.
/// Throws SamplingError when no snapshot has a masked node.
WeightedSup weighted_sup_constant(std::span<const FieldSnapshot> snapshots,
                                  Power p, WeightKind kind);

/// Fit of |phi| against 1 + u = 1 + t + |x| along the shell t - |x| = v0
/// for u in `window`, one sample per snapshot (Cartesian snapshots are read
/// along +x). Accepts physical or compactified snapshots.
DecayFit fit_lightcone_decay(std::span<const FieldSnapshot> snapshots, double v0,
                             FitWindow window);

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> y;
};
/// phi(t, 0) = psi(-1/t, 0) / t^2 from a compactified series at the origin;
/// NaN entries (masked) are dropped.
TimeSeries origin_series_to_physical(std::span<const double> compact_times,
                                     std::span<const double> psi_values);
struct StabilityReport {
  std::vector<double> values;
  std::vector<double> relative_changes;
  double threshold = 0.1;
  bool stable = false;
};

/// Successive relative changes; stable when the last one is below threshold.
StabilityReport refinement_stability(std::span<const double> values,
                                     double threshold = 0.1);

/// Runs `extract` at each resolution and reports stability.
StabilityReport refinement_stability(
    const std::function<double(std::size_t)>& extract,
    std::span<const std::size_t> resolutions, double threshold = 0.1);

}  // namespace decaylab
