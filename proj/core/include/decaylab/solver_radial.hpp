#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/initial_data.hpp"
#include "decaylab/snapshot.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

using SnapshotSink = std::function<void(const FieldSnapshot&)>;

/// Time series of the field at fixed radii, recorded every step.
struct ProbeSeries {
  std::vector<double> radii;
  std::vector<double> times;
  /// values[k][j]: field at radii[j], time times[k].
  std::vector<std::vector<double>> values;
};

struct RadialEvolutionOptions {
  double t_end = 0.0;
  double cfl = 0.5;
  /// Emit a snapshot every `output_stride` steps (plus the initial and final
  /// levels). 0 disables intermediate output.
  std::size_t output_stride = 0;
  /// Keep emitted snapshots in the returned run; when false they only go to
  /// `sink`.
  bool keep_snapshots = true;
  SnapshotSink sink;
  std::vector<double> probe_radii;
};

struct RadialRun {
  std::vector<FieldSnapshot> snapshots;
  ProbeSeries probes;
  double dt = 0.0;
  std::size_t steps = 0;
  /// Compactified runs only: the cone collapsed below the minimum width
  /// before t_end and the run stopped at the last valid level.
  bool mask_exhausted = false;
};

/// Leapfrog on w = r phi for
///   w_tt = w_rr - r |w/r|^{p-1} (w/r),   w(t, 0) = 0,
/// with zero Dirichlet data at r_max. phi(t, 0) comes from a quadratic fit of
/// w/r through the first three interior nodes. Throws ConfigError when
/// cfl > 1, the data is not physical/radial/at t = 1, or the support could
/// reach r_max before t_end.
RadialRun evolve_physical_radial(const FieldSnapshot& data, Power p,
                                 const RadialEvolutionOptions& options);

struct CompactifiedRadialOptions {
  double t_end = -0.01;
  double cfl = 0.5;
  std::size_t output_stride = 0;
  bool keep_snapshots = true;
  SnapshotSink sink;
  std::vector<double> probe_radii;
  /// Nodes closer than `collar_cells` cells to the cone r = -t are masked.
  double collar_cells = 1.0;
  /// Stop once fewer than this many nodes remain valid.
  std::size_t min_valid_nodes = 8;
};

/// Evolves psi on {t = -1} forward with coefficient c = (t^2 - r^2)^{p-3}
/// (clamped to zero outside the cone) on the shrinking cone r < -t, using the
/// same w = r psi reduction. Masked nodes are never read by diagnostics.
RadialRun evolve_compactified_radial(const FieldSnapshot& data, Power p,
                                     const CompactifiedRadialOptions& options);

/// Result of a three-resolution self-convergence study.
struct ConvergenceOrder {
  double order = 0.0;
  double coarse_diff = 0.0;  // |f_h - f_{h/2}|
  double fine_diff = 0.0;    // |f_{h/2} - f_{h/4}|
  double ratio = 0.0;
  bool degenerate = false;     // both differences exactly zero
  bool indeterminate = false;  // differences not shrinking
};

/// log2 of the successive-difference ratio of f at resolutions h, h/2, h/4.
ConvergenceOrder order_of_convergence(double f_coarse, double f_medium,
                                      double f_fine) noexcept;

/// phi(t_probe, r_probe) from physical radial runs at n, 2n-1 and 4n-3 nodes
/// (nested grids, so the probe stays on a node when it starts on one).
ConvergenceOrder radial_self_convergence(const InitialDataSpec& spec, Power p,
                                         double r_max, std::size_t base_points,
                                         double t_probe, double r_probe,
                                         double cfl = 0.5);

}  // namespace decaylab
