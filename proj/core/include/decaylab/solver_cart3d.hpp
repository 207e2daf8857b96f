#pragma once

#include <cstddef>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/snapshot.hpp"
#include "decaylab/solver_radial.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

/// Series of field values along fixed spatial points, recorded every step.
struct PointProbes {
  std::vector<Vec3> points;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[k][j]
};

struct Cart3dOptions {
  double t_end = 0.0;
  double cfl = 0.25;
  std::size_t output_stride = 0;
  bool keep_snapshots = false;
  SnapshotSink sink;
  std::vector<Vec3> probe_points;
  /// Worker threads for the stencil update (z-slab partition). 0 picks the
  /// DECAYLAB_WORKERS environment variable, defaulting to 1.
  std::size_t workers = 0;
  /// Restrict updates to the bounding box of the numerical support grown by
  /// one light-cone radius plus `active_margin_cells`. Nodes outside the box
  /// stay exactly zero.
  bool active_box = true;
  std::size_t active_margin_cells = 24;
};

struct Cart3dRun {
  std::vector<FieldSnapshot> snapshots;
  PointProbes probes;
  double dt = 0.0;
  std::size_t steps = 0;
  bool mask_exhausted = false;
  /// Largest |phi| on the outermost two layers of the box over emitted levels.
  double boundary_layer_max = 0.0;
};

/// Second-order leapfrog with the 7-point Laplacian and zero Dirichlet data on
/// the box. Exact with respect to the box truncation while the data support
/// radius grown by (t - 1) stays inside L; violating that is a ConfigError.
Cart3dRun evolve_physical_3d(const FieldSnapshot& data, Power p,
                             const Cart3dOptions& options);

struct Compactified3dOptions {
  double t_end = -0.1;
  double cfl = 0.25;
  std::size_t output_stride = 0;
  bool keep_snapshots = true;
  SnapshotSink sink;
  std::vector<Vec3> probe_points;
  std::size_t workers = 0;
  double collar_cells = 2.0;
  std::size_t min_valid_nodes = 8;
};

/// Experimental: compactified evolution on a Cartesian grid with the
/// coefficient clamped to the cone and a shrinking validity mask.
Cart3dRun evolve_compactified_3d(const FieldSnapshot& data, Power p,
                                 const Compactified3dOptions& options);

/// Resamples a radial snapshot onto a Cartesian grid (cubic in r).
FieldSnapshot radial_to_cartesian(const FieldSnapshot& radial,
                                  const CartesianGrid3& grid);

/// Largest spread (max - min) of |x|-binned values: deviation from spherical
/// symmetry, with shells of width h.
double spherical_asymmetry(const FieldSnapshot& snapshot);

/// Number of stencil workers from DECAYLAB_WORKERS (>= 1).
std::size_t default_worker_count();

}  // namespace decaylab
