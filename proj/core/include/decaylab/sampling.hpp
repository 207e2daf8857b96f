#pragma once

#include "decaylab/snapshot.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

/// Linear (radial) or trilinear (Cartesian) interpolation of the field value.
/// `pt.t` must match the snapshot time; throws SamplingError when the point is
/// outside the grid or touches a masked-out node.
double sample_field(const FieldSnapshot& snapshot, const SpacetimePoint& pt);

/// Value, time derivative and their spatial gradients at x.
struct LocalJet {
  double value = 0.0;
  double rate = 0.0;
  Vec3 grad{0.0, 0.0, 0.0};
  Vec3 grad_rate{0.0, 0.0, 0.0};
};

/// Higher-order sampling used by the handoff and the flux diagnostics:
/// cubic Lagrange in r for radial snapshots (even reflection through the
/// origin), trilinear interpolation of nodal values and centred-difference
/// gradients for Cartesian snapshots. Same error contract as sample_field.
LocalJet sample_jet(const FieldSnapshot& snapshot, const Vec3& x);

/// True when sample_jet(snapshot, x) would succeed.
bool can_sample_jet(const FieldSnapshot& snapshot, const Vec3& x) noexcept;

}  // namespace decaylab
