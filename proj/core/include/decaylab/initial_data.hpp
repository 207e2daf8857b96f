#pragma once

#include "decaylab/grid.hpp"
#include "decaylab/snapshot.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

/// Polynomial bump data at t = 1:
///   phi0 = A (alpha^2 - |x-c|^2)^k0,  phi1 = A (alpha^2 - |x-c|^2)^k1
/// inside |x-c| < alpha, zero outside. (alpha^2-s^2)^k is C^{k-1} at the
/// support edge, so k0 >= 4 and k1 >= 3 give C^3 x C^2 data.
struct InitialDataSpec {
  double amplitude = 1.0;
  double support_radius = 0.5;
  int phi0_power = 4;
  int phi1_power = 3;
  Vec3 center{0.0, 0.0, 0.0};

  /// Throws ConfigError unless 0 < alpha, |c| + alpha <= 1/2, k0 >= 4, k1 >= 3.
  void validate() const;
  bool centered() const noexcept {
    return center[0] == 0.0 && center[1] == 0.0 && center[2] == 0.0;
  }
};

double bump_phi0(const InitialDataSpec& spec, const Vec3& x) noexcept;
double bump_phi1(const InitialDataSpec& spec, const Vec3& x) noexcept;
Vec3 bump_grad_phi0(const InitialDataSpec& spec, const Vec3& x) noexcept;
/// A (alpha^2 - s^2)^k for s < alpha, 0 otherwise; s is the distance to c.
double bump_profile(double amplitude, double alpha, int k, double s) noexcept;

/// Data snapshot at t = 1 in the physical frame, mask all-true.
/// Throws ConfigError when alpha spans fewer than 4 cells or, on a radial
/// grid, when the bump is not centred.
FieldSnapshot build_bump_data(const InitialDataSpec& spec, const RadialGrid& grid);
FieldSnapshot build_bump_data(const InitialDataSpec& spec,
                              const CartesianGrid3& grid);

}  // namespace decaylab
