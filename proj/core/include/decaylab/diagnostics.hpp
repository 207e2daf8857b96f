#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "decaylab/snapshot.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

struct EnergyReport {
  double time = 0.0;
  double kinetic = 0.0;
  double gradient = 0.0;
  double potential = 0.0;
  double total = 0.0;
  Frame frame = Frame::physical;
  /// Non-empty when the field is non-zero next to the mask boundary.
  std::string warning;
};

/// Midpoint-rule energy
///   E = int (1/2 phi_t^2 + 1/2 |grad phi|^2 + |phi|^{p+1}/(p+1)) d^3x
/// over masked cells of a physical snapshot.
EnergyReport total_energy(const FieldSnapshot& snapshot, Power p);

/// e = 1/2 psi_t^2 + 1/2 |grad psi|^2 + c |psi|^{p+1}/(p+1).
double pseudo_energy_density(double value, double rate, double grad_squared,
                             double c, Power p) noexcept;

/// E0 = int_{|x| < 1} e d^3x on {t~ = -1} with c = (1 - |x|^2)^{p-3}.
/// Throws ConfigError when the snapshot is not compactified at t~ = -1 or the
/// data has support at |x| >= 1.
double e0_initial_energy(const FieldSnapshot& data, Power p);

/// Product quadrature sizes for cone integrals.
struct ConeQuadrature {
  std::size_t polar = 24;    // Gauss-Legendre nodes in cos(theta)
  std::size_t azimuth = 32;  // trapezoid nodes (unused for radial snapshots)
  std::size_t radial = 24;   // Gauss-Legendre nodes per ball radius
};

struct FluxReport {
  SpacetimePoint apex;
  double flux = 0.0;
  double e0 = 0.0;
  double margin = 0.0;  // e0 - flux
};

/// Flux through the backward null mantle
///   M = {(s, y) : -1 <= s < t, |y - x| = t - s}
/// of the flux density
///   1/2 (psi_t - psi_n)^2 + 1/2 |grad psi - n psi_n|^2 + c |psi|^{p+1}/(p+1),
/// n = (y - x)/|y - x|, with weight (t - s)^2 ds dw. The s nodes are the
/// snapshot times (trapezoid); snapshots must be compactified, equally spaced
/// and start at t~ = -1. The apex time is snapped to the nearest snapshot.
/// Throws SamplingError naming the first invalid (s, direction).
FluxReport mantle_flux(std::span<const FieldSnapshot> series,
                       const SpacetimePoint& apex, Power p,
                       const ConeQuadrature& quad = {});

/// Discrete Stokes balance on the solid truncated backward cone K(apex):
///   int_K dt(c)|psi|^{p+1}/(p+1)  vs  Flux(apex) - int_{D_{1+t}(-1,x)} e.
struct DivergenceBalance {
  SpacetimePoint apex;
  double volume_term = 0.0;
  double flux = 0.0;
  double disk_energy = 0.0;
  double residual = 0.0;
};
DivergenceBalance divergence_residual(std::span<const FieldSnapshot> series,
                                      const SpacetimePoint& apex, Power p,
                                      const ConeQuadrature& quad = {});

/// Index of the snapshot whose time is closest to t.
std::size_t nearest_snapshot(std::span<const FieldSnapshot> series, double t);

/// Running sup over masked nodes of |value|, one entry per snapshot.
std::vector<double> running_sup(std::span<const FieldSnapshot> series);

/// Pairwise (cascade) summation; fixed reduction order for reproducibility.
double pairwise_sum(std::span<const double> values) noexcept;

}  // namespace decaylab
