#pragma once

#include <array>
#include <functional>

#include "decaylab/types.hpp"

namespace decaylab {

// The compactifying map (t, x) -> (-t, x)/(t^2 - |x|^2) exchanges the open
// forward cone T+ = {|x| < t} and backward cone T- = {|x| < -t}; it is its own
// inverse. Q = T- restricted to -1 <= t < 0 is where the energy argument runs.

enum class ConeRegion { forward, backward, q_region };

bool in_region(const SpacetimePoint& pt, ConeRegion region) noexcept;

/// Throws DomainError when t^2 <= |x|^2.
SpacetimePoint phi_map(const SpacetimePoint& pt);

/// Omega = 1/(t^2 - |x|^2) > 0; throws DomainError on or outside the cone.
double conformal_factor(const SpacetimePoint& pt);

/// Rows are d(image_mu)/d(x_nu), index 0 = t. Analytic.
using Jacobian4 = std::array<std::array<double, 4>, 4>;
Jacobian4 phi_map_jacobian(const SpacetimePoint& pt);

/// Coefficient of the transformed nonlinearity and its time derivative.
struct Coefficient {
  double c = 0.0;
  double dt_c = 0.0;
};

/// c = (t^2 - |x|^2)^{p-3}, dt c = 2(p-3) t (t^2 - |x|^2)^{p-4} for pt in T-.
/// `margin` requires t^2 - |x|^2 >= margin (dt c is unbounded at the cone for
/// p < 4). Throws DomainError outside T- and for p < 3.
Coefficient coefficient_c(const SpacetimePoint& pt, Power p, double margin = 0.0);

/// c clamped to the cone, (max(t^2 - |x|^2, 0))^{p-3}; total on R x R^3.
double clamped_coefficient(double t, double r2, double p) noexcept;

using ScalarField = std::function<double(const SpacetimePoint&)>;

/// psi(q) = phi(Phi q) / Omega(Phi q).
ScalarField to_compactified(ScalarField phi);
/// phi(q) = Omega(q) psi(Phi q).
ScalarField to_physical(ScalarField psi);

/// Value and first derivatives of a field at one point.
struct FieldJet {
  double value = 0.0;
  double dt = 0.0;
  Vec3 grad{0.0, 0.0, 0.0};
};

/// Both transforms have the form g(y) = f(Phi y) / (t_y^2 - |x_y|^2):
///   psi(q) = phi(Phi q) / (t_q^2 - |x_q|^2)   (physical -> compactified)
///   phi(P) = psi(Phi P) / (t_P^2 - |x_P|^2)   (compactified -> physical)
/// so a single chain rule through the analytic Jacobian covers both.
FieldJet pullback_jet(const SpacetimePoint& y, const FieldJet& f_jet_at_image);

/// Jet of psi at q from the jet of phi at Phi(q).
inline FieldJet transform_jet_to_compactified(const SpacetimePoint& q,
                                              const FieldJet& phi_jet_at_image) {
  return pullback_jet(q, phi_jet_at_image);
}
/// Jet of phi at P from the jet of psi at Phi(P).
inline FieldJet transform_jet_to_physical(const SpacetimePoint& p,
                                          const FieldJet& psi_jet_at_image) {
  return pullback_jet(p, psi_jet_at_image);
}

/// Both sides of Box(Omega Phi^* h) = Omega^3 Phi^* Box h at a point of T+,
/// evaluated with centred second differences of spacing `step`.
struct IdentityResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

/// h is a smooth function on T-. Throws DomainError unless pt (and its image)
/// lie at least 4 steps inside their cones.
IdentityResidual conformal_identity_residual(const ScalarField& h,
                                             const SpacetimePoint& pt,
                                             double step = 1e-3);

/// Pushes Z = (t^2+|x|^2, 2 t x) through a finite-difference Jacobian of the
/// map and returns the max-norm deviation from d/dt = (1, 0, 0, 0).
double morawetz_pullback_check(const SpacetimePoint& pt, double step = 1e-3);

/// The Morawetz field components (Z^t, Z^x) at pt.
std::array<double, 4> morawetz_field(const SpacetimePoint& pt) noexcept;

}  // namespace decaylab
