#pragma once

#include <functional>
#include <string>
#include <vector>

#include "decaylab/initial_data.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

/// (1 + t + |x|)^{-a} (1 + t - |x|)^{-b} on {t >= t0, |x| <= t}, zero
/// elsewhere. The forward-cone cut keeps 1 + t - |x| >= 1 and covers the
/// support of every solution with data in |x| < 1/2 at t = 1.
struct WeightFunction {
  double a = 0.0;
  double b = 0.0;
  double t0 = 1.0;

  double operator()(double t, double r) const noexcept;
};

/// Free solution chi with (chi, chi_t) = (phi0, phi1) at t = 1, by Kirchhoff's
/// formula chi = d/dt[tau M(phi0)] + tau M(phi1), tau = t - 1, where the
/// spherical means are computed by Gauss-Legendre quadrature in the polar
/// angle about the axis from x to the bump centre. On the cut where the sphere
/// meets the support the integrands are polynomials in cos(angle), so the rule
/// is exact up to round-off.
/// Throws DomainError for t <= 1.
double free_solution_kirchhoff(const InitialDataSpec& spec,
                               const SpacetimePoint& pt);

struct QuadratureOptions {
  double tolerance = 1e-3;   // stop when successive levels differ less
  double flag_threshold = 1e-2;
  std::size_t min_level = 3;
  std::size_t max_level = 13;
};

struct QuadratureResult {
  double value = 0.0;
  double last_change = 0.0;  // relative change between the last two levels
  std::size_t level = 0;
  std::size_t nodes = 0;     // nodes per dimension at the final level
  bool converged = false;
  /// Set when the last two refinements differ by more than flag_threshold.
  bool non_convergence = false;
};

/// Radially symmetric source f(s, |y|), with optional support information
/// used to cut the integration domain at the source's edges.
struct RadialSource {
  std::function<double(double s, double r)> f;
  /// |y| <= support_radius(s) contains the support at time s.
  std::function<double(double s)> support_radius;
  double s_min = 1.0;
  double s_max = 1e300;
};

/// General source f(s, y) whose support at time s lies in |y| <= support_radius(s).
struct GeneralSource {
  std::function<double(double s, const Vec3& y)> f;
  std::function<double(double s)> support_radius;
  double s_min = 1.0;
  double s_max = 1e300;
};

/// (1/4pi) int_{B_{t-1}(x)} f(t - |y-x|, y)/|y-x| dy via the exact radial
/// reduction (1/2r) int int lambda f(s, lambda) dlambda ds over the
/// characteristic triangle; r -> 0 uses int (t-s) f(s, t-s) ds.
QuadratureResult retarded_potential(const RadialSource& source,
                                    const SpacetimePoint& pt,
                                    const QuadratureOptions& opts = {});

/// Same integral by direct spherical-shell quadrature in (rho, mu, azimuth).
QuadratureResult retarded_potential_shell(const GeneralSource& source,
                                          const SpacetimePoint& pt,
                                          const QuadratureOptions& opts = {});

RadialSource weight_source(const WeightFunction& w);

struct LemmaRow {
  SpacetimePoint point;
  double potential = 0.0;
  double ratio = 0.0;
  bool converged = false;
};

struct LemmaTable {
  double p = 0.0;
  double max_ratio = 0.0;
  SpacetimePoint argmax;
  std::vector<LemmaRow> rows;
  bool all_converged = true;
};

/// R = Box^{-1}[weight(p, p)] (1+t+|x|)(1+t-|x|)^{p-2} at each sample point.
LemmaTable decay_lemma_ratio(Power p, const std::vector<SpacetimePoint>& samples,
                             const QuadratureOptions& opts = {});

/// Default lattice: t geometric in [1, 100] on the shell |x| = t - 1 and at
/// |x| in {0, 1}.
std::vector<SpacetimePoint> lemma_sample_lattice(std::size_t per_family = 24);

struct BoundRow {
  SpacetimePoint point;
  double measured = 0.0;   // |phi|
  double chi = 0.0;        // |chi|
  double duhamel = 0.0;    // C^p Box^{-1}[weight]
  double bound = 0.0;      // duhamel + chi
  bool ok = true;
};

struct BoundReport {
  double weak_constant = 0.0;
  double p = 0.0;
  std::vector<BoundRow> rows;
  bool ok = true;
  /// max over rows of bound (1+t+|x|)(1+t-|x|)^{p-2}: the constant the chain
  /// delivers for the strong estimate.
  double implied_constant = 0.0;
  std::string failure;  // first violating location, if any
};

/// Checks |phi| <= C^p Box^{-1}[weight(p,p)] + |chi| at each sample.
BoundReport improved_bound_check(double weak_constant, Power p,
                                 const InitialDataSpec& spec,
                                 const std::vector<SpacetimePoint>& points,
                                 const std::vector<double>& measured,
                                 const QuadratureOptions& opts = {});

}  // namespace decaylab
