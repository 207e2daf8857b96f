#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "decaylab/conformal.hpp"
#include "decaylab/duhamel.hpp"

namespace decaylab::cli {

ConformalCheck run_conformal_checks(std::size_t random_points, std::uint64_t seed) {
  ConformalCheck out;
  out.steps = {1e-2, 5e-3, 2.5e-3};
  const ScalarField gaussian = [](const SpacetimePoint& q) {
    const double dt = q.t + 0.5;
    return std::exp(-(dt * dt + dot(q.x, q.x)) / 0.08);
  };
  const std::vector<SpacetimePoint> points{
      {2.0, {0.3, 0.2, -0.1}}, {3.0, {1.0, 0.5, 0.0}}, {1.5, {0.2, 0.0, 0.4}},
      {2.5, {-0.6, 0.3, 0.8}}, {4.0, {0.5, -1.5, 1.0}}};
  for (const double step : out.steps) {
    double worst = 0.0;
    for (const auto& pt : points) {
      worst = std::max(worst, std::abs(conformal_identity_residual(gaussian, pt, step).residual));
    }
    out.residuals.push_back(worst);
  }
  out.min_order = INFINITY;
  for (std::size_t i = 1; i < out.residuals.size(); ++i) {
    out.min_order = std::min(out.min_order, std::log2(out.residuals[i - 1] / out.residuals[i]));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  for (std::size_t k = 0; k < random_points; ++k) {
    Vec3 x{unit(rng), unit(rng), unit(rng)};
    const double r = norm(x);
    // |t| in (r, 3r + 1): strictly inside a cone, away from its boundary.
    const double t = (r + 1e-3 + (2.0 * r + 1.0) * 0.5 * (unit(rng) + 1.0)) * (k % 2 == 0 ? 1.0 : -1.0);
    const SpacetimePoint q{t, x};
    const SpacetimePoint img = phi_map(q);
    const SpacetimePoint back = phi_map(img);
    const double scale = std::max(std::abs(q.t), norm(q.x));
    double err = std::abs(back.t - q.t) / scale;
    for (int a = 0; a < 3; ++a) err = std::max(err, std::abs(back.x[a] - q.x[a]) / scale);
    err = std::max(err, rel(conformal_factor(q) * conformal_factor(img), 1.0));
    const NullCoords n = null_coords(q);
    const NullCoords m = null_coords(img);
    err = std::max(err, rel(m.u, -1.0 / n.u));
    err = std::max(err, rel(m.v, -1.0 / n.v));
    out.map_identity_max = std::max(out.map_identity_max, err);
  }
  return out;
}

HuygensCheck run_huygens_check(const InitialDataSpec& spec, double h) {
  HuygensCheck out;
  out.t_min = 1.0 + spec.support_radius + norm(spec.center) + 2.0 * h;
  for (int k = 1; k <= 200; ++k) {
    const double t = out.t_min + (20.0 - out.t_min) * k / 200.0;
    out.max_after = std::max(out.max_after,
                             std::abs(free_solution_kirchhoff(spec, {t, {0.0, 0.0, 0.0}})));
  }
  for (const double t : {1.5, 2.0, 4.0, 8.0, 16.0}) {
    double sup = 0.0;
    const double reach = t - 1.0 + spec.support_radius + norm(spec.center);
    for (double r = 0.0; r <= reach; r += h) {
      sup = std::max(sup, std::abs(free_solution_kirchhoff(spec, {t, {r, 0.0, 0.0}})));
    }
    out.weighted_sup = std::max(out.weighted_sup, t * sup);
  }
  return out;
}

}  // namespace decaylab::cli
