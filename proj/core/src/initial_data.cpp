#include "decaylab/initial_data.hpp"

#include <cmath>
#include <string>

#include "decaylab/errors.hpp"

namespace decaylab {

void InitialDataSpec::validate() const {
  if (!(support_radius > 0.0)) {
    throw ConfigError("support radius alpha must be positive");
  }
  if (norm(center) + support_radius > 0.5 + 1e-14) {
    throw ConfigError("bump support |c| + alpha = " +
                      std::to_string(norm(center) + support_radius) +
                      " must lie inside |x| <= 1/2");
  }
  if (phi0_power < 4) {
    throw ConfigError("phi0_power must be >= 4 (phi0 in C^3)");
  }
  if (phi1_power < 3) {
    throw ConfigError("phi1_power must be >= 3 (phi1 in C^2)");
  }
  if (!std::isfinite(amplitude)) {
    throw ConfigError("amplitude must be finite");
  }
}

double bump_profile(double amplitude, double alpha, int k, double s) noexcept {
  if (s >= alpha) {
    return 0.0;
  }
  const double base = alpha * alpha - s * s;
  double r = amplitude;
  for (int i = 0; i < k; ++i) {
    r *= base;
  }
  return r;
}

double bump_phi0(const InitialDataSpec& spec, const Vec3& x) noexcept {
  return bump_profile(spec.amplitude, spec.support_radius, spec.phi0_power,
                      norm(x - spec.center));
}

double bump_phi1(const InitialDataSpec& spec, const Vec3& x) noexcept {
  return bump_profile(spec.amplitude, spec.support_radius, spec.phi1_power,
                      norm(x - spec.center));
}

Vec3 bump_grad_phi0(const InitialDataSpec& spec, const Vec3& x) noexcept {
  const Vec3 d = x - spec.center;
  const double s = norm(d);
  if (s >= spec.support_radius) {
    return {0.0, 0.0, 0.0};
  }
  const double k = spec.phi0_power;
  const double outer =
      bump_profile(spec.amplitude, spec.support_radius, spec.phi0_power - 1, s);
  return (-2.0 * k * outer) * d;
}

namespace {

void check_resolution(const InitialDataSpec& spec, double h) {
  if (spec.support_radius / h < 4.0 - 1e-12) {
    throw ConfigError("grid too coarse: alpha/h = " +
                      std::to_string(spec.support_radius / h) +
                      " < 4 cells across the bump");
  }
}

}  // namespace

FieldSnapshot build_bump_data(const InitialDataSpec& spec, const RadialGrid& grid) {
  spec.validate();
  if (!spec.centered()) {
    throw ConfigError("radial grids need a bump centred at the origin");
  }
  check_resolution(spec, grid.spacing());
  const std::size_t n = grid.size();
  std::vector<double> value(n), rate(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 x{grid.r(i), 0.0, 0.0};
    value[i] = bump_phi0(spec, x);
    rate[i] = bump_phi1(spec, x);
  }
  return FieldSnapshot(Frame::physical, 1.0, grid, std::move(value),
                       std::move(rate), std::vector<std::uint8_t>(n, 1));
}

FieldSnapshot build_bump_data(const InitialDataSpec& spec,
                              const CartesianGrid3& grid) {
  spec.validate();
  check_resolution(spec, grid.spacing());
  const std::size_t n = grid.size();
  std::vector<double> value(grid.point_count()), rate(grid.point_count());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 x{grid.coord(i), grid.coord(j), grid.coord(k)};
        const std::size_t idx = grid.index(i, j, k);
        value[idx] = bump_phi0(spec, x);
        rate[idx] = bump_phi1(spec, x);
      }
    }
  }
  return FieldSnapshot(Frame::physical, 1.0, grid, std::move(value),
                       std::move(rate),
                       std::vector<std::uint8_t>(grid.point_count(), 1));
}

}  // namespace decaylab
