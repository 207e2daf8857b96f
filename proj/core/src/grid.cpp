#include "decaylab/grid.hpp"

#include <cmath>
#include <string>

#include "decaylab/errors.hpp"

namespace decaylab {

RadialGrid::RadialGrid(double r_max, std::size_t n) noexcept
    : r_max_(r_max), n_(n), h_(r_max / static_cast<double>(n - 1)) {}

RadialGrid RadialGrid::with_points(double r_max, std::size_t n) {
  if (n < 2) {
    throw ConfigError("radial grid needs at least 2 points");
  }
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw ConfigError("radial grid r_max must be positive");
  }
  return RadialGrid(r_max, n);
}

RadialGrid RadialGrid::with_spacing(double r_max, double h) {
  if (!(h > 0.0)) {
    throw ConfigError("radial grid spacing must be positive");
  }
  const auto cells = static_cast<std::size_t>(std::ceil(r_max / h - 1e-9));
  return with_points(r_max, cells + 1);
}

CartesianGrid3::CartesianGrid3(double half_width, std::size_t n) noexcept
    : half_width_(half_width),
      n_(n),
      h_(2.0 * half_width / static_cast<double>(n - 1)) {}

CartesianGrid3 CartesianGrid3::make(double half_width, std::size_t n) {
  if (n < 3) {
    throw ConfigError("Cartesian grid needs at least 3 points per axis");
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("Cartesian grid half width must be positive");
  }
  return CartesianGrid3(half_width, n);
}

}  // namespace decaylab
