#include "decaylab/snapshot.hpp"

#include <algorithm>
#include <utility>

#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

std::size_t node_count(const GridVariant& grid) {
  return std::visit(
      [](const auto& g) -> std::size_t {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, RadialGrid>) {
          return g.size();
        } else {
          return g.point_count();
        }
      },
      grid);
}

}  // namespace

FieldSnapshot::FieldSnapshot(Frame frame, double time, GridVariant grid,
                             std::vector<double> value, std::vector<double> rate,
                             std::vector<std::uint8_t> mask)
    : frame_(frame),
      time_(time),
      grid_(std::move(grid)),
      value_(std::move(value)),
      rate_(std::move(rate)),
      mask_(std::move(mask)) {
  const std::size_t n = node_count(grid_);
  if (value_.size() != n || rate_.size() != n || mask_.size() != n) {
    throw ConfigError("snapshot arrays do not match the grid size");
  }
}

FieldSnapshot FieldSnapshot::zero(Frame frame, double time, GridVariant grid) {
  const std::size_t n = node_count(grid);
  return FieldSnapshot(frame, time, std::move(grid), std::vector<double>(n, 0.0),
                       std::vector<double>(n, 0.0),
                       std::vector<std::uint8_t>(n, 1));
}

const RadialGrid& FieldSnapshot::radial_grid() const {
  if (const auto* g = std::get_if<RadialGrid>(&grid_)) {
    return *g;
  }
  throw ConfigError("snapshot is not on a radial grid");
}

const CartesianGrid3& FieldSnapshot::cartesian_grid() const {
  if (const auto* g = std::get_if<CartesianGrid3>(&grid_)) {
    return *g;
  }
  throw ConfigError("snapshot is not on a Cartesian grid");
}

double FieldSnapshot::spacing() const noexcept {
  return std::visit([](const auto& g) { return g.spacing(); }, grid_);
}

std::size_t FieldSnapshot::masked_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(mask_.begin(), mask_.end(), [](auto m) { return m != 0; }));
}

Vec3 FieldSnapshot::position(std::size_t i) const noexcept {
  if (const auto* g = std::get_if<RadialGrid>(&grid_)) {
    return {g->r(i), 0.0, 0.0};
  }
  const auto& g = std::get<CartesianGrid3>(grid_);
  const std::size_t n = g.size();
  return {g.coord(i % n), g.coord((i / n) % n), g.coord(i / (n * n))};
}

}  // namespace decaylab
