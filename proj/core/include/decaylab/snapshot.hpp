#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "decaylab/grid.hpp"
#include "decaylab/types.hpp"

namespace decaylab {

using GridVariant = std::variant<RadialGrid, CartesianGrid3>;

/// A field and its time derivative on one grid at one coordinate time.
///
/// `value` holds phi in the physical frame and psi in the compactified frame.
/// The mask marks nodes inside the numerical domain of dependence; every
/// diagnostic reads masked nodes only. Snapshots are immutable.
class FieldSnapshot {
 public:
  FieldSnapshot(Frame frame, double time, GridVariant grid,
                std::vector<double> value, std::vector<double> rate,
                std::vector<std::uint8_t> mask);

  /// All-zero field with an all-true mask.
  static FieldSnapshot zero(Frame frame, double time, GridVariant grid);

  Frame frame() const noexcept { return frame_; }
  double time() const noexcept { return time_; }
  const GridVariant& grid() const noexcept { return grid_; }
  bool is_radial() const noexcept {
    return std::holds_alternative<RadialGrid>(grid_);
  }
  const RadialGrid& radial_grid() const;
  const CartesianGrid3& cartesian_grid() const;
  double spacing() const noexcept;

  std::span<const double> value() const noexcept { return value_; }
  std::span<const double> rate() const noexcept { return rate_; }
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  std::size_t size() const noexcept { return value_.size(); }
  bool valid(std::size_t i) const noexcept { return mask_[i] != 0; }
  std::size_t masked_count() const noexcept;

  /// Node position (radial nodes lie on the +x axis).
  Vec3 position(std::size_t i) const noexcept;

 private:
  Frame frame_;
  double time_;
  GridVariant grid_;
  std::vector<double> value_;
  std::vector<double> rate_;
  std::vector<std::uint8_t> mask_;
};

}  // namespace decaylab
