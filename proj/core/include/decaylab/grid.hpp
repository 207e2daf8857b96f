#pragma once

#include <cstddef>

namespace decaylab {

/// Uniform grid on [0, r_max]; node 0 sits on the origin.
class RadialGrid {
 public:
  static RadialGrid with_points(double r_max, std::size_t n);
  /// Picks the node count so the spacing does not exceed `h`.
  static RadialGrid with_spacing(double r_max, double h);

  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double r(std::size_t i) const noexcept { return static_cast<double>(i) * h_; }

  bool operator==(const RadialGrid&) const = default;

 private:
  RadialGrid(double r_max, std::size_t n) noexcept;
  double r_max_;
  std::size_t n_;
  double h_;
};

/// Cubic grid on [-L, L]^3 with n nodes per axis, x-fastest storage.
class CartesianGrid3 {
 public:
  static CartesianGrid3 make(double half_width, std::size_t n);

  double half_width() const noexcept { return half_width_; }
  std::size_t size() const noexcept { return n_; }
  std::size_t point_count() const noexcept { return n_ * n_ * n_; }
  double spacing() const noexcept { return h_; }
  double coord(std::size_t i) const noexcept {
    return -half_width_ + static_cast<double>(i) * h_;
  }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const noexcept {
    return i + n_ * (j + n_ * k);
  }

  bool operator==(const CartesianGrid3&) const = default;

 private:
  CartesianGrid3(double half_width, std::size_t n) noexcept;
  double half_width_;
  std::size_t n_;
  double h_;
};

}  // namespace decaylab
