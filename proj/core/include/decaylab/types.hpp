#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace decaylab {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) noexcept {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) noexcept {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) noexcept {
  return {s * a[0], s * a[1], s * a[2]};
}

/// (t, x) in R x R^3, geometric units.
struct SpacetimePoint {
  double t = 0.0;
  Vec3 x{0.0, 0.0, 0.0};

  double radius() const noexcept { return norm(x); }
  /// t^2 - |x|^2; positive inside either light cone of the origin.
  double interval() const noexcept { return t * t - dot(x, x); }
};

/// u = t + |x|, v = t - |x|.
struct NullCoords {
  double u = 0.0;
  double v = 0.0;
};

NullCoords null_coords(const SpacetimePoint& pt) noexcept;

/// Inverse of null_coords restricted to (t, |x|): returns {t, r}.
struct TimeRadius {
  double t = 0.0;
  double r = 0.0;
};
TimeRadius from_null(const NullCoords& uv) noexcept;

/// Exponent of the defocusing nonlinearity |phi|^{p-1} phi.
class Power {
 public:
  /// 3 <= p < 5: the range of the end-to-end decay scenarios.
  static Power scenario(double p);
  /// 2 < p < 5: accepted by the retarded-potential operations.
  static Power duhamel(double p);

  double value() const noexcept { return p_; }
  bool is_integer() const noexcept { return integer_ > 0; }
  int integer_value() const noexcept { return integer_; }

 private:
  explicit Power(double p) noexcept;
  double p_;
  int integer_;
};

/// sign(x) |x|^e, with repeated multiplication for small integer exponents.
double signed_power(double x, double e) noexcept;
/// |x|^e for e >= 0, same fast path.
double abs_power(double x, double e) noexcept;

/// Evaluates sign(phi)|phi|^p, the defocusing term, with the integer fast
/// path resolved once at construction.
class Nonlinearity {
 public:
  explicit Nonlinearity(Power p) noexcept;

  double operator()(double phi) const noexcept {
    switch (integer_) {
      case 3:
        return phi * phi * phi;
      case 4:
        return phi * phi * phi * std::abs(phi);
      default:
        return signed_power(phi, p_);
    }
  }
  /// |phi|^{p+1}/(p+1).
  double potential(double phi) const noexcept;
  double exponent() const noexcept { return p_; }

 private:
  double p_;
  int integer_;
};

enum class Frame : std::uint8_t { physical, compactified };

std::string_view to_string(Frame f) noexcept;
Frame frame_from_string(std::string_view s);

}  // namespace decaylab
