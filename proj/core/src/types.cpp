#include "decaylab/types.hpp"

#include <cmath>
#include <string>

#include "decaylab/errors.hpp"

namespace decaylab {

NullCoords null_coords(const SpacetimePoint& pt) noexcept {
  const double r = pt.radius();
  return {pt.t + r, pt.t - r};
}

TimeRadius from_null(const NullCoords& uv) noexcept {
  return {0.5 * (uv.u + uv.v), 0.5 * (uv.u - uv.v)};
}

namespace {

int detect_integer(double p) noexcept {
  const double rounded = std::round(p);
  if (rounded == p && rounded >= 1.0 && rounded <= 8.0) {
    return static_cast<int>(rounded);
  }
  return 0;
}

}  // namespace

Power::Power(double p) noexcept : p_(p), integer_(detect_integer(p)) {}

Power Power::scenario(double p) {
  if (!(p >= 3.0 && p < 5.0)) {
    throw ConfigError("power p = " + std::to_string(p) +
                      " outside the decay-estimate range 3 <= p < 5");
  }
  return Power(p);
}

Power Power::duhamel(double p) {
  if (!(p > 2.0 && p < 5.0)) {
    throw ConfigError("power p = " + std::to_string(p) +
                      " outside the decay-lemma range 2 < p < 5");
  }
  return Power(p);
}

double abs_power(double x, double e) noexcept {
  const double a = std::abs(x);
  const int k = detect_integer(e);
  if (e == 0.0) {
    return 1.0;
  }
  if (k > 0) {
    double r = a;
    for (int i = 1; i < k; ++i) {
      r *= a;
    }
    return r;
  }
  if (a == 0.0) {
    return 0.0;
  }
  return std::exp(e * std::log(a));
}

double signed_power(double x, double e) noexcept {
  return std::copysign(abs_power(x, e), x);
}

Nonlinearity::Nonlinearity(Power p) noexcept
    : p_(p.value()), integer_(p.integer_value()) {}

double Nonlinearity::potential(double phi) const noexcept {
  return abs_power(phi, p_ + 1.0) / (p_ + 1.0);
}

std::string_view to_string(Frame f) noexcept {
  return f == Frame::physical ? "physical" : "compactified";
}

Frame frame_from_string(std::string_view s) {
  if (s == "physical") {
    return Frame::physical;
  }
  if (s == "compactified") {
    return Frame::compactified;
  }
  throw ConfigError("unknown frame '" + std::string(s) + "'");
}

}  // namespace decaylab
