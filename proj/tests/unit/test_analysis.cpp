#include <doctest.h>

#include <cmath>
#include <vector>

#include "decaylab/analysis.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/grid.hpp"

using namespace decaylab;

namespace {

FieldSnapshot physical_profile(double t, double (*f)(double, double)) {
  const RadialGrid g = RadialGrid::with_points(t + 1.0, 2001);
  std::vector<double> v(g.size()), q(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(t, g.r(i));
  return FieldSnapshot(Frame::physical, t, g, v, q, std::vector<std::uint8_t>(g.size(), 1));
}

}  // namespace

TEST_CASE("power law fit recovers exponent and amplitude") {
  std::vector<double> t, y;
  for (int k = 0; k < 100; ++k) {
    t.push_back(1.0 + k);
    y.push_back(3.0 * std::pow(t.back(), -2.5));
  }
  const DecayFit f = fit_power_law(t, y, {5.0, 80.0}, "origin");
  CHECK(f.exponent == doctest::Approx(2.5).epsilon(1e-10));
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(f.rms_residual < 1e-10);
  CHECK(f.samples == 76);
  CHECK_FALSE(f.envelope);
  CHECK(f.probe == "origin");
}

TEST_CASE("fit excludes zeros and switches to the envelope on sign changes") {
  std::vector<double> t, y, z;
  for (int k = 0; k < 400; ++k) {
    const double s = 1.0 + 0.1 * k;
    t.push_back(s);
    y.push_back(std::cos(3.0 * s) * std::pow(s, -2.0));
    z.push_back(k % 10 == 0 ? 0.0 : std::pow(s, -1.0));
  }
  const DecayFit env = fit_power_law(t, y, {2.0, 40.0});
  CHECK(env.envelope);
  CHECK(env.exponent == doctest::Approx(2.0).epsilon(0.05));
  const DecayFit zf = fit_power_law(t, z, {2.0, 40.0});
  CHECK(zf.zero_excluded > 0);
  CHECK(zf.exponent == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(fit_power_law(t, y, {2.0, 2.3}), FitError);
}

TEST_CASE("weighted sups use the right weights") {
  const FieldSnapshot s = physical_profile(3.0, [](double, double) { return 1e-2; });
  const Power p = Power::scenario(4.0);
  const WeightedSup weak = weighted_sup_constant(std::span(&s, 1), p, WeightKind::weak);
  // t^2 - r^2 is largest at r = 0.
  CHECK(weak.value == doctest::Approx(1e-2 * 9.0));
  CHECK(weak.argmax.radius() == doctest::Approx(0.0));
  const WeightedSup strong = weighted_sup_constant(std::span(&s, 1), p, WeightKind::strong);
  // (1+t+r)(1+t-r)^2 on [0, 3] peaks at r = 0 with value 64.
  CHECK(strong.value == doctest::Approx(1e-2 * 64.0));
}

TEST_CASE("light-cone fit follows the shell") {
  std::vector<FieldSnapshot> series;
  for (int k = 0; k < 60; ++k) {
    series.push_back(physical_profile(2.0 + 0.5 * k, [](double t, double r) {
      return std::pow(1.0 + t + r, -1.3) * std::exp(-(t - r - 1.0) * (t - r - 1.0));
    }));
  }
  const DecayFit f = fit_lightcone_decay(series, 1.0, {5.0, 60.0});
  CHECK(f.exponent == doctest::Approx(1.3).epsilon(1e-3));
}

TEST_CASE("origin series maps back to physical time") {
  const std::vector<double> tt{-0.5, -0.25, -0.1, NAN};
  const std::vector<double> psi{1.0, 2.0, 3.0, 4.0};
  const TimeSeries s = origin_series_to_physical(tt, psi);
  REQUIRE(s.t.size() == 3);
  CHECK(s.t[0] == doctest::Approx(2.0));
  CHECK(s.y[0] == doctest::Approx(0.25));
  CHECK(s.t[2] == doctest::Approx(10.0));
  CHECK(s.y[2] == doctest::Approx(3.0 * 0.01));
}

TEST_CASE("refinement stability") {
  const std::vector<double> v{1.0, 1.2, 1.21};
  const StabilityReport r = refinement_stability(v);
  REQUIRE(r.relative_changes.size() == 2);
  CHECK(r.stable);
  CHECK_FALSE(refinement_stability(std::vector<double>{1.0, 2.0}).stable);
  const std::vector<std::size_t> res{1, 2, 4};
  const StabilityReport f =
      refinement_stability([](std::size_t n) { return 1.0 + 0.01 / double(n * n); }, res, 0.1);
  CHECK(f.stable);
}
