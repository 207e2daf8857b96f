#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "decaylab/errors.hpp"
#include "decaylab/field_io.hpp"
#include "decaylab/initial_data.hpp"
#include "decaylab/probe.hpp"
#include "decaylab/sampling.hpp"

using namespace decaylab;

namespace {

FieldSnapshot radial_poly(double t, double (*f)(double), std::size_t n = 101, double r_max = 2.0) {
  const RadialGrid g = RadialGrid::with_points(r_max, n);
  std::vector<double> v(n), q(n);
  std::vector<std::uint8_t> m(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = f(g.r(i));
    q[i] = 2.0 * f(g.r(i));
  }
  m[n - 1] = 0;
  return FieldSnapshot(Frame::physical, t, g, v, q, m);
}

}  // namespace

TEST_CASE("bump data") {
  InitialDataSpec spec;
  spec.amplitude = 2.0;
  CHECK(bump_phi0(spec, {0.0, 0.0, 0.0}) == doctest::Approx(2.0 * std::pow(0.25, 4)));
  CHECK(bump_phi1(spec, {0.0, 0.3, 0.0}) == doctest::Approx(2.0 * std::pow(0.16, 3)));
  CHECK(bump_phi0(spec, {0.5, 0.0, 0.0}) == 0.0);
  const Vec3 x{0.1, 0.2, -0.1};
  const double h = 1e-6;
  const Vec3 g = bump_grad_phi0(spec, x);
  for (int a = 0; a < 3; ++a) {
    Vec3 xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    CHECK(g[a] == doctest::Approx((bump_phi0(spec, xp) - bump_phi0(spec, xm)) / (2 * h)).epsilon(1e-6));
  }
  InitialDataSpec bad = spec;
  bad.center = {0.2, 0.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.phi0_power = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  InitialDataSpec off = spec;
  off.support_radius = 0.3;
  off.center = {0.1, 0.0, 0.0};
  CHECK_THROWS_AS(build_bump_data(off, RadialGrid::with_points(2.0, 201)), ConfigError);
  CHECK_THROWS_AS(build_bump_data(spec, RadialGrid::with_points(2.0, 9)), ConfigError);
  const FieldSnapshot d = build_bump_data(spec, RadialGrid::with_points(2.0, 201));
  CHECK(d.time() == 1.0);
  CHECK(d.masked_count() == d.size());
}

TEST_CASE("sampling reproduces low-degree polynomials") {
  const FieldSnapshot lin = radial_poly(1.0, [](double r) { return 1.0 + 3.0 * r; });
  CHECK(sample_field(lin, {1.0, {0.0, 0.333, 0.0}}) == doctest::Approx(1.999));
  const FieldSnapshot even = radial_poly(1.0, [](double r) { return 1.0 + r * r - 0.1 * r * r * r * r; });
  for (const double r : {0.003, 0.31, 1.234}) {
    const LocalJet j = sample_jet(even, {r, 0.0, 0.0});
    const double ref = 1.0 + r * r - 0.1 * r * r * r * r;
    CHECK(j.value == doctest::Approx(ref).epsilon(1e-6));
    CHECK(j.rate == doctest::Approx(2.0 * ref).epsilon(1e-6));
    CHECK(std::abs(j.grad[0] - (2.0 * r - 0.4 * r * r * r)) < 1e-4);
  }
  CHECK_THROWS_AS(sample_field(lin, {1.0, {1.999, 0.0, 0.0}}), SamplingError);
  CHECK_THROWS_AS(sample_field(lin, {1.0, {3.0, 0.0, 0.0}}), SamplingError);
  CHECK_THROWS_AS(sample_field(lin, {2.0, {0.5, 0.0, 0.0}}), SamplingError);
  CHECK_FALSE(can_sample_jet(lin, {1.999, 0.0, 0.0}));
  CHECK(can_sample_jet(lin, {0.5, 0.0, 0.0}));
}

TEST_CASE("binary field files round trip exactly") {
  InitialDataSpec spec;
  spec.amplitude = 7.0;
  const auto dir = std::filesystem::temp_directory_path() / "decaylab_unit_io";
  std::filesystem::create_directories(dir);
  for (const FieldSnapshot& s : {build_bump_data(spec, RadialGrid::with_points(1.0, 33)),
                                 build_bump_data(spec, CartesianGrid3::make(1.0, 17))}) {
    const auto path = dir / "field.bin";
    write_field_binary(s, path);
    const FieldSnapshot back = read_field_binary(path);
    CHECK(back.time() == s.time());
    CHECK(back.frame() == s.frame());
    CHECK(back.is_radial() == s.is_radial());
    CHECK(back.grid() == s.grid());
    bool same = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
      same = same && back.value()[i] == s.value()[i] && back.rate()[i] == s.rate()[i] &&
             back.mask()[i] == s.mask()[i];
    }
    CHECK(same);
  }
  std::ofstream(dir / "junk.bin") << "not a field\n";
  CHECK_THROWS_AS(read_field_binary(dir / "junk.bin"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("CSV snapshot layout") {
  const FieldSnapshot s = radial_poly(1.0, [](double r) { return r; }, 3, 1.0);
  std::ostringstream out;
  write_snapshot_csv(s, out);
  CHECK(out.str() == "r,value,rate,mask\n0,0,0,1\n0.5,0.5,1,1\n1,1,2,0\n");
}

TEST_CASE("worldline probes interpolate in time and report exclusions") {
  std::vector<FieldSnapshot> series;
  series.push_back(radial_poly(1.0, [](double r) { return 1.0 + r; }));
  series.push_back(radial_poly(2.0, [](double r) { return 3.0 + r; }));
  const std::vector<SpacetimePoint> line{{1.25, {0.5, 0.0, 0.0}}, {1.5, {0.0, 0.0, 0.0}},
                                         {1.5, {5.0, 0.0, 0.0}}, {3.0, {0.0, 0.0, 0.0}}};
  const WorldlineSeries w = probe_field(series, line);
  REQUIRE(w.values.size() == 2);
  CHECK(w.values[0] == doctest::Approx(2.0));
  CHECK(w.values[1] == doctest::Approx(2.0));
  CHECK(w.excluded.size() == 2);
  for (const auto& e : w.excluded) CHECK_FALSE(e.reason.empty());
}
