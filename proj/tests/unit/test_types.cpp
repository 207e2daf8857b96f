#include <doctest.h>

#include <cmath>
#include <random>

#include "decaylab/errors.hpp"
#include "decaylab/grid.hpp"
#include "decaylab/types.hpp"

using namespace decaylab;

TEST_CASE("null coordinates round trip") {
  const NullCoords n = null_coords({3.0, {0.0, 1.2, 1.6}});
  CHECK(n.u == doctest::Approx(5.0));
  CHECK(n.v == doctest::Approx(1.0));
  const TimeRadius tr = from_null(n);
  CHECK(tr.t == doctest::Approx(3.0));
  CHECK(tr.r == doctest::Approx(2.0));
}

TEST_CASE("power ranges") {
  CHECK_NOTHROW(Power::scenario(3.0));
  CHECK_NOTHROW(Power::scenario(4.9));
  CHECK_THROWS_AS(Power::scenario(2.99), ConfigError);
  CHECK_THROWS_AS(Power::scenario(5.0), ConfigError);
  CHECK_NOTHROW(Power::duhamel(2.5));
  CHECK_THROWS_AS(Power::duhamel(2.0), ConfigError);
  CHECK_THROWS_AS(Power::duhamel(5.0), ConfigError);
  CHECK(Power::scenario(4.0).is_integer());
  CHECK(Power::scenario(4.0).integer_value() == 4);
  CHECK_FALSE(Power::scenario(3.5).is_integer());
}

TEST_CASE("signed powers match std::pow") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> x(-3.0, 3.0);
  for (const double e : {2.5, 3.0, 3.7, 4.0, 4.5}) {
    for (int k = 0; k < 50; ++k) {
      const double v = x(rng);
      const double ref = std::copysign(std::pow(std::abs(v), e), v);
      CHECK(signed_power(v, e) == doctest::Approx(ref).epsilon(1e-13));
      CHECK(abs_power(v, e) == doctest::Approx(std::abs(ref)).epsilon(1e-13));
      const Nonlinearity nl(Power::duhamel(e));
      CHECK(nl(v) == doctest::Approx(ref).epsilon(1e-13));
      CHECK(nl.potential(v) == doctest::Approx(std::pow(std::abs(v), e + 1) / (e + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("frame names") {
  CHECK(frame_from_string(to_string(Frame::compactified)) == Frame::compactified);
  CHECK(frame_from_string("physical") == Frame::physical);
  CHECK_THROWS_AS(frame_from_string("lab"), ConfigError);
}

TEST_CASE("grids") {
  const RadialGrid g = RadialGrid::with_spacing(3.0, 0.07);
  CHECK(g.spacing() <= 0.07);
  CHECK(g.r(g.size() - 1) == doctest::Approx(3.0));
  const RadialGrid w = RadialGrid::with_points(2.0, 5);
  CHECK(w.spacing() == doctest::Approx(0.5));
  const CartesianGrid3 c = CartesianGrid3::make(1.0, 5);
  CHECK(c.coord(0) == doctest::Approx(-1.0));
  CHECK(c.coord(4) == doctest::Approx(1.0));
  CHECK(c.index(1, 2, 3) == 1 + 5 * (2 + 5 * 3));
  CHECK(c.point_count() == 125);
}
