#include <doctest.h>

#include <cmath>
#include <random>

#include "decaylab/conformal.hpp"
#include "decaylab/errors.hpp"

using namespace decaylab;

namespace {

SpacetimePoint random_in_cone(std::mt19937_64& rng, double sign) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> frac(0.05, 0.95);
  const Vec3 x{u(rng), u(rng), u(rng)};
  const double r = norm(x);
  return {sign * (r / frac(rng) + 0.01), x};
}

// Box f = f_tt - Laplacian f by centred differences.
double box_fd(const ScalarField& f, const SpacetimePoint& q, double h) {
  auto shifted = [&](int axis, double d) {
    SpacetimePoint s = q;
    if (axis == 0) s.t += d; else s.x[axis - 1] += d;
    return f(s);
  };
  const double f0 = f(q);
  double out = (shifted(0, h) - 2.0 * f0 + shifted(0, -h)) / (h * h);
  for (int a = 1; a <= 3; ++a) out -= (shifted(a, h) - 2.0 * f0 + shifted(a, -h)) / (h * h);
  return out;
}

}  // namespace

TEST_CASE("map exchanges the cones and is an involution") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 500; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const SpacetimePoint q = random_in_cone(rng, sign);
    const SpacetimePoint img = phi_map(q);
    CHECK(in_region(img, sign > 0 ? ConeRegion::backward : ConeRegion::forward));
    const SpacetimePoint back = phi_map(img);
    CHECK(back.t == doctest::Approx(q.t).epsilon(1e-12));
    for (int a = 0; a < 3; ++a) CHECK(back.x[a] == doctest::Approx(q.x[a]).epsilon(1e-12));
    CHECK(conformal_factor(q) * conformal_factor(img) == doctest::Approx(1.0).epsilon(1e-12));
    const NullCoords n = null_coords(q);
    const NullCoords m = null_coords(img);
    CHECK(m.u == doctest::Approx(-1.0 / n.u).epsilon(1e-12));
    CHECK(m.v == doctest::Approx(-1.0 / n.v).epsilon(1e-12));
  }
}

TEST_CASE("map is undefined on and outside the null cone") {
  CHECK_THROWS_AS(phi_map({1.0, {1.0, 0.0, 0.0}}), DomainError);
  CHECK_THROWS_AS(phi_map({0.5, {0.0, 1.0, 0.0}}), DomainError);
  CHECK_THROWS_AS(conformal_factor({0.0, {0.0, 0.0, 0.0}}), DomainError);
}

TEST_CASE("region membership") {
  CHECK(in_region({2.0, {1.0, 0.0, 0.0}}, ConeRegion::forward));
  CHECK(in_region({-0.5, {0.2, 0.0, 0.0}}, ConeRegion::q_region));
  CHECK_FALSE(in_region({-1.5, {0.2, 0.0, 0.0}}, ConeRegion::q_region));
  CHECK_FALSE(in_region({-0.5, {0.6, 0.0, 0.0}}, ConeRegion::backward));
}

TEST_CASE("analytic Jacobian agrees with finite differences") {
  std::mt19937_64 rng(5);
  const double h = 1e-6;
  for (int k = 0; k < 40; ++k) {
    const SpacetimePoint q = random_in_cone(rng, k % 2 ? 1.0 : -1.0);
    const Jacobian4 J = phi_map_jacobian(q);
    for (int nu = 0; nu < 4; ++nu) {
      SpacetimePoint a = q;
      SpacetimePoint b = q;
      if (nu == 0) { a.t += h; b.t -= h; } else { a.x[nu - 1] += h; b.x[nu - 1] -= h; }
      const SpacetimePoint ia = phi_map(a);
      const SpacetimePoint ib = phi_map(b);
      const double scale = 1.0 + std::abs(J[0][0]);
      CHECK(std::abs((ia.t - ib.t) / (2 * h) - J[0][nu]) < 1e-5 * scale);
      for (int mu = 1; mu < 4; ++mu) {
        CHECK(std::abs((ia.x[mu - 1] - ib.x[mu - 1]) / (2 * h) - J[mu][nu]) < 1e-5 * scale);
      }
    }
  }
}

TEST_CASE("coefficient and its time derivative") {
  const SpacetimePoint q{-0.6, {0.1, 0.2, 0.0}};
  const double d = q.interval();
  for (const double p : {3.0, 3.5, 4.0, 4.5}) {
    const Coefficient c = coefficient_c(q, Power::scenario(p));
    CHECK(c.c == doctest::Approx(std::pow(d, p - 3.0)));
    const double h = 1e-6;
    const double fd = (std::pow((q.t + h) * (q.t + h) - 0.05, p - 3.0) -
                       std::pow((q.t - h) * (q.t - h) - 0.05, p - 3.0)) / (2 * h);
    CHECK(c.dt_c == doctest::Approx(fd).epsilon(1e-6));
    CHECK(clamped_coefficient(q.t, 0.05, p) == doctest::Approx(c.c));
    CHECK(clamped_coefficient(-0.1, 0.05, p) == (p == 3.0 ? 1.0 : 0.0));
  }
  CHECK(coefficient_c(q, Power::scenario(3.0)).dt_c == 0.0);
  CHECK_THROWS_AS(coefficient_c({0.6, {0.1, 0.0, 0.0}}, Power::scenario(3.0)), DomainError);
  CHECK_THROWS_AS(coefficient_c(q, Power::scenario(3.0), 1.0), DomainError);
}

TEST_CASE("field transforms invert each other") {
  const ScalarField phi = [](const SpacetimePoint& p) { return std::sin(p.t) * std::exp(-p.x[0] * p.x[0]); };
  const ScalarField round = to_physical(to_compactified(phi));
  std::mt19937_64 rng(8);
  for (int k = 0; k < 50; ++k) {
    const SpacetimePoint p = random_in_cone(rng, 1.0);
    CHECK(round(p) == doctest::Approx(phi(p)).epsilon(1e-11));
  }
}

TEST_CASE("a free wave maps to a free wave") {
  // Box(t + 2 x0 + t^2 + x1^2 + x1 x2) = 2 - 2 = 0.
  const ScalarField wave = [](const SpacetimePoint& q) {
    return q.t + 2.0 * q.x[0] + q.t * q.t + q.x[1] * q.x[1] + q.x[1] * q.x[2];
  };
  CHECK(std::abs(box_fd(wave, {-0.5, {0.1, 0.1, 0.1}}, 1e-3)) < 1e-6);
  const ScalarField phi = to_physical(wave);
  for (const SpacetimePoint p : {SpacetimePoint{2.0, {0.3, 0.2, -0.1}}, SpacetimePoint{3.0, {1.0, 0.5, 0.2}}}) {
    const double scale = std::abs(phi(p)) + 1e-3;
    CHECK(std::abs(box_fd(phi, p, 1e-3)) < 1e-4 * scale);
  }
}

TEST_CASE("pullback jet agrees with finite differences of the transform") {
  const ScalarField phi = [](const SpacetimePoint& p) {
    return std::exp(-0.1 * p.t) * (1.0 + p.x[0] - 0.5 * p.x[1] * p.x[2]);
  };
  const ScalarField psi = to_compactified(phi);
  const SpacetimePoint q{-0.7, {0.2, -0.1, 0.3}};
  const SpacetimePoint img = phi_map(q);
  const double h = 1e-6;
  auto d = [&](const ScalarField& f, const SpacetimePoint& at, int axis) {
    SpacetimePoint a = at, b = at;
    if (axis == 0) { a.t += h; b.t -= h; } else { a.x[axis - 1] += h; b.x[axis - 1] -= h; }
    return (f(a) - f(b)) / (2 * h);
  };
  FieldJet at_image{phi(img), d(phi, img, 0), {d(phi, img, 1), d(phi, img, 2), d(phi, img, 3)}};
  const FieldJet j = transform_jet_to_compactified(q, at_image);
  CHECK(j.value == doctest::Approx(psi(q)).epsilon(1e-10));
  CHECK(j.dt == doctest::Approx(d(psi, q, 0)).epsilon(1e-5));
  for (int a = 0; a < 3; ++a) CHECK(j.grad[a] == doctest::Approx(d(psi, q, a + 1)).epsilon(1e-5));
}

TEST_CASE("identity residual is second order in the step") {
  const ScalarField g = [](const SpacetimePoint& q) {
    const double dt = q.t + 0.5;
    return std::exp(-(dt * dt + dot(q.x, q.x)) / 0.08);
  };
  const SpacetimePoint pt{2.0, {0.3, 0.2, -0.1}};
  const double r1 = std::abs(conformal_identity_residual(g, pt, 1e-2).residual);
  const double r2 = std::abs(conformal_identity_residual(g, pt, 5e-3).residual);
  CHECK(std::log2(r1 / r2) == doctest::Approx(2.0).epsilon(0.05));
  CHECK_THROWS_AS(conformal_identity_residual(g, {1.0, {0.999, 0.0, 0.0}}, 1e-2), DomainError);
}

TEST_CASE("Morawetz field pulls back to the time translation") {
  CHECK(morawetz_pullback_check({2.0, {0.5, 0.1, -0.3}}) < 1e-5);
  const auto z = morawetz_field({2.0, {1.0, 0.0, 0.0}});
  CHECK(z[0] == doctest::Approx(5.0));
  CHECK(z[1] == doctest::Approx(4.0));
}
