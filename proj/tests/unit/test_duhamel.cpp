#include <doctest.h>

#include <cmath>
#include <vector>

#include "decaylab/duhamel.hpp"
#include "decaylab/errors.hpp"
#include "oracles.hpp"

using namespace decaylab;

TEST_CASE("Kirchhoff solution agrees with d'Alembert for centred data") {
  InitialDataSpec spec;
  spec.amplitude = 3.0;
  const oracle::RadialFreeWave exact{3.0};
  for (const double t : {1.1, 1.3, 1.45, 1.7, 2.0}) {
    for (const double r : {0.0, 0.2, 0.6, 0.9, 1.2}) {
      const double ref = exact(t, r);
      const double got = free_solution_kirchhoff(spec, {t, {0.0, r, 0.0}});
      CHECK(got == doctest::Approx(ref).epsilon(1e-9).scale(1e-3));
    }
  }
  CHECK_THROWS_AS(free_solution_kirchhoff(spec, {1.0, {0.0, 0.0, 0.0}}), DomainError);
}

TEST_CASE("off-centre free solution: strong Huygens and translation") {
  InitialDataSpec spec;
  spec.amplitude = 1.0;
  spec.support_radius = 0.3;
  spec.center = {0.1, 0.0, 0.05};
  InitialDataSpec centred = spec;
  centred.center = {0.0, 0.0, 0.0};
  const Vec3 x{0.4, -0.2, 0.3};
  CHECK(free_solution_kirchhoff(spec, {1.5, x}) ==
        doctest::Approx(free_solution_kirchhoff(centred, {1.5, x - spec.center})));
  for (double t = 1.0 + 0.3 + norm(spec.center) + 1e-3; t < 30.0; t += 0.37) {
    CHECK(free_solution_kirchhoff(spec, {t, {0.0, 0.0, 0.0}}) == 0.0);
  }
}

TEST_CASE("retarded potentials of polynomial sources") {
  // Box u = f with zero data at t = 1:
  //   f = 1    -> u = (t-1)^2/2
  //   f = s    -> u = t^3/6 - t/2 + 1/3
  //   f = r^2  -> u = (t-1)^2 r^2/2 + (t-1)^4/4
  struct Case {
    std::function<double(double, double)> f;
    std::function<double(double, double)> u;
  };
  const std::vector<Case> cases{
      {[](double, double) { return 1.0; }, [](double t, double) { return 0.5 * (t - 1) * (t - 1); }},
      {[](double s, double) { return s; }, [](double t, double) { return t * t * t / 6 - t / 2 + 1.0 / 3; }},
      {[](double, double r) { return r * r; },
       [](double t, double r) { return 0.5 * (t - 1) * (t - 1) * r * r + std::pow(t - 1, 4) / 4; }},
  };
  for (const auto& c : cases) {
    RadialSource rs;
    rs.f = c.f;
    GeneralSource gs;
    gs.f = [f = c.f](double s, const Vec3& y) { return f(s, norm(y)); };
    for (const SpacetimePoint pt : {SpacetimePoint{2.0, {0.0, 0.0, 0.0}},
                                    SpacetimePoint{3.0, {0.7, 0.0, 0.0}},
                                    SpacetimePoint{2.5, {0.0, 2.0, 0.0}}}) {
      const double ref = c.u(pt.t, pt.radius());
      const QuadratureResult a = retarded_potential(rs, pt);
      const QuadratureResult b = retarded_potential_shell(gs, pt);
      CHECK(a.converged);
      CHECK(a.value == doctest::Approx(ref).epsilon(1e-3));
      CHECK(b.value == doctest::Approx(ref).epsilon(1e-3));
      QuadratureOptions tight;
      tight.tolerance = 1e-7;
      tight.max_level = 16;
      const QuadratureResult c = retarded_potential(rs, pt, tight);
      CHECK(c.converged);
      CHECK(c.value == doctest::Approx(ref).epsilon(1e-6));
    }
  }
}

TEST_CASE("weight function is cut to the forward cone") {
  const WeightFunction w{3.0, 3.0, 1.0};
  CHECK(w(2.0, 3.0) == 0.0);
  CHECK(w(0.5, 0.0) == 0.0);
  CHECK(w(2.0, 1.0) == doctest::Approx(std::pow(4.0, -3.0) * std::pow(2.0, -3.0)));
}

TEST_CASE("decay lemma ratio stays bounded on the lattice") {
  const auto lattice = lemma_sample_lattice(6);
  CHECK(lattice.size() == 18);
  for (const auto& q : lattice) {
    CHECK(q.t >= 1.0);
    CHECK(q.t <= 100.0 + 1e-9);
  }
  const LemmaTable tab = decay_lemma_ratio(Power::duhamel(3.0), lattice);
  CHECK(tab.all_converged);
  CHECK(tab.max_ratio > 0.0);
  CHECK(tab.max_ratio < 1.0);
  for (const auto& row : tab.rows) CHECK(row.ratio <= tab.max_ratio);
}

TEST_CASE("improved bound check flags violations") {
  InitialDataSpec spec;
  const std::vector<SpacetimePoint> pts{{5.0, {0.0, 0.0, 0.0}}, {5.0, {3.5, 0.0, 0.0}}};
  const BoundReport ok = improved_bound_check(0.1, Power::scenario(3.0), spec, pts, {0.0, 0.0});
  CHECK(ok.ok);
  CHECK(ok.rows.size() == 2);
  for (const auto& r : ok.rows) CHECK(r.bound == doctest::Approx(r.duhamel + r.chi));
  const BoundReport bad = improved_bound_check(0.1, Power::scenario(3.0), spec, pts, {1.0, 0.0});
  CHECK_FALSE(bad.ok);
  CHECK_FALSE(bad.failure.empty());
  CHECK_THROWS_AS(improved_bound_check(0.1, Power::scenario(3.0), spec, pts, {0.0}), ConfigError);
}
