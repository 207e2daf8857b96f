// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "decaylab/analysis.hpp"
#include "decaylab/conformal.hpp"
#include "decaylab/diagnostics.hpp"
#include "decaylab/duhamel.hpp"
#include "decaylab/handoff.hpp"
#include "decaylab/initial_data.hpp"
#include "decaylab/sampling.hpp"
#include "decaylab/solver_cart3d.hpp"
#include "decaylab/solver_radial.hpp"

using namespace decaylab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------- shared runs

struct CompactRun {
  FieldSnapshot data;
  RadialRun run;
};

CompactRun compact_pipeline(double amplitude, double p, double physical_h, std::size_t nc,
                            double t_end, std::size_t stride, std::vector<double> probes = {}) {
  InitialDataSpec spec;
  spec.amplitude = amplitude;
  const Power pw = Power::scenario(p);
  const FieldSnapshot data = build_bump_data(spec, RadialGrid::with_spacing(3.0, physical_h));
  const double hc = 1.0 / static_cast<double>(nc - 1);
  const RadialGrid target = RadialGrid::with_points(1.0 + 16.0 * hc, nc + 16);
  HandoffSettings hs;
  hs.physical_spacing = physical_h;
  hs.truncation_radius = 0.95;
  hs.taper_start = 0.9;
  FieldSnapshot handoff = radial_handoff(data, pw, target, hs);
  CompactifiedRadialOptions o;
  o.t_end = t_end;
  o.output_stride = stride;
  o.probe_radii = std::move(probes);
  RadialRun run = evolve_compactified_radial(handoff, pw, o);
  return {std::move(handoff), std::move(run)};
}

struct Cart3dSummary {
  std::size_t n = 0;
  double drift = 0.0;
  double weak_sup = 0.0;
  double boundary = 0.0;
  std::vector<double> t;
  std::vector<double> origin;
  bool done = false;
};

InitialDataSpec cart_spec() {
  InitialDataSpec spec;
  spec.amplitude = 1000.0;
  spec.support_radius = 0.4;
  spec.center = {0.08, 0.04, 0.02};
  return spec;
}

Cart3dSummary& cart_run(std::size_t n) {
  static std::array<Cart3dSummary, 2> cache;
  Cart3dSummary& s = cache[n == 257 ? 0 : 1];
  if (s.done) return s;
  const Power p = Power::scenario(3.0);
  const FieldSnapshot data = build_bump_data(cart_spec(), CartesianGrid3::make(12.0, n));
  Cart3dOptions o;
  o.t_end = 12.0;
  o.cfl = 0.25;
  o.output_stride = 16;
  o.probe_points = {{0.0, 0.0, 0.0}};
  double e0 = -1.0;
  o.sink = [&](const FieldSnapshot& snap) {
    const double e = total_energy(snap, p).total;
    if (e0 < 0.0) e0 = e;
    s.drift = std::max(s.drift, std::abs(e - e0) / e0);
    s.weak_sup = std::max(
        s.weak_sup, weighted_sup_constant(std::span(&snap, 1), p, WeightKind::weak).value);
  };
  const Cart3dRun run = evolve_physical_3d(data, p, o);
  s.n = n;
  s.boundary = run.boundary_layer_max;
  s.t = run.probes.times;
  for (const auto& v : run.probes.values) s.origin.push_back(v[0]);
  s.done = true;
  return s;
}

// ---------------------------------------------------------------- criteria

Verdict criterion1() {
  const ScalarField gaussian = [](const SpacetimePoint& q) {
    const double dt = q.t + 0.5;
    return std::exp(-(dt * dt + dot(q.x, q.x)) / 0.08);
  };
  const std::vector<SpacetimePoint> pts{{2.0, {0.3, 0.2, -0.1}},
                                        {3.0, {1.0, 0.5, 0.0}},
                                        {1.5, {0.2, 0.0, 0.4}},
                                        {2.5, {-0.6, 0.3, 0.8}},
                                        {4.0, {0.5, -1.5, 1.0}}};
  std::vector<double> res;
  for (const double step : {1e-2, 5e-3, 2.5e-3}) {
    double worst = 0.0;
    for (const auto& pt : pts) {
      worst = std::max(worst, std::abs(conformal_identity_residual(gaussian, pt, step).residual));
    }
    res.push_back(worst);
  }
  const double o1 = std::log2(res[0] / res[1]);
  const double o2 = std::log2(res[1] / res[2]);
  const double order = std::min(o1, o2);
  return {order >= 1.8, fmt("residuals %.3e", res[0]) + fmt(" %.3e", res[1]) +
                            fmt(" %.3e", res[2]) + fmt(", order %.3f (>= 1.8)", order)};
}

Verdict criterion2() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  const auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
  for (int k = 0; k < 1000; ++k) {
    const Vec3 x{unit(rng), unit(rng), unit(rng)};
    const double r = norm(x);
    const double mag = r + 1e-3 + (2.0 * r + 1.0) * 0.5 * (unit(rng) + 1.0);
    const SpacetimePoint q{k % 2 == 0 ? mag : -mag, x};
    const SpacetimePoint img = phi_map(q);
    const SpacetimePoint back = phi_map(img);
    const double scale = std::max(std::abs(q.t), norm(q.x));
    worst = std::max(worst, std::abs(back.t - q.t) / scale);
    for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(back.x[a] - q.x[a]) / scale);
    worst = std::max(worst, rel(conformal_factor(q) * conformal_factor(img), 1.0));
    const NullCoords n = null_coords(q);
    const NullCoords m = null_coords(img);
    worst = std::max(worst, rel(m.u, -1.0 / n.u));
    worst = std::max(worst, rel(m.v, -1.0 / n.v));
  }
  return {worst <= 1e-12, fmt("max relative error %.3e over 1000 points (<= 1e-12)", worst)};
}

Verdict criterion3() {
  InitialDataSpec spec;
  spec.amplitude = 10.0;
  const Power p = Power::scenario(3.0);
  const double h = 1.0 / 256.0;
  const FieldSnapshot data = build_bump_data(spec, RadialGrid::with_spacing(50.0 + 8.0 * h, h));
  RadialEvolutionOptions o;
  o.t_end = 50.0;
  o.output_stride = 256;
  double e0 = -1.0;
  double drift = 0.0;
  o.keep_snapshots = false;
  o.sink = [&](const FieldSnapshot& s) {
    const double e = total_energy(s, p).total;
    if (e0 < 0.0) e0 = e;
    drift = std::max(drift, std::abs(e - e0) / e0);
  };
  evolve_physical_radial(data, p, o);
  const Cart3dSummary& c = cart_run(257);
  return {drift < 0.01 && c.drift < 0.03,
          fmt("radial drift %.3e (< 1e-2)", drift) + fmt(", 3D n=257 drift %.3e (< 3e-2)", c.drift)};
}

Verdict criterion4() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SpacetimePoint> apexes;
  for (int k = 0; k < 20; ++k) {
    const double t = -0.9 + 0.8 * u(rng);
    const double r = 0.8 * (-t) * u(rng);
    const double mu = 2.0 * u(rng) - 1.0;
    const double az = 2.0 * M_PI * u(rng);
    const double st = std::sqrt(1.0 - mu * mu);
    apexes.push_back({t, {r * st * std::cos(az), r * st * std::sin(az), r * mu}});
  }
  const ConeQuadrature quad{48, 32, 48};
  for (const double p : {3.0, 4.0}) {
    const Power pw = Power::scenario(p);
    std::vector<double> residual;
    double worst_ratio = 0.0;
    for (const std::size_t nc : {251, 501, 1001}) {
      const CompactRun cr = compact_pipeline(100.0, p, 1.0 / 256.0, nc, -0.05, 4);
      const double e0 = e0_initial_energy(cr.data, pw);
      double worst_res = 0.0;
      for (const auto& a : apexes) {
        const DivergenceBalance b = divergence_residual(cr.run.snapshots, a, pw, quad);
        worst_ratio = std::max(worst_ratio, b.flux / e0);
        worst_res = std::max(worst_res, b.residual / e0);
      }
      residual.push_back(worst_res);
    }
    const double order = std::log2(residual[1] / residual[2]);
    const bool pass = worst_ratio <= 1.05 && order >= 1.0;
    ok = ok && pass;
    detail += fmt("p=%.0f: ", p) + fmt("max Flux/E0 %.4f (<= 1.05)", worst_ratio) +
              fmt(", Stokes residual %.2e", residual[1]) + fmt(" -> %.2e", residual[2]) +
              fmt(" order %.2f (>= 1); ", order);
  }
  return {ok, detail};
}

Verdict criterion5() {
  const CompactRun cr = compact_pipeline(10.0, 3.0, 1.0 / 512.0, 2001, -0.01, 8);
  const std::vector<double> sup = running_sup(cr.run.snapshots);
  double lo = INFINITY;
  double hi = 0.0;
  for (std::size_t k = 0; k < sup.size(); ++k) {
    const double t = cr.run.snapshots[k].time();
    if (t < -0.5 || t > -0.05) continue;
    lo = std::min(lo, sup[k]);
    hi = std::max(hi, sup[k]);
  }
  const double variation = (hi - lo) / hi;
  return {variation < 0.05, fmt("running sup %.6e", hi) + fmt(", variation %.3e on t~ in [-0.5, -0.05] (< 5e-2)", variation)};
}

Verdict criterion6() {
  bool ok = true;
  std::string detail;
  for (const double p : {3.0, 4.0}) {
    std::vector<double> sups;
    for (int lev = 0; lev < 2; ++lev) {
      const double h = 1.0 / (256.0 * (1 << lev));
      const std::size_t nc = (1000u << lev) + 1;
      const CompactRun cr = compact_pipeline(10.0, p, h, nc, -0.01, 4u << lev);
      sups.push_back(weighted_sup_constant(cr.run.snapshots, Power::scenario(p), WeightKind::weak).value);
    }
    const double change = std::abs(sups[1] - sups[0]) / sups[1];
    const bool pass = std::isfinite(sups[1]) && change < 0.1;
    ok = ok && pass;
    detail += fmt("radial p=%.0f: ", p) + fmt("sup %.6e", sups[1]) + fmt(" change %.2e; ", change);
  }
  const Cart3dSummary& a = cart_run(257);
  const Cart3dSummary& b = cart_run(385);
  const double change = std::abs(b.weak_sup - a.weak_sup) / b.weak_sup;
  ok = ok && std::isfinite(b.weak_sup) && change < 0.1;
  detail += fmt("3D: sup %.6e", b.weak_sup) + fmt(" change %.2e (all < 0.1)", change);
  return {ok, detail};
}

Verdict criterion7() {
  bool ok = true;
  std::string detail;
  // Fixed x = 0 through the compactified long-time path.
  struct Case {
    double p, amplitude, h;
    std::size_t nc;
    double tol;
  };
  for (const Case c : {Case{3.0, 1000.0, 1.0 / 1024.0, 4001, 0.15},
                       Case{4.0, 2000.0, 1.0 / 2048.0, 8001, 0.25}}) {
    const CompactRun cr = compact_pipeline(c.amplitude, c.p, c.h, c.nc, -0.004, 0, {0.0});
    std::vector<double> tt;
    std::vector<double> psi;
    for (std::size_t k = 0; k < cr.run.probes.times.size(); ++k) {
      tt.push_back(cr.run.probes.times[k]);
      psi.push_back(cr.run.probes.values[k][0]);
    }
    const TimeSeries s = origin_series_to_physical(tt, psi);
    const DecayFit f = fit_power_law(s.t, s.y, {20.0, 200.0});
    const bool pass = std::abs(f.exponent - (c.p - 1.0)) <= c.tol;
    ok = ok && pass;
    detail += fmt("fixed-x p=%.0f: ", c.p) + fmt("%.4f", f.exponent) + fmt(" (target %.0f", c.p - 1.0) +
              fmt(" +- %.2f)", c.tol) + (pass ? "" : " out of range") + "; ";
  }
  // Light-cone shell v = 1 (middle of the outgoing shell).
  {
    InitialDataSpec spec;
    spec.amplitude = 10.0;
    const double h = 1.0 / 128.0;
    const FieldSnapshot data = build_bump_data(spec, RadialGrid::with_spacing(45.0, h));
    RadialEvolutionOptions o;
    o.t_end = 42.0;
    o.output_stride = 16;
    const RadialRun run = evolve_physical_radial(data, Power::scenario(3.0), o);
    const DecayFit f = fit_lightcone_decay(run.snapshots, 1.0, {10.0, 80.0});
    const bool pass = std::abs(f.exponent - 1.0) <= 0.2;
    ok = ok && pass;
    detail += fmt("light cone: %.4f (target 1 +- 0.2)", f.exponent) + (pass ? "" : " out of range") + "; ";
  }
  // 3D, p = 3, fixed x = 0 on t in [2, 12].
  {
    const Cart3dSummary& c = cart_run(385);
    const DecayFit f = fit_power_law(c.t, c.origin, {2.0, 12.0});
    const bool pass = std::abs(f.exponent - 2.0) <= 0.3;
    ok = ok && pass;
    detail += fmt("3D n=385: %.4f", f.exponent) + fmt(" rms %.2f", f.rms_residual) +
              " (target 2 +- 0.3)" + (pass ? "" : " out of range");
    // Same window on a fine radial run of the centred bump, for reference.
    InitialDataSpec spec = cart_spec();
    spec.center = {0.0, 0.0, 0.0};
    const double h = 1.0 / 512.0;
    RadialEvolutionOptions o;
    o.t_end = 12.0;
    o.probe_radii = {0.0};
    const RadialRun run = evolve_physical_radial(
        build_bump_data(spec, RadialGrid::with_spacing(12.0, h)), Power::scenario(3.0), o);
    std::vector<double> y;
    for (const auto& v : run.probes.values) y.push_back(v[0]);
    const DecayFit ref = fit_power_law(run.probes.times, y, {2.0, 12.0});
    detail += fmt(" [radial h=1/512 reference on the same window: %.4f]", ref.exponent);
  }
  return {ok, detail};
}

Verdict criterion8() {
  bool ok = true;
  std::string detail;
  const auto lattice = lemma_sample_lattice(24);
  QuadratureOptions base;
  QuadratureOptions doubled = base;
  doubled.min_level = base.min_level + 1;
  doubled.max_level = base.max_level + 1;
  doubled.tolerance = base.tolerance / 4.0;
  for (const double p : {2.5, 3.0, 4.0}) {
    const LemmaTable a = decay_lemma_ratio(Power::duhamel(p), lattice, base);
    const LemmaTable b = decay_lemma_ratio(Power::duhamel(p), lattice, doubled);
    const double change = std::abs(b.max_ratio - a.max_ratio) / b.max_ratio;
    const bool pass = std::isfinite(b.max_ratio) && change < 0.05 && b.all_converged;
    ok = ok && pass;
    detail += fmt("p=%.1f: ", p) + fmt("max R %.5f", b.max_ratio) + fmt(" change %.2e; ", change);
  }
  // Radial top-hat: 1 on s in [1, 2], |y| <= 1/2.
  RadialSource radial;
  radial.f = [](double s, double r) { return (s >= 1.0 && s <= 2.0 && r <= 0.5) ? 1.0 : 0.0; };
  radial.support_radius = [](double) { return 0.5; };
  radial.s_min = 1.0;
  radial.s_max = 2.0;
  GeneralSource shell;
  shell.f = [](double s, const Vec3& y) {
    return (s >= 1.0 && s <= 2.0 && norm(y) <= 0.5) ? 1.0 : 0.0;
  };
  shell.support_radius = radial.support_radius;
  shell.s_min = 1.0;
  shell.s_max = 2.0;
  double worst = 0.0;
  QuadratureOptions fine;
  fine.max_level = 9;
  for (const SpacetimePoint pt : {SpacetimePoint{2.5, {1.0, 0.0, 0.0}},
                                  SpacetimePoint{2.5, {0.0, 0.5, 0.0}},
                                  SpacetimePoint{2.0, {0.0, 0.0, 0.3}}}) {
    const double a = retarded_potential(radial, pt).value;
    const double b = retarded_potential_shell(shell, pt, fine).value;
    worst = std::max(worst, std::abs(a - b) / std::abs(a));
  }
  ok = ok && worst <= 0.005;
  detail += fmt("top-hat radial vs shell %.2e (<= 5e-3)", worst);
  return {ok, detail};
}

Verdict criterion9() {
  InitialDataSpec spec;
  spec.amplitude = 10.0;
  const double h = 1.0 / 128.0;
  const double t_min = 1.0 + spec.support_radius + 2.0 * h;
  double worst = 0.0;
  for (int k = 1; k <= 2000; ++k) {
    const double t = t_min + (100.0 - t_min) * k / 2000.0;
    worst = std::max(worst, std::abs(free_solution_kirchhoff(spec, {t, {0.0, 0.0, 0.0}})));
  }
  std::array<double, 2> sup{};
  for (int lev = 0; lev < 2; ++lev) {
    const double dr = h / (1 << lev);
    for (const double t : {2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
      double m = 0.0;
      for (double r = std::max(0.0, t - 1.0 - spec.support_radius - dr);
           r <= t - 1.0 + spec.support_radius + dr; r += dr) {
        m = std::max(m, std::abs(free_solution_kirchhoff(spec, {t, {r, 0.0, 0.0}})));
      }
      sup[lev] = std::max(sup[lev], t * m);
    }
  }
  const double change = std::abs(sup[1] - sup[0]) / sup[1];
  return {worst <= 1e-10 && change < 0.01,
          fmt("max |chi(t,0)| for t > 1 + alpha + 2h: %.3e (<= 1e-10)", worst) +
              fmt("; sup |chi| t = %.6e", sup[1]) + fmt(", refinement change %.2e (< 1e-2)", change)};
}

Verdict criterion10() {
  InitialDataSpec spec;
  spec.amplitude = 10.0;
  const Power p = Power::scenario(3.0);
  const double h = 1.0 / 512.0;
  RadialEvolutionOptions o;
  o.t_end = 50.0;
  o.output_stride = 128;
  const RadialRun run =
      evolve_physical_radial(build_bump_data(spec, RadialGrid::with_spacing(50.5, h)), p, o);
  const double c_hat = weighted_sup_constant(run.snapshots, p, WeightKind::strong).value;
  std::vector<const FieldSnapshot*> use;
  for (const auto& s : run.snapshots) {
    if (s.time() >= 2.0 && s.time() <= 50.0) use.push_back(&s);
  }
  std::vector<SpacetimePoint> pts;
  std::vector<double> measured;
  for (std::size_t k = 0; k < 50; ++k) {
    const FieldSnapshot& s = *use[(k * use.size()) / 50];
    const double t = s.time();
    const std::array<double, 5> radii{0.0, 0.5 * (t - 1.0), t - 1.25, t - 1.0, t - 0.75};
    const double r = std::round(radii[k % 5] / h) * h;
    pts.push_back({t, {r, 0.0, 0.0}});
    measured.push_back(sample_field(s, pts.back()));
  }
  const BoundReport rep = improved_bound_check(c_hat, p, spec, pts, measured);
  std::size_t below = 0;
  for (const auto& row : rep.rows) below += row.ok ? 1 : 0;
  return {rep.ok && below == 50, fmt("C^ = %.6f", c_hat) + ", " + std::to_string(below) +
                                     "/50 points below the bound" +
                                     (rep.ok ? "" : "; first violation: " + rep.failure)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                       criterion5, criterion6, criterion7, criterion8,
                                                       criterion9, criterion10};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && v.pass;
    std::printf("criterion %2d: %s  %s  [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return all ? 0 : 3;
}
