#include "runner.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "checks.hpp"
#include "decaylab/analysis.hpp"
#include "decaylab/diagnostics.hpp"
#include "decaylab/duhamel.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/handoff.hpp"
#include "decaylab/initial_data.hpp"
#include "decaylab/sampling.hpp"
#include "decaylab/solver_cart3d.hpp"
#include "decaylab/solver_radial.hpp"

namespace decaylab::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.3.0";

struct CsvWriter {
  std::ofstream out;
  CsvWriter(const fs::path& path, const std::string& header) : out(path) {
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << header << '\n';
  }
  void row(std::initializer_list<double> values) {
    bool first = true;
    for (const double v : values) {
      if (!first) out << ',';
      out << format_double(v);
      first = false;
    }
    out << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(values[i]);
    }
    out << '\n';
  }
};

json fit_json(const DecayFit& f, double target) {
  return {{"exponent", f.exponent}, {"amplitude", f.amplitude}, {"rms", f.rms_residual},
          {"t_min", f.t_min},        {"t_max", f.t_max},         {"samples", f.samples},
          {"envelope", f.envelope},  {"target", target}};
}

std::vector<SpacetimePoint> random_apexes(std::size_t count, std::uint64_t seed,
                                          double t_latest) {
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng] {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
  };
  std::vector<SpacetimePoint> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = -0.9 + (t_latest + 0.9) * uniform();
    const double r = 0.8 * (-t) * uniform();
    const double mu = 2.0 * uniform() - 1.0;
    const double az = 2.0 * std::numbers::pi * uniform();
    const double st = std::sqrt(1.0 - mu * mu);
    out.push_back({t, {r * st * std::cos(az), r * st * std::sin(az), r * mu}});
  }
  return out;
}

// The +x ray of a cube (origin at the centre node) as a radial snapshot.
FieldSnapshot axis_ray(const FieldSnapshot& cube) {
  const CartesianGrid3& g = cube.cartesian_grid();
  const std::size_t c = (g.size() - 1) / 2;
  const std::size_t n = g.size() - c;
  std::vector<double> value(n), rate(n);
  std::vector<std::uint8_t> mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = g.index(c + i, c, c);
    value[i] = cube.value()[k];
    rate[i] = cube.rate()[k];
    mask[i] = cube.mask()[k];
  }
  return FieldSnapshot(cube.frame(), cube.time(),
                       RadialGrid::with_points(g.coord(g.size() - 1), n), std::move(value),
                       std::move(rate), std::move(mask));
}

struct SupTracker {
  WeightedSup weak;
  WeightedSup strong;
  WeightedSup regular;

  void add(const FieldSnapshot& s, Power p) {
    const auto update = [&](WeightedSup& best, Power q, WeightKind kind) {
      const WeightedSup w = weighted_sup_constant(std::span(&s, 1), q, kind);
      if (w.value > best.value) best = w;
    };
    update(weak, p, WeightKind::weak);
    update(strong, p, WeightKind::strong);
    update(regular, Power::scenario(3.0), WeightKind::strong);
  }
};

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunOutcome run_scenario(const ScenarioConfig& config, std::ostream& log) {
  RunOutcome outcome;
  outcome.directory = config.output_dir;
  fs::create_directories(config.output_dir);
  const fs::path dir = config.output_dir;

  json manifest;
  manifest["scenario"] = config.name;
  manifest["config_hash"] = config.hash;
  manifest["version"] = kVersion;
  manifest["workers"] = config.physical.workers == 0 ? default_worker_count()
                                                      : config.physical.workers;
  manifest["artifacts"] = json::array();
  json summary;
  summary["scenario"] = config.name;
  summary["config_hash"] = config.hash;
  summary["geometry"] = config.geometry == Geometry::radial ? "radial" : "cartesian";
  summary["p"] = config.p;
  summary["amplitude"] = config.data.amplitude;

  std::vector<std::string> artifacts;
  std::string stage_name;
  const auto stage = [&](const std::string& name, const std::function<void()>& body) {
    stage_name = name;
    log << "[" << name << "] " << std::flush;
    const auto start = std::chrono::steady_clock::now();
    body();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    manifest["wall_seconds"][name] = secs;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", secs);
    log << "done in " << buf << " s\n";
  };

  try {
    const Power p = Power::scenario(config.p);
    const bool radial = config.geometry == Geometry::radial;
    std::optional<FieldSnapshot> data;
    std::vector<FieldSnapshot> physical;
    std::vector<FieldSnapshot> compact;
    // Cartesian runs keep only the +x ray of each snapshot; the weighted sups
    // are accumulated over full cubes as they stream past.
    SupTracker cube_sups;
    double spacing = 0.0;

    stage("initial_data", [&] {
      if (radial) {
        const double extent = config.physical.extent > 0.0
                                  ? config.physical.extent
                                  : config.physical.t_end - 1.0 + config.data.support_radius +
                                        8.0 * config.physical.spacing;
        data = build_bump_data(config.data, RadialGrid::with_spacing(extent, config.physical.spacing));
      } else {
        data = build_bump_data(config.data,
                               CartesianGrid3::make(config.physical.extent, config.physical.points));
      }
      spacing = data->spacing();
      summary["resolution"] = spacing;
    });

    stage("evolve_physical", [&] {
      CsvWriter energy(dir / "energy.csv", "t,kinetic,gradient,potential,total");
      double e_start = 0.0;
      double drift = 0.0;
      std::string warning;
      const auto record = [&](const FieldSnapshot& s) {
        const EnergyReport e = total_energy(s, p);
        if (physical.empty()) e_start = e.total;
        if (e_start > 0.0) drift = std::max(drift, std::abs(e.total - e_start) / e_start);
        if (!e.warning.empty() && warning.empty()) warning = e.warning;
        energy.row({e.time, e.kinetic, e.gradient, e.potential, e.total});
        if (s.is_radial()) {
          physical.push_back(s);
        } else {
          cube_sups.add(s, p);
          physical.push_back(axis_ray(s));
        }
      };
      std::vector<double> times;
      std::vector<std::vector<double>> values;
      std::vector<double> radii = config.physical.probe_radii;
      if (radial) {
        RadialEvolutionOptions o;
        o.t_end = config.physical.t_end;
        o.cfl = config.physical.cfl;
        o.output_stride = config.physical.output_every;
        o.keep_snapshots = false;
        o.sink = record;
        o.probe_radii = radii;
        const RadialRun run = evolve_physical_radial(*data, p, o);
        times = run.probes.times;
        values = run.probes.values;
      } else {
        Cart3dOptions o;
        o.t_end = config.physical.t_end;
        o.cfl = config.physical.cfl;
        o.output_stride = config.physical.output_every;
        o.keep_snapshots = false;
        o.sink = record;
        o.workers = config.physical.workers;
        for (const double r : radii) o.probe_points.push_back({r, 0.0, 0.0});
        const Cart3dRun run = evolve_physical_3d(*data, p, o);
        times = run.probes.times;
        values = run.probes.values;
        summary["boundary_layer_max"] = run.boundary_layer_max;
      }
      std::string header = "t";
      for (const double r : radii) header += ",phi_r" + format_double(r);
      CsvWriter probes(dir / "probes.csv", header);
      for (std::size_t k = 0; k < times.size(); ++k) {
        std::vector<double> row{times[k]};
        row.insert(row.end(), values[k].begin(), values[k].end());
        probes.row(row);
      }
      artifacts.insert(artifacts.end(), {"energy.csv", "probes.csv"});
      summary["energy"] = {{"initial", e_start}, {"drift", drift}, {"warning", warning}};
      summary["energy_target"] = radial ? 0.01 : 0.03;

      // Fixed-x fit at the first probe radius from the physical series.
      std::vector<double> y;
      for (const auto& v : values) y.push_back(v.empty() ? 0.0 : v[0]);
      try {
        const DecayFit f = fit_power_law(times, y,
                                         {config.analysis.fit_t_min, config.analysis.fit_t_max},
                                         "r=" + format_double(radii.empty() ? 0.0 : radii[0]));
        summary["fixed_x_fit_physical"] = fit_json(f, config.p - 1.0);
      } catch (const FitError& e) {
        summary["fixed_x_fit_physical"] = {{"error", e.what()}};
      }
      try {
        const DecayFit f = fit_lightcone_decay(
            physical, config.analysis.lightcone_v0,
            {config.analysis.lightcone_u_min, config.analysis.lightcone_u_max});
        summary["lightcone_fit"] = fit_json(f, 1.0);
        summary["lightcone_fit"]["v0"] = config.analysis.lightcone_v0;
      } catch (const std::exception& e) {
        summary["lightcone_fit"] = {{"error", e.what()}};
      }
    });

    if (radial && config.compactified.enabled) {
      stage("handoff", [&] {
        const std::size_t n = config.compactified.points;
        const double h = 1.0 / static_cast<double>(n - 1);
        const RadialGrid target = RadialGrid::with_points(1.0 + 16.0 * h, n + 16);
        HandoffSettings hs;
        hs.physical_spacing = config.compactified.handoff_spacing;
        hs.cfl = config.physical.cfl;
        hs.truncation_radius = config.compactified.truncation;
        hs.taper_start = config.compactified.taper_start;
        InitialDataSpec spec = config.data;
        const FieldSnapshot fine =
            build_bump_data(spec, RadialGrid::with_spacing(3.0, hs.physical_spacing));
        compact.push_back(radial_handoff(fine, p, target, hs));
        summary["e0"] = e0_initial_energy(compact.front(), p);
        summary["compact_resolution"] = h;
      });
      stage("evolve_compactified", [&] {
        CompactifiedRadialOptions o;
        o.t_end = config.compactified.t_end;
        o.cfl = config.compactified.cfl;
        o.output_stride = config.compactified.output_every;
        o.probe_radii = {0.0};
        const FieldSnapshot start = compact.front();
        compact.clear();
        RadialRun run = evolve_compactified_radial(start, p, o);
        compact = std::move(run.snapshots);
        summary["compactified_mask_exhausted"] = run.mask_exhausted;
        CsvWriter origin(dir / "compact_origin.csv", "t_tilde,psi,t,phi");
        std::vector<double> tt;
        std::vector<double> psi;
        for (std::size_t k = 0; k < run.probes.times.size(); ++k) {
          const double tc = run.probes.times[k];
          const double v = run.probes.values[k][0];
          origin.row({tc, v, -1.0 / tc, v * tc * tc});
          tt.push_back(tc);
          psi.push_back(v);
        }
        artifacts.push_back("compact_origin.csv");
        const TimeSeries phys = origin_series_to_physical(tt, psi);
        try {
          const DecayFit f = fit_power_law(
              phys.t, phys.y, {config.analysis.fit_t_min, config.analysis.fit_t_max}, "x=0");
          summary["fixed_x_fit"] = fit_json(f, config.p - 1.0);
        } catch (const FitError& e) {
          summary["fixed_x_fit"] = {{"error", e.what()}};
        }
        const std::vector<double> sup = running_sup(compact);
        CsvWriter sups(dir / "running_sup.csv", "t_tilde,running_sup");
        double lo = INFINITY;
        double hi = 0.0;
        for (std::size_t k = 0; k < sup.size(); ++k) {
          sups.row({compact[k].time(), sup[k]});
          const double tc = compact[k].time();
          if (tc >= -0.5 && tc <= -0.05) {
            lo = std::min(lo, sup[k]);
            hi = std::max(hi, sup[k]);
          }
        }
        artifacts.push_back("running_sup.csv");
        if (hi > 0.0) summary["running_sup_variation"] = (hi - lo) / hi;
      });
      if (config.diagnostics.flux_apexes > 0) {
        stage("flux", [&] {
          const double e0 = summary["e0"].get<double>();
          const double latest = std::max(-0.9, compact.back().time() - 0.05);
          const auto apexes = random_apexes(config.diagnostics.flux_apexes, config.diagnostics.seed,
                                            std::min(latest, -0.1));
          CsvWriter out(dir / "flux.csv", "apex_t,apex_x,apex_y,apex_z,flux,e0,margin,volume,disk,residual");
          const ConeQuadrature quad{48, 32, 48};
          double worst = 0.0;
          double worst_residual = 0.0;
          for (const auto& a : apexes) {
            const FluxReport f = mantle_flux(compact, a, p, quad);
            const DivergenceBalance b = divergence_residual(compact, a, p, quad);
            out.row({f.apex.t, f.apex.x[0], f.apex.x[1], f.apex.x[2], f.flux, f.e0, f.margin,
                     b.volume_term, b.disk_energy, b.residual});
            worst = std::max(worst, f.flux / e0);
            worst_residual = std::max(worst_residual, b.residual / e0);
          }
          artifacts.push_back("flux.csv");
          summary["flux"] = {{"e0", e0},
                             {"apexes", apexes.size()},
                             {"max_ratio", worst},
                             {"max_stokes_residual", worst_residual}};
        });
      }
    }

    stage("analysis", [&] {
      const auto& source = compact.empty() ? physical : compact;
      WeightedSup weak = cube_sups.weak;
      WeightedSup strong = cube_sups.strong;
      WeightedSup regular = cube_sups.regular;
      if (radial) {
        weak = weighted_sup_constant(source, p, WeightKind::weak);
        strong = weighted_sup_constant(source, p, WeightKind::strong);
        regular = weighted_sup_constant(source, Power::scenario(3.0), WeightKind::strong);
      }
      summary["weak_sup"] = {{"value", weak.value}, {"on_collar", weak.on_collar},
                             {"argmax_t", weak.argmax.t}, {"argmax_r", weak.argmax.radius()}};
      summary["strong_sup"] = strong.value;
      summary["regularized_sup"] = regular.value;
      if (summary.contains("fixed_x_fit") && summary["fixed_x_fit"].contains("exponent")) {
        summary["fixed_x_source"] = "compactified";
      } else {
        summary["fixed_x_source"] = "physical";
        summary["fixed_x_fit"] = summary["fixed_x_fit_physical"];
      }
    });

    if (config.duhamel.bound_points > 0) {
      stage("improvement_chain", [&] {
        const double c_hat = summary["regularized_sup"].get<double>();
        std::vector<SpacetimePoint> pts;
        std::vector<double> measured;
        const std::size_t n = config.duhamel.bound_points;
        // Points over stored physical snapshots with 2 <= t <= 50, cycling
        // through the origin, the interior and three radii across the shell.
        std::vector<const FieldSnapshot*> usable;
        for (const auto& s : physical) {
          if (s.time() >= 2.0 && s.time() <= 50.0) usable.push_back(&s);
        }
        if (usable.empty()) {
          throw ConfigError("duhamel.bound_points: no physical snapshot with 2 <= t <= 50");
        }
        const double alpha = config.data.support_radius;
        for (std::size_t k = 0; k < n; ++k) {
          const FieldSnapshot& s = *usable[(k * usable.size()) / n];
          const double t = s.time();
          const std::array<double, 5> radii{0.0, 0.5 * (t - 1.0), t - 1.0 - 0.5 * alpha, t - 1.0,
                                            t - 1.0 + 0.5 * alpha};
          const double r = std::min(radii[k % radii.size()],
                                    s.radial_grid().r_max() - 4.0 * s.spacing());
          const SpacetimePoint pt{t, {r, 0.0, 0.0}};
          pts.push_back(pt);
          measured.push_back(sample_field(s, pt));
        }
        const BoundReport rep = improved_bound_check(c_hat, p, config.data, pts, measured);
        CsvWriter out(dir / "bound.csv", "t,r,measured,chi,duhamel,bound,ok");
        for (const auto& row : rep.rows) {
          out.row({row.point.t, row.point.radius(), row.measured, row.chi, row.duhamel, row.bound,
                   row.ok ? 1.0 : 0.0});
        }
        artifacts.push_back("bound.csv");
        summary["bound"] = {{"ok", rep.ok},
                            {"points", rep.rows.size()},
                            {"weak_constant", c_hat},
                            {"implied_constant", rep.implied_constant},
                            {"failure", rep.failure}};
      });
    }

    if (config.duhamel.lemma_points > 0) {
      stage("decay_lemma", [&] {
        const LemmaTable tab = decay_lemma_ratio(Power::duhamel(config.p),
                                                 lemma_sample_lattice(config.duhamel.lemma_points));
        CsvWriter out(dir / "lemma.csv", "t,r,potential,ratio,converged");
        for (const auto& row : tab.rows) {
          out.row({row.point.t, row.point.radius(), row.potential, row.ratio,
                   row.converged ? 1.0 : 0.0});
        }
        artifacts.push_back("lemma.csv");
        summary["lemma"] = {{"max_ratio", tab.max_ratio},
                            {"all_converged", tab.all_converged},
                            {"argmax_t", tab.argmax.t},
                            {"argmax_r", tab.argmax.radius()}};
      });
    }

    if (config.checks.conformal) {
      stage("conformal_checks", [&] {
        const ConformalCheck c = run_conformal_checks(1000, config.diagnostics.seed);
        summary["conformal"] = {{"order", c.min_order},
                                {"residuals", c.residuals},
                                {"map_identity_max", c.map_identity_max}};
      });
    }
    if (config.checks.huygens) {
      stage("huygens", [&] {
        const HuygensCheck hc = run_huygens_check(config.data, spacing);
        summary["huygens"] = {{"max_after", hc.max_after},
                              {"t_min", hc.t_min},
                              {"weighted_sup", hc.weighted_sup}};
      });
    }
    outcome.ok = true;
  } catch (const ConfigError& e) {
    outcome.validation_error = true;
    outcome.failed_stage = stage_name;
    outcome.error = e.what();
  } catch (const std::exception& e) {
    outcome.failed_stage = stage_name;
    outcome.error = e.what();
  }
  if (!outcome.ok) {
    log << "failed: " << outcome.error << '\n';
    manifest["failed_stage"] = outcome.failed_stage;
    manifest["error"] = outcome.error;
  }
  manifest["status"] = outcome.ok ? "complete" : "failed";

  {
    std::ofstream out(dir / "summary.json");
    out << summary.dump(2) << '\n';
  }
  artifacts.push_back("summary.json");
  for (const auto& name : artifacts) {
    std::ifstream in(dir / name, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    manifest["artifacts"].push_back(
        {{"file", name}, {"sha256", sha256_hex(buf.str())}, {"config_hash", config.hash}});
  }
  {
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  outcome.summary = std::move(summary);
  return outcome;
}

}  // namespace decaylab::cli
