#include "decaylab/solver_radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "decaylab/conformal.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/sampling.hpp"

namespace decaylab {

namespace {

// phi(0) from the quadratic in r through (r_k, w_k / r_k), k = 1, 2, 3.
double origin_value(const std::vector<double>& w, double h) noexcept {
  return 3.0 * w[1] / h - 3.0 * w[2] / (2.0 * h) + w[3] / (3.0 * h);
}

std::vector<double> divide_by_r(const std::vector<double>& w, double h) {
  std::vector<double> out(w.size());
  for (std::size_t i = 1; i < w.size(); ++i) {
    out[i] = w[i] / (static_cast<double>(i) * h);
  }
  out[0] = origin_value(w, h);
  return out;
}

std::size_t step_count(double span, double cfl, double h) {
  const double raw = span / (cfl * h);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

double support_extent(const FieldSnapshot& s) {
  const auto& g = s.radial_grid();
  double extent = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.value()[i] != 0.0 || s.rate()[i] != 0.0) extent = g.r(i);
  }
  return extent;
}

struct RadialSetup {
  Frame frame;
  double t0;
  double t_end;
  double cfl;
  std::size_t output_stride;
  bool keep;
  const SnapshotSink* sink;
  const std::vector<double>* probe_radii;
  double collar_cells;  // negative: no mask
  std::size_t min_valid;
};

double probe_value(const std::vector<double>& phi, const std::vector<std::uint8_t>& mask,
                   double h, double r) {
  const double s = r / h;
  const std::size_t n = phi.size();
  std::size_t i = static_cast<std::size_t>(std::floor(s));
  if (i >= n - 1) i = n - 2;
  const double f = s - static_cast<double>(i);
  const bool lo = f < 1.0;
  const bool hi = f > 0.0;
  if ((lo && !mask[i]) || (hi && !mask[i + 1])) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return (lo ? (1.0 - f) * phi[i] : 0.0) + (hi ? f * phi[i + 1] : 0.0);
}

template <class Coefficient>
RadialRun run_radial(const FieldSnapshot& data, Power p, const RadialSetup& cfg,
                     Coefficient coefficient) {
  const RadialGrid& grid = data.radial_grid();
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  if (n < 8) {
    throw ConfigError("radial grid needs at least 8 nodes");
  }
  if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0) {
    throw ConfigError("CFL number must lie in (0, 1], got " + std::to_string(cfg.cfl));
  }
  if (!(cfg.t_end > cfg.t0)) {
    throw ConfigError("t_end must exceed the data time");
  }
  for (double r : *cfg.probe_radii) {
    if (!(r >= 0.0) || r > grid.r_max()) {
      throw ConfigError("probe radius " + std::to_string(r) + " outside the grid");
    }
  }

  const Nonlinearity nl(p);
  const std::size_t steps = step_count(cfg.t_end - cfg.t0, cfg.cfl, h);
  const double dt = (cfg.t_end - cfg.t0) / static_cast<double>(steps);

  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = grid.r(i);

  auto mask_at = [&](double t, std::vector<std::uint8_t>& m) {
    std::size_t count = 0;
    if (cfg.collar_cells < 0.0) {
      std::fill(m.begin(), m.end(), std::uint8_t{1});
      return n;
    }
    const double edge = -t - cfg.collar_cells * h;
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = r[i] <= edge + 1e-12 * h ? 1 : 0;
      count += m[i];
    }
    return count;
  };

  // Accelerations w_rr - r c F(w / r); endpoints are pinned at zero.
  std::vector<double> acc(n, 0.0);
  auto accelerations = [&](const std::vector<double>& w, double t) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double lap = (w[i + 1] - 2.0 * w[i] + w[i - 1]) / (h * h);
      const double c = coefficient(t, r[i] * r[i]);
      acc[i] = c == 0.0 ? lap : lap - r[i] * c * nl(w[i] / r[i]);
    }
  };

  RadialRun run;
  run.dt = dt;
  run.probes.radii = *cfg.probe_radii;

  std::vector<std::uint8_t> mask(n, 1);
  if (mask_at(cfg.t0, mask) < cfg.min_valid) {
    throw ConfigError("initial slice has fewer valid nodes than required");
  }

  std::vector<double> w_prev(n), w_cur(n), w_next(n, 0.0);
  std::vector<double> v0(n);
  for (std::size_t i = 0; i < n; ++i) {
    w_prev[i] = r[i] * data.value()[i];
    v0[i] = r[i] * data.rate()[i];
  }
  w_prev[0] = 0.0;
  w_prev[n - 1] = 0.0;
  v0[0] = 0.0;
  v0[n - 1] = 0.0;

  auto record_probes = [&](double t, const std::vector<double>& w,
                           const std::vector<std::uint8_t>& m) {
    if (cfg.probe_radii->empty()) return;
    const auto phi = divide_by_r(w, h);
    std::vector<double> row;
    row.reserve(cfg.probe_radii->size());
    for (double pr : *cfg.probe_radii) row.push_back(probe_value(phi, m, h, pr));
    run.probes.times.push_back(t);
    run.probes.values.push_back(std::move(row));
  };

  auto emit = [&](double t, const std::vector<double>& w, const std::vector<double>& wdot,
                  const std::vector<std::uint8_t>& m) {
    std::vector<double> value = divide_by_r(w, h);
    std::vector<double> rate = divide_by_r(wdot, h);
    FieldSnapshot snap(cfg.frame, t, grid, std::move(value), std::move(rate), m);
    if (cfg.sink && *cfg.sink) (*cfg.sink)(snap);
    if (cfg.keep) run.snapshots.push_back(std::move(snap));
  };

  // Level 0 uses the exact data rate.
  record_probes(cfg.t0, w_prev, mask);
  emit(cfg.t0, w_prev, v0, mask);

  accelerations(w_prev, cfg.t0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    w_cur[i] = w_prev[i] + dt * v0[i] + 0.5 * dt * dt * acc[i];
  }

  std::vector<std::uint8_t> next_mask(n, 1);
  std::vector<double> wdot(n, 0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = cfg.t0 + static_cast<double>(k) * dt;
    const double t_next = cfg.t0 + static_cast<double>(k + 1) * dt;
    accelerations(w_cur, t);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      w_next[i] = 2.0 * w_cur[i] - w_prev[i] + dt * dt * acc[i];
    }
    mask_at(t, mask);
    const bool last = k == steps;
    const bool exhausted = !last && mask_at(t_next, next_mask) < cfg.min_valid;
    record_probes(t, w_cur, mask);
    if (last || exhausted ||
        (cfg.output_stride != 0 && k % cfg.output_stride == 0)) {
      for (std::size_t i = 0; i < n; ++i) {
        wdot[i] = (w_next[i] - w_prev[i]) / (2.0 * dt);
      }
      emit(t, w_cur, wdot, mask);
    }
    run.steps = k;
    if (exhausted) {
      run.mask_exhausted = true;
      break;
    }
    std::swap(w_prev, w_cur);
    std::swap(w_cur, w_next);
  }
  return run;
}

}  // namespace

RadialRun evolve_physical_radial(const FieldSnapshot& data, Power p,
                                 const RadialEvolutionOptions& options) {
  if (!data.is_radial()) {
    throw ConfigError("radial solver needs radial data");
  }
  if (data.frame() != Frame::physical) {
    throw ConfigError("physical solver needs physical-frame data");
  }
  if (std::abs(data.time() - 1.0) > 1e-12) {
    throw ConfigError("physical data must sit on t = 1");
  }
  const auto& g = data.radial_grid();
  const double reach = support_extent(data) + (options.t_end - 1.0);
  if (reach > g.r_max() - 4.0 * g.spacing()) {
    throw ConfigError("support reaches r_max = " + std::to_string(g.r_max()) +
                      " before t_end; enlarge the grid");
  }
  RadialSetup cfg{Frame::physical,        1.0,
                  options.t_end,          options.cfl,
                  options.output_stride,  options.keep_snapshots,
                  &options.sink,          &options.probe_radii,
                  -1.0,                   0};
  return run_radial(data, p, cfg, [](double, double) { return 1.0; });
}

RadialRun evolve_compactified_radial(const FieldSnapshot& data, Power p,
                                     const CompactifiedRadialOptions& options) {
  if (!data.is_radial()) {
    throw ConfigError("radial solver needs radial data");
  }
  if (data.frame() != Frame::compactified) {
    throw ConfigError("compactified solver needs compactified-frame data");
  }
  if (std::abs(data.time() + 1.0) > 1e-12) {
    throw ConfigError("compactified data must sit on t = -1");
  }
  if (!(options.t_end < 0.0)) {
    throw ConfigError("compactified t_end must be negative");
  }
  if (data.radial_grid().r_max() < 1.0) {
    throw ConfigError("compactified grid must cover the unit ball");
  }
  if (!(options.collar_cells >= 0.0)) {
    throw ConfigError("collar must be non-negative");
  }
  RadialSetup cfg{Frame::compactified,   -1.0,
                  options.t_end,         options.cfl,
                  options.output_stride, options.keep_snapshots,
                  &options.sink,         &options.probe_radii,
                  options.collar_cells,  std::max<std::size_t>(options.min_valid_nodes, 1)};
  const double pv = p.value();
  return run_radial(data, p, cfg, [pv](double t, double r2) {
    return clamped_coefficient(t, r2, pv);
  });
}

ConvergenceOrder order_of_convergence(double f_coarse, double f_medium,
                                      double f_fine) noexcept {
  ConvergenceOrder out;
  out.coarse_diff = std::abs(f_coarse - f_medium);
  out.fine_diff = std::abs(f_medium - f_fine);
  if (out.coarse_diff == 0.0 && out.fine_diff == 0.0) {
    out.degenerate = true;
    return out;
  }
  if (out.fine_diff == 0.0 || out.fine_diff >= out.coarse_diff) {
    out.indeterminate = true;
    out.ratio = out.fine_diff == 0.0 ? std::numeric_limits<double>::infinity()
                                     : out.coarse_diff / out.fine_diff;
    return out;
  }
  out.ratio = out.coarse_diff / out.fine_diff;
  out.order = std::log2(out.ratio);
  return out;
}

ConvergenceOrder radial_self_convergence(const InitialDataSpec& spec, Power p,
                                         double r_max, std::size_t base_points,
                                         double t_probe, double r_probe,
                                         double cfl) {
  if (base_points < 8) {
    throw ConfigError("base resolution needs at least 8 nodes");
  }
  std::array<double, 3> f{};
  std::size_t n = base_points;
  for (int level = 0; level < 3; ++level) {
    const auto grid = RadialGrid::with_points(r_max, n);
    const auto data = build_bump_data(spec, grid);
    RadialEvolutionOptions opt;
    opt.t_end = t_probe;
    opt.cfl = cfl;
    opt.probe_radii = {r_probe};
    const auto run = evolve_physical_radial(data, p, opt);
    f[static_cast<std::size_t>(level)] = run.probes.values.back()[0];
    n = 2 * n - 1;
  }
  return order_of_convergence(f[0], f[1], f[2]);
}

}  // namespace decaylab
