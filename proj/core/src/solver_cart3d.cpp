#include "decaylab/solver_cart3d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>

#include "decaylab/conformal.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/sampling.hpp"

namespace decaylab {

namespace {

struct Box {
  std::size_t lo[3];
  std::size_t hi[3];  // inclusive
};

struct Setup3 {
  Frame frame;
  double t0;
  double t_end;
  double cfl;
  std::size_t output_stride;
  bool keep;
  const SnapshotSink* sink;
  const std::vector<Vec3>* probes;
  std::size_t workers;
  bool active_box;
  std::size_t margin;
  double collar_cells;  // negative: no mask
  std::size_t min_valid;
};

double trilinear(const CartesianGrid3& g, const std::vector<double>& u,
                 const std::vector<std::uint8_t>* mask, const Vec3& x) {
  const double h = g.spacing();
  const std::size_t n = g.size();
  std::size_t c[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    const double s = (x[a] + g.half_width()) / h;
    if (s < 0.0 || s > static_cast<double>(n - 1)) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    std::size_t i = static_cast<std::size_t>(std::floor(s));
    if (i >= n - 1) i = n - 2;
    c[a] = i;
    f[a] = s - static_cast<double>(i);
  }
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dx = 0; dx < 2; ++dx) {
        const double w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) *
                         (dz ? f[2] : 1 - f[2]);
        if (w == 0.0) continue;
        const std::size_t idx = g.index(c[0] + dx, c[1] + dy, c[2] + dz);
        if (mask && !(*mask)[idx]) return std::numeric_limits<double>::quiet_NaN();
        acc += w * u[idx];
      }
    }
  }
  return acc;
}

template <class Body>
void for_slabs(std::size_t k0, std::size_t k1, std::size_t workers, Body body) {
  const std::size_t count = k1 - k0 + 1;
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    body(k0, k1);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  std::size_t start = k0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t len = count / workers + (w < count % workers ? 1 : 0);
    const std::size_t end = start + len - 1;
    if (w + 1 == workers) {
      body(start, end);
    } else {
      pool.emplace_back([=] { body(start, end); });
    }
    start = end + 1;
  }
}

template <class Coefficient>
Cart3dRun run_cart3d(const FieldSnapshot& data, Power p, const Setup3& cfg,
                     Coefficient coefficient) {
  const CartesianGrid3& g = data.cartesian_grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  if (n < 8) throw ConfigError("Cartesian grid needs at least 8 nodes per axis");
  if (!(cfg.cfl > 0.0) || cfg.cfl > 1.0 / std::sqrt(3.0)) {
    throw ConfigError("3D CFL number must lie in (0, 1/sqrt(3)], got " +
                      std::to_string(cfg.cfl));
  }
  if (!(cfg.t_end > cfg.t0)) throw ConfigError("t_end must exceed the data time");

  const Nonlinearity nl(p);
  const std::size_t steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil((cfg.t_end - cfg.t0) / (cfg.cfl * h) - 1e-9)));
  const double dt = (cfg.t_end - cfg.t0) / static_cast<double>(steps);
  const double dt2 = dt * dt;
  const double ih2 = 1.0 / (h * h);
  const std::size_t nn = n * n;
  const std::size_t total = g.point_count();

  // Bounding box of the data support.
  Box support{{n, n, n}, {0, 0, 0}};
  bool any = false;
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (data.value()[idx] == 0.0 && data.rate()[idx] == 0.0) continue;
    const std::size_t ijk[3] = {idx % n, (idx / n) % n, idx / nn};
    for (int a = 0; a < 3; ++a) {
      support.lo[a] = std::min(support.lo[a], ijk[a]);
      support.hi[a] = std::max(support.hi[a], ijk[a]);
    }
    any = true;
  }
  if (!any) {
    for (int a = 0; a < 3; ++a) {
      support.lo[a] = n / 2;
      support.hi[a] = n / 2;
    }
  }
  auto box_at = [&](double t) {
    Box b{};
    const std::size_t grow =
        cfg.active_box
            ? static_cast<std::size_t>(std::ceil((t - cfg.t0) / h)) + cfg.margin + 1
            : n;
    for (int a = 0; a < 3; ++a) {
      b.lo[a] = support.lo[a] > grow ? support.lo[a] - grow : 0;
      b.lo[a] = std::max<std::size_t>(b.lo[a], 1);
      b.hi[a] = std::min(support.hi[a] + grow, n - 2);
    }
    return b;
  };

  std::vector<double> r2(n);
  std::vector<double> coord(n);
  for (std::size_t i = 0; i < n; ++i) {
    coord[i] = g.coord(i);
    r2[i] = coord[i] * coord[i];
  }

  auto mask_at = [&](double t, std::vector<std::uint8_t>& m) -> std::size_t {
    if (cfg.collar_cells < 0.0) {
      std::fill(m.begin(), m.end(), std::uint8_t{1});
      return total;
    }
    const double edge = -t - cfg.collar_cells * h;
    const double e2 = edge > 0.0 ? edge * edge : -1.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        const double rr = r2[k] + r2[j];
        const std::size_t base = n * (j + n * k);
        for (std::size_t i = 0; i < n; ++i) {
          const bool v = edge >= 0.0 && rr + r2[i] <= e2 * (1.0 + 1e-12);
          m[base + i] = v ? 1 : 0;
          count += v;
        }
      }
    }
    return count;
  };

  Cart3dRun run;
  run.dt = dt;
  run.probes.points = *cfg.probes;

  std::vector<std::uint8_t> mask(total, 1);
  if (mask_at(cfg.t0, mask) < cfg.min_valid) {
    throw ConfigError("initial slice has fewer valid nodes than required");
  }

  auto boundary_max = [&](const std::vector<double>& u) {
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        const bool face_kj = k < 2 || k + 2 >= n || j < 2 || j + 2 >= n;
        const std::size_t base = n * (j + n * k);
        for (std::size_t i = 0; i < n; ++i) {
          if (face_kj || i < 2 || i + 2 >= n) m = std::max(m, std::abs(u[base + i]));
          else if (i == 2) i = n - 3;
        }
      }
    }
    return m;
  };

  auto record = [&](double t, const std::vector<double>& u,
                    const std::vector<std::uint8_t>& m) {
    if (cfg.probes->empty()) return;
    std::vector<double> row;
    row.reserve(cfg.probes->size());
    const std::vector<std::uint8_t>* mp = cfg.collar_cells < 0.0 ? nullptr : &m;
    for (const auto& x : *cfg.probes) row.push_back(trilinear(g, u, mp, x));
    run.probes.times.push_back(t);
    run.probes.values.push_back(std::move(row));
  };

  auto emit = [&](double t, std::vector<double> value, std::vector<double> rate,
                  const std::vector<std::uint8_t>& m) {
    run.boundary_layer_max = std::max(run.boundary_layer_max, boundary_max(value));
    FieldSnapshot snap(cfg.frame, t, g, std::move(value), std::move(rate), m);
    if (cfg.sink && *cfg.sink) (*cfg.sink)(snap);
    if (cfg.keep) run.snapshots.push_back(std::move(snap));
  };

  std::vector<double> u_prev(data.value().begin(), data.value().end());
  std::vector<double> u_cur(total, 0.0);

  record(cfg.t0, u_prev, mask);
  emit(cfg.t0, u_prev, std::vector<double>(data.rate().begin(), data.rate().end()), mask);

  // Taylor start.
  {
    const Box b = box_at(cfg.t0);
    const auto v0 = data.rate();
    for_slabs(b.lo[2], b.hi[2], cfg.workers, [&](std::size_t k0, std::size_t k1) {
      for (std::size_t k = k0; k <= k1; ++k) {
        for (std::size_t j = b.lo[1]; j <= b.hi[1]; ++j) {
          const double rr = r2[k] + r2[j];
          for (std::size_t i = b.lo[0]; i <= b.hi[0]; ++i) {
            const std::size_t idx = i + n * (j + n * k);
            const double u = u_prev[idx];
            const double lap = (u_prev[idx - 1] + u_prev[idx + 1] + u_prev[idx - n] +
                                u_prev[idx + n] + u_prev[idx - nn] + u_prev[idx + nn] -
                                6.0 * u) * ih2;
            const double c = coefficient(cfg.t0, rr + r2[i]);
            u_cur[idx] = u + dt * v0[idx] + 0.5 * dt2 * (lap - c * nl(u));
          }
        }
      }
    });
  }

  std::vector<std::uint8_t> next_mask(total, 1);
  for (std::size_t step = 1; step <= steps; ++step) {
    const double t = cfg.t0 + static_cast<double>(step) * dt;
    const double t_next = cfg.t0 + static_cast<double>(step + 1) * dt;
    if (cfg.collar_cells >= 0.0) mask_at(t, mask);
    record(t, u_cur, mask);
    const bool last = step == steps;
    const bool exhausted =
        !last && cfg.collar_cells >= 0.0 && mask_at(t_next, next_mask) < cfg.min_valid;
    const bool out = last || exhausted ||
                     (cfg.output_stride != 0 && step % cfg.output_stride == 0);
    std::vector<double> rate;
    std::vector<double> value;
    if (out) {
      rate.assign(total, 0.0);
      value = u_cur;
    }
    const Box b = box_at(t);
    // u_prev <- u_next in place.
    for_slabs(b.lo[2], b.hi[2], cfg.workers, [&](std::size_t k0, std::size_t k1) {
      for (std::size_t k = k0; k <= k1; ++k) {
        for (std::size_t j = b.lo[1]; j <= b.hi[1]; ++j) {
          const double rr = r2[k] + r2[j];
          for (std::size_t i = b.lo[0]; i <= b.hi[0]; ++i) {
            const std::size_t idx = i + n * (j + n * k);
            const double u = u_cur[idx];
            const double lap = (u_cur[idx - 1] + u_cur[idx + 1] + u_cur[idx - n] +
                                u_cur[idx + n] + u_cur[idx - nn] + u_cur[idx + nn] -
                                6.0 * u) * ih2;
            const double c = coefficient(t, rr + r2[i]);
            const double next = 2.0 * u - u_prev[idx] + dt2 * (lap - c * nl(u));
            if (out) rate[idx] = (next - u_prev[idx]) / (2.0 * dt);
            u_prev[idx] = next;
          }
        }
      }
    });
    if (out) emit(t, std::move(value), std::move(rate), mask);
    run.steps = step;
    if (exhausted) {
      run.mask_exhausted = true;
      break;
    }
    std::swap(u_prev, u_cur);
  }
  return run;
}

std::size_t resolve_workers(std::size_t requested) {
  return requested == 0 ? default_worker_count() : requested;
}

}  // namespace

std::size_t default_worker_count() {
  if (const char* env = std::getenv("DECAYLAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

Cart3dRun evolve_physical_3d(const FieldSnapshot& data, Power p,
                             const Cart3dOptions& options) {
  if (data.is_radial()) throw ConfigError("3D solver needs Cartesian data");
  if (data.frame() != Frame::physical) {
    throw ConfigError("physical solver needs physical-frame data");
  }
  if (std::abs(data.time() - 1.0) > 1e-12) {
    throw ConfigError("physical data must sit on t = 1");
  }
  const auto& g = data.cartesian_grid();
  double support = 0.0;
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    if (data.value()[idx] != 0.0 || data.rate()[idx] != 0.0) {
      support = std::max(support, norm(data.position(idx)));
    }
  }
  if (options.t_end - 1.0 + support > g.half_width() - 2.0 * g.spacing()) {
    throw ConfigError("t_end - 1 + support radius exceeds the box half-width " +
                      std::to_string(g.half_width()));
  }
  Setup3 cfg{Frame::physical,
             1.0,
             options.t_end,
             options.cfl,
             options.output_stride,
             options.keep_snapshots,
             &options.sink,
             &options.probe_points,
             resolve_workers(options.workers),
             options.active_box,
             options.active_margin_cells,
             -1.0,
             0};
  return run_cart3d(data, p, cfg, [](double, double) { return 1.0; });
}

Cart3dRun evolve_compactified_3d(const FieldSnapshot& data, Power p,
                                 const Compactified3dOptions& options) {
  if (data.is_radial()) throw ConfigError("3D solver needs Cartesian data");
  if (data.frame() != Frame::compactified) {
    throw ConfigError("compactified solver needs compactified-frame data");
  }
  if (std::abs(data.time() + 1.0) > 1e-12) {
    throw ConfigError("compactified data must sit on t = -1");
  }
  if (!(options.t_end < 0.0)) throw ConfigError("compactified t_end must be negative");
  if (data.cartesian_grid().half_width() < 1.0) {
    throw ConfigError("compactified box must contain the unit ball");
  }
  Setup3 cfg{Frame::compactified,
             -1.0,
             options.t_end,
             options.cfl,
             options.output_stride,
             options.keep_snapshots,
             &options.sink,
             &options.probe_points,
             resolve_workers(options.workers),
             false,
             0,
             std::max(0.0, options.collar_cells),
             std::max<std::size_t>(1, options.min_valid_nodes)};
  const double pv = p.value();
  return run_cart3d(data, p, cfg, [pv](double t, double rr) {
    return clamped_coefficient(t, rr, pv);
  });
}

FieldSnapshot radial_to_cartesian(const FieldSnapshot& radial, const CartesianGrid3& grid) {
  const auto& rg = radial.radial_grid();
  const std::size_t total = grid.point_count();
  std::vector<double> v(total, 0.0), q(total, 0.0);
  std::vector<std::uint8_t> m(total, 0);
  const std::size_t n = grid.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = grid.index(i, j, k);
        const Vec3 x{grid.coord(i), grid.coord(j), grid.coord(k)};
        const double r = norm(x);
        if (r > rg.r_max()) {
          m[idx] = radial.frame() == Frame::physical ? 1 : 0;
          continue;
        }
        if (!can_sample_jet(radial, x)) continue;
        const LocalJet jet = sample_jet(radial, x);
        v[idx] = jet.value;
        q[idx] = jet.rate;
        m[idx] = 1;
      }
    }
  }
  return FieldSnapshot(radial.frame(), radial.time(), grid, std::move(v), std::move(q),
                       std::move(m));
}

double spherical_asymmetry(const FieldSnapshot& snapshot) {
  const double h = snapshot.spacing();
  std::map<long, std::pair<double, double>> shells;
  for (std::size_t idx = 0; idx < snapshot.size(); ++idx) {
    if (!snapshot.valid(idx)) continue;
    const long bin = static_cast<long>(std::floor(norm(snapshot.position(idx)) / h));
    const double v = snapshot.value()[idx];
    auto [it, fresh] = shells.try_emplace(bin, v, v);
    if (!fresh) {
      it->second.first = std::min(it->second.first, v);
      it->second.second = std::max(it->second.second, v);
    }
  }
  double spread = 0.0;
  for (const auto& [bin, mm] : shells) spread = std::max(spread, mm.second - mm.first);
  return spread;
}

}  // namespace decaylab
