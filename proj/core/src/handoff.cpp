#include "decaylab/handoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "decaylab/conformal.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/initial_data.hpp"
#include "decaylab/sampling.hpp"

namespace decaylab {

namespace {

std::size_t node_count(const GridVariant& g) {
  return std::visit(
      [](const auto& grid) -> std::size_t {
        using G = std::decay_t<decltype(grid)>;
        if constexpr (std::is_same_v<G, RadialGrid>) {
          return grid.size();
        } else {
          return grid.point_count();
        }
      },
      g);
}

Vec3 node_position(const GridVariant& g, std::size_t idx) {
  if (const auto* r = std::get_if<RadialGrid>(&g)) {
    return {r->r(idx), 0.0, 0.0};
  }
  const auto& c = std::get<CartesianGrid3>(g);
  const std::size_t n = c.size();
  return {c.coord(idx % n), c.coord((idx / n) % n), c.coord(idx / (n * n))};
}

double grid_spacing(const GridVariant& g) {
  return std::visit([](const auto& grid) { return grid.spacing(); }, g);
}

// Cubic Hermite basis on [0, 1] and its derivative.
struct Hermite {
  double h00, h10, h01, h11;
  double d00, d10, d01, d11;
};

Hermite hermite(double s) noexcept {
  const double s2 = s * s, s3 = s2 * s;
  return {2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s, -2 * s3 + 3 * s2, s3 - s2,
          6 * s2 - 6 * s,      3 * s2 - 4 * s + 1, -6 * s2 + 6 * s, 3 * s2 - 2 * s};
}

}  // namespace

double handoff_taper(double s, double taper_start, double truncation_radius) noexcept {
  if (s >= truncation_radius) return 0.0;
  if (taper_start < 0.0 || s <= taper_start) return 1.0;
  const double x = (s - taper_start) / (truncation_radius - taper_start);
  const double a = std::exp(-1.0 / (1.0 - x));
  const double b = std::exp(-1.0 / x);
  return a / (a + b);
}

double handoff_required_time(double truncation_radius) noexcept {
  return 1.0 / (1.0 - truncation_radius * truncation_radius);
}

HyperboloidHandoff::HyperboloidHandoff(GridVariant target, double truncation_radius,
                                       double taper_start)
    : grid_(std::move(target)), truncation_(truncation_radius), taper_start_(taper_start) {
  if (!(truncation_radius > 0.0) || !(truncation_radius < 1.0)) {
    throw ConfigError("truncation radius must lie in (0, 1)");
  }
  if (taper_start >= 0.0 && !(taper_start < truncation_radius)) {
    throw ConfigError("taper must start below the truncation radius");
  }
  const std::size_t n = node_count(grid_);
  value_.assign(n, 0.0);
  rate_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 y = node_position(grid_, i);
    const double s2 = dot(y, y);
    if (s2 >= truncation_ * truncation_) continue;
    const SpacetimePoint q{-1.0, y};
    targets_.push_back({i, phi_map(q), q});
  }
  std::stable_sort(targets_.begin(), targets_.end(),
                   [](const Target& a, const Target& b) {
                     return a.physical.t < b.physical.t;
                   });
}

double HyperboloidHandoff::required_time() const noexcept {
  return targets_.empty() ? 1.0 : targets_.back().physical.t;
}

bool HyperboloidHandoff::complete() const noexcept {
  return next_ == targets_.size();
}

void HyperboloidHandoff::consume(const FieldSnapshot& physical) {
  if (physical.frame() != Frame::physical) {
    throw ConfigError("handoff consumes physical-frame snapshots");
  }
  if (previous_ && !(physical.time() > previous_->time())) {
    throw ConfigError("handoff snapshots must arrive in increasing time order");
  }
  if (!previous_) {
    if (std::abs(physical.time() - 1.0) > 1e-12) {
      throw ConfigError("first handoff snapshot must be the data at t = 1");
    }
    covered_until_ = physical.time();
    previous_.emplace(physical);
    // Targets sitting exactly on t = 1 (the origin) need no interpolation.
    sample_between(*previous_, *previous_);
    return;
  }
  if (!complete()) {
    sample_between(*previous_, physical);
  }
  covered_until_ = physical.time();
  previous_.emplace(physical);
}

void HyperboloidHandoff::sample_between(const FieldSnapshot& a, const FieldSnapshot& b) {
  const double ta = a.time();
  const double tb = b.time();
  const double span = tb - ta;
  while (next_ < targets_.size() && targets_[next_].physical.t <= tb + 1e-12) {
    const Target& tg = targets_[next_];
    const LocalJet ja = sample_jet(a, tg.physical.x);
    FieldJet f;
    if (span == 0.0) {
      f.value = ja.value;
      f.dt = ja.rate;
      f.grad = ja.grad;
    } else {
      const LocalJet jb = sample_jet(b, tg.physical.x);
      const double s = std::clamp((tg.physical.t - ta) / span, 0.0, 1.0);
      const Hermite hb = hermite(s);
      f.value = hb.h00 * ja.value + hb.h10 * span * ja.rate + hb.h01 * jb.value +
                hb.h11 * span * jb.rate;
      f.dt = (hb.d00 * ja.value + hb.d01 * jb.value) / span + hb.d10 * ja.rate +
             hb.d11 * jb.rate;
      for (int k = 0; k < 3; ++k) {
        f.grad[k] = hb.h00 * ja.grad[k] + hb.h10 * span * ja.grad_rate[k] +
                    hb.h01 * jb.grad[k] + hb.h11 * span * jb.grad_rate[k];
      }
    }
    const FieldJet psi = pullback_jet(tg.compact, f);
    const double taper = handoff_taper(tg.compact.radius(), taper_start_, truncation_);
    value_[tg.node] = taper * psi.value;
    rate_[tg.node] = taper * psi.dt;
    ++next_;
  }
}

SnapshotSink HyperboloidHandoff::sink() {
  return [this](const FieldSnapshot& s) { consume(s); };
}

FieldSnapshot HyperboloidHandoff::result() const {
  if (!complete()) {
    std::ostringstream os;
    os << "physical snapshots end at t=" << covered_until_
       << " but the hyperboloid needs t=" << required_time();
    throw ConfigError(os.str());
  }
  const std::size_t n = node_count(grid_);
  const double h = grid_spacing(grid_);
  std::vector<std::uint8_t> mask(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    mask[i] = norm(node_position(grid_, i)) <= 1.0 - h ? 1 : 0;
  }
  return FieldSnapshot(Frame::compactified, -1.0, grid_, value_, rate_, std::move(mask));
}

FieldSnapshot hyperboloid_handoff(const std::vector<FieldSnapshot>& physical,
                                  const GridVariant& target, double truncation_radius,
                                  double taper_start) {
  HyperboloidHandoff h(target, truncation_radius, taper_start);
  for (const auto& s : physical) {
    if (h.complete()) break;
    h.consume(s);
  }
  return h.result();
}

FieldSnapshot radial_handoff(const FieldSnapshot& physical_data, Power p,
                             const GridVariant& target, const HandoffSettings& settings) {
  if (!physical_data.is_radial()) {
    throw ConfigError("radial handoff needs radial physical data");
  }
  HyperboloidHandoff handoff(target, settings.truncation_radius, settings.taper_start);
  const double t_needed = handoff.required_time();
  double support = 0.0;
  const auto& g0 = physical_data.radial_grid();
  for (std::size_t i = 0; i < physical_data.size(); ++i) {
    if (physical_data.value()[i] != 0.0 || physical_data.rate()[i] != 0.0) {
      support = g0.r(i);
    }
  }
  const double h = settings.physical_spacing;
  const double reach = support + (t_needed - 1.0) + 8.0 * h + 0.5;
  const auto nodes = static_cast<std::size_t>(std::ceil(reach / h)) + 1;
  const auto grid = RadialGrid::with_points(static_cast<double>(nodes - 1) * h, nodes);
  const bool same_nodes = std::abs(g0.spacing() - grid.spacing()) <= 1e-12 * h;
  std::vector<double> v(grid.size(), 0.0), q(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (same_nodes) {
      if (i >= physical_data.size()) break;
      v[i] = physical_data.value()[i];
      q[i] = physical_data.rate()[i];
      continue;
    }
    const double r = grid.r(i);
    if (r > support + 4.0 * g0.spacing() || r > g0.r_max()) continue;
    const LocalJet j = sample_jet(physical_data, {r, 0.0, 0.0});
    v[i] = j.value;
    q[i] = j.rate;
  }
  const FieldSnapshot data(Frame::physical, 1.0, grid, std::move(v), std::move(q),
                           std::vector<std::uint8_t>(grid.size(), 1));
  RadialEvolutionOptions opt;
  opt.t_end = t_needed + 2.0 * settings.cfl * settings.physical_spacing;
  opt.cfl = settings.cfl;
  opt.output_stride = 1;
  opt.keep_snapshots = false;
  opt.sink = handoff.sink();
  evolve_physical_radial(data, p, opt);
  return handoff.result();
}

}  // namespace decaylab
