#include "decaylab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "decaylab/conformal.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/sampling.hpp"
#include "quadrature.hpp"

namespace decaylab {

namespace {

constexpr double kPi = std::numbers::pi;

struct Parts {
  std::vector<double> kinetic, gradient, potential;
};

// Per-cell (radial) or per-node/edge (Cartesian) contributions. `coef` gives c
// at (r^2); `keep` restricts to a region.
template <class Coef, class Keep>
Parts energy_parts(const FieldSnapshot& s, Power p, Coef coef, Keep keep,
                   bool use_mask) {
  const Nonlinearity nl(p);
  const auto v = s.value();
  const auto q = s.rate();
  Parts out;
  auto ok = [&](std::size_t i) { return !use_mask || s.valid(i); };
  if (s.is_radial()) {
    const auto& g = s.radial_grid();
    const double h = g.spacing();
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      if (!ok(i) || !ok(i + 1)) continue;
      const double r0 = g.r(i), r1 = g.r(i + 1);
      const double rm = 0.5 * (r0 + r1);
      if (!keep(rm * rm)) continue;
      const double vol = 4.0 * kPi * (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
      const double vm = 0.5 * (v[i] + v[i + 1]);
      const double qm = 0.5 * (q[i] + q[i + 1]);
      const double dr = (v[i + 1] - v[i]) / h;
      out.kinetic.push_back(0.5 * qm * qm * vol);
      out.gradient.push_back(0.5 * dr * dr * vol);
      out.potential.push_back(coef(rm * rm) * nl.potential(vm) * vol);
    }
    return out;
  }
  const auto& g = s.cartesian_grid();
  const std::size_t n = g.size();
  const double h = g.spacing();
  const double cell = h * h * h;
  const std::size_t stride[3] = {1, n, n * n};
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (!ok(idx)) continue;
        const double x = g.coord(i), y = g.coord(j), z = g.coord(k);
        const double r2 = x * x + y * y + z * z;
        if (!keep(r2)) continue;
        out.kinetic.push_back(0.5 * q[idx] * q[idx] * cell);
        out.potential.push_back(coef(r2) * nl.potential(v[idx]) * cell);
        const std::size_t ijk[3] = {i, j, k};
        double gsum = 0.0;
        for (int a = 0; a < 3; ++a) {
          if (ijk[a] + 1 >= n) continue;
          const std::size_t nb = idx + stride[a];
          if (!ok(nb)) continue;
          const double d = (v[nb] - v[idx]) / h;
          gsum += 0.5 * d * d * cell;
        }
        out.gradient.push_back(gsum);
      }
    }
  }
  return out;
}

bool touches_boundary(const FieldSnapshot& s) {
  const auto v = s.value();
  const auto q = s.rate();
  auto nonzero = [&](std::size_t i) { return v[i] != 0.0 || q[i] != 0.0; };
  if (s.is_radial()) {
    const std::size_t n = s.size();
    for (std::size_t i = 0; i < n; ++i) {
      const bool edge = i + 1 == n || (s.valid(i) && i + 1 < n && !s.valid(i + 1));
      if (edge && s.valid(i) && nonzero(i)) return true;
    }
    return false;
  }
  const auto& g = s.cartesian_grid();
  const std::size_t n = g.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (!s.valid(idx) || !nonzero(idx)) continue;
        if (i == 0 || j == 0 || k == 0 || i + 1 == n || j + 1 == n || k + 1 == n) {
          return true;
        }
        if (!s.valid(idx - 1) || !s.valid(idx + 1) || !s.valid(idx - n) ||
            !s.valid(idx + n) || !s.valid(idx - n * n) || !s.valid(idx + n * n)) {
          return true;
        }
      }
    }
  }
  return false;
}

// Orthonormal frame (a, b, c) with a along `axis` (e1 when axis vanishes).
void frame_from(const Vec3& axis, Vec3& a, Vec3& b, Vec3& c) {
  const double len = norm(axis);
  a = len > 0.0 ? (1.0 / len) * axis : Vec3{1.0, 0.0, 0.0};
  const Vec3 helper = std::abs(a[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  const double d = dot(helper, a);
  b = helper - d * a;
  b = (1.0 / norm(b)) * b;
  c = {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct SphereNode {
  Vec3 dir;
  double weight;  // solid-angle weight
};

std::vector<SphereNode> sphere_rule(const Vec3& axis, const ConeQuadrature& quad,
                                    bool axisymmetric) {
  Vec3 a, b, c;
  frame_from(axis, a, b, c);
  const auto mu = detail::gauss_legendre(std::max<std::size_t>(quad.polar, 1));
  const std::size_t naz = axisymmetric ? 1 : std::max<std::size_t>(quad.azimuth, 1);
  std::vector<SphereNode> out;
  for (std::size_t i = 0; i < mu.nodes.size(); ++i) {
    const double m = mu.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - m * m));
    for (std::size_t k = 0; k < naz; ++k) {
      const double ph = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(naz);
      const Vec3 dir = m * a + (st * std::cos(ph)) * b + (st * std::sin(ph)) * c;
      out.push_back({dir, mu.weights[i] * 2.0 * kPi / static_cast<double>(naz)});
    }
  }
  return out;
}

double coefficient_at(double s, const Vec3& y, Power p) {
  return clamped_coefficient(s, dot(y, y), p.value());
}

double energy_density(const LocalJet& j, double s, const Vec3& y, Power p) {
  return pseudo_energy_density(j.value, j.rate, dot(j.grad, j.grad),
                               coefficient_at(s, y, p), p);
}

[[noreturn]] void invalid_cone(double s, const Vec3& dir) {
  std::ostringstream os;
  os.precision(10);
  os << "backward cone leaves the valid region at s=" << s << " direction=(" << dir[0]
     << ", " << dir[1] << ", " << dir[2] << ")";
  throw SamplingError(os.str());
}

LocalJet jet_or_throw(const FieldSnapshot& snap, const Vec3& y, const Vec3& dir) {
  if (!can_sample_jet(snap, y)) invalid_cone(snap.time(), dir);
  return sample_jet(snap, y);
}

struct ConeSetup {
  std::size_t apex_index;
  double ds;
  SpacetimePoint apex;
};

ConeSetup prepare_cone(std::span<const FieldSnapshot> series, const SpacetimePoint& apex) {
  if (series.size() < 2) throw ConfigError("cone integrals need at least two snapshots");
  for (const auto& s : series) {
    if (s.frame() != Frame::compactified) {
      throw ConfigError("cone integrals need compactified snapshots");
    }
  }
  if (std::abs(series.front().time() + 1.0) > 1e-12) {
    throw ConfigError("snapshot series must start at t = -1");
  }
  const double ds = series[1].time() - series[0].time();
  const auto off_grid = [&](std::size_t i) {
    const double d = series[i].time() - series[i - 1].time();
    return std::abs(d - ds) > 1e-9 * std::max(1.0, std::abs(ds)) + 1e-12;
  };
  for (std::size_t i = 1; i + 1 < series.size(); ++i) {
    if (off_grid(i)) throw ConfigError("snapshot series must be equally spaced in time");
  }
  // A solver stopping at t_end between output steps emits one short final
  // interval; that last snapshot is left out.
  if (series.size() > 2 && off_grid(series.size() - 1)) {
    if (series.back().time() < series[series.size() - 2].time()) {
      throw ConfigError("snapshot series must be equally spaced in time");
    }
    series = series.first(series.size() - 1);
  }
  if (!in_region(apex, ConeRegion::q_region)) {
    throw DomainError("apex must lie in Q");
  }
  const std::size_t m = nearest_snapshot(series, apex.t);
  if (std::abs(series[m].time() - apex.t) > ds) {
    throw SamplingError("apex time lies beyond the snapshot series");
  }
  SpacetimePoint snapped{series[m].time(), apex.x};
  if (!in_region(snapped, ConeRegion::backward)) {
    throw DomainError("snapped apex left the backward cone");
  }
  return {m, ds, snapped};
}

double trapezoid_weight(std::size_t i, std::size_t last, double ds) {
  return (i == 0 || i == last) ? 0.5 * ds : ds;
}

double ball_integral(const FieldSnapshot& snap, const Vec3& centre, double radius,
                     const ConeQuadrature& quad, const std::vector<SphereNode>& dirs,
                     const auto& density) {
  if (radius <= 0.0) return 0.0;
  const std::size_t panels = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(static_cast<double>(quad.radial) * radius / 8.0)));
  const auto rule = detail::composite_gauss(0.0, radius, panels, 8);
  std::vector<double> terms;
  terms.reserve(rule.nodes.size() * dirs.size());
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double rho = rule.nodes[k];
    for (const auto& d : dirs) {
      const Vec3 y = centre + rho * d.dir;
      const LocalJet j = jet_or_throw(snap, y, d.dir);
      terms.push_back(rule.weights[k] * rho * rho * d.weight * density(j, y));
    }
  }
  return pairwise_sum(terms);
}

}  // namespace

double pairwise_sum(std::span<const double> values) noexcept {
  const std::size_t n = values.size();
  if (n <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

EnergyReport total_energy(const FieldSnapshot& snapshot, Power p) {
  EnergyReport r;
  r.time = snapshot.time();
  r.frame = snapshot.frame();
  const double t = snapshot.time();
  const double pv = p.value();
  const bool compact = snapshot.frame() == Frame::compactified;
  const Parts parts = energy_parts(
      snapshot, p,
      [&](double r2) { return compact ? clamped_coefficient(t, r2, pv) : 1.0; },
      [](double) { return true; }, true);
  r.kinetic = pairwise_sum(parts.kinetic);
  r.gradient = pairwise_sum(parts.gradient);
  r.potential = pairwise_sum(parts.potential);
  r.total = r.kinetic + r.gradient + r.potential;
  if (touches_boundary(snapshot)) {
    r.warning = "field is non-zero next to the mask or grid boundary";
  }
  return r;
}

double pseudo_energy_density(double value, double rate, double grad_squared, double c,
                             Power p) noexcept {
  return 0.5 * rate * rate + 0.5 * grad_squared +
         c * abs_power(value, p.value() + 1.0) / (p.value() + 1.0);
}

double e0_initial_energy(const FieldSnapshot& data, Power p) {
  if (data.frame() != Frame::compactified || std::abs(data.time() + 1.0) > 1e-12) {
    throw ConfigError("E0 needs compactified data on t = -1");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if ((data.value()[i] != 0.0 || data.rate()[i] != 0.0) &&
        norm(data.position(i)) >= 1.0) {
      throw ConfigError("data has support outside the unit disk");
    }
  }
  const double pv = p.value();
  const Parts parts = energy_parts(
      data, p, [&](double r2) { return clamped_coefficient(-1.0, r2, pv); },
      [](double r2) { return r2 < 1.0; }, false);
  return pairwise_sum(parts.kinetic) + pairwise_sum(parts.gradient) +
         pairwise_sum(parts.potential);
}

std::size_t nearest_snapshot(std::span<const FieldSnapshot> series, double t) {
  if (series.empty()) throw ConfigError("empty snapshot series");
  std::size_t best = 0;
  double dist = std::abs(series[0].time() - t);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double d = std::abs(series[i].time() - t);
    if (d < dist) {
      dist = d;
      best = i;
    }
  }
  return best;
}

std::vector<double> running_sup(std::span<const FieldSnapshot> series) {
  std::vector<double> out;
  out.reserve(series.size());
  double sup = 0.0;
  for (const auto& s : series) {
    const auto v = s.value();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s.valid(i)) sup = std::max(sup, std::abs(v[i]));
    }
    out.push_back(sup);
  }
  return out;
}

FluxReport mantle_flux(std::span<const FieldSnapshot> series, const SpacetimePoint& apex,
                       Power p, const ConeQuadrature& quad) {
  const ConeSetup cone = prepare_cone(series, apex);
  const bool radial = series.front().is_radial();
  const auto dirs = sphere_rule(cone.apex.x, quad, radial);
  const Nonlinearity nl(p);
  std::vector<double> terms;
  for (std::size_t m = 0; m < cone.apex_index; ++m) {
    const FieldSnapshot& snap = series[m];
    const double s = snap.time();
    const double rho = cone.apex.t - s;
    const double ws = trapezoid_weight(m, cone.apex_index, cone.ds);
    for (const auto& d : dirs) {
      const Vec3 y = cone.apex.x + rho * d.dir;
      const LocalJet j = jet_or_throw(snap, y, d.dir);
      const double dn = dot(j.grad, d.dir);
      const Vec3 tang = j.grad - dn * d.dir;
      const double dens = 0.5 * (j.rate - dn) * (j.rate - dn) + 0.5 * dot(tang, tang) +
                          coefficient_at(s, y, p) * nl.potential(j.value);
      terms.push_back(ws * rho * rho * d.weight * dens);
    }
  }
  FluxReport out;
  out.apex = cone.apex;
  out.flux = pairwise_sum(terms);
  out.e0 = e0_initial_energy(series.front(), p);
  out.margin = out.e0 - out.flux;
  return out;
}

DivergenceBalance divergence_residual(std::span<const FieldSnapshot> series,
                                      const SpacetimePoint& apex, Power p,
                                      const ConeQuadrature& quad) {
  const ConeSetup cone = prepare_cone(series, apex);
  const bool radial = series.front().is_radial();
  const auto dirs = sphere_rule(cone.apex.x, quad, radial);
  const Nonlinearity nl(p);
  DivergenceBalance out;
  out.apex = cone.apex;
  out.flux = mantle_flux(series, apex, p, quad).flux;
  out.disk_energy = ball_integral(
      series.front(), cone.apex.x, 1.0 + cone.apex.t, quad, dirs,
      [&](const LocalJet& j, const Vec3& y) { return energy_density(j, -1.0, y, p); });
  if (p.value() != 3.0) {
    std::vector<double> slices;
    for (std::size_t m = 0; m < cone.apex_index; ++m) {
      const FieldSnapshot& snap = series[m];
      const double s = snap.time();
      const double ws = trapezoid_weight(m, cone.apex_index, cone.ds);
      const double part = ball_integral(
          snap, cone.apex.x, cone.apex.t - s, quad, dirs,
          [&](const LocalJet& j, const Vec3& y) {
            const double d = s * s - dot(y, y);
            const double e = p.value() - 3.0;
            const double dtc = d > 0.0 ? 2.0 * e * s * std::pow(d, e - 1.0) : 0.0;
            return dtc * nl.potential(j.value);
          });
      slices.push_back(ws * part);
    }
    out.volume_term = pairwise_sum(slices);
  }
  out.residual = std::abs(out.volume_term - (out.flux - out.disk_energy));
  return out;
}

}  // namespace decaylab
