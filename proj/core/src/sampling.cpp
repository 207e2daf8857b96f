#include "decaylab/sampling.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

[[noreturn]] void fail(const char* what, const Vec3& x, double t) {
  std::ostringstream os;
  os.precision(10);
  os << what << " at t=" << t << " x=(" << x[0] << ", " << x[1] << ", " << x[2]
     << ")";
  throw SamplingError(os.str());
}

struct Cell1 {
  std::size_t i;
  double frac;
};

std::optional<Cell1> locate(double coord, double origin, double h, std::size_t n) {
  const double s = (coord - origin) / h;
  const double last = static_cast<double>(n - 1);
  if (!(s >= -1e-12) || s > last + 1e-9) {
    return std::nullopt;
  }
  double cell = std::floor(s);
  if (cell < 0.0) cell = 0.0;
  if (cell > last - 1.0) cell = last - 1.0;
  double frac = s - cell;
  if (frac < 0.0) frac = 0.0;
  if (frac > 1.0) frac = 1.0;
  return Cell1{static_cast<std::size_t>(cell), frac};
}

double sample_radial(const FieldSnapshot& s, const Vec3& x) {
  const auto& g = s.radial_grid();
  const auto cell = locate(norm(x), 0.0, g.spacing(), g.size());
  if (!cell) fail("point outside radial grid", x, s.time());
  const std::size_t i = cell->i;
  const double w = cell->frac;
  const bool need_lo = w < 1.0;
  const bool need_hi = w > 0.0;
  if ((need_lo && !s.valid(i)) || (need_hi && !s.valid(i + 1))) {
    fail("point in masked-out region", x, s.time());
  }
  const auto v = s.value();
  return (need_lo ? (1.0 - w) * v[i] : 0.0) + (need_hi ? w * v[i + 1] : 0.0);
}

double sample_cartesian(const FieldSnapshot& s, const Vec3& x) {
  const auto& g = s.cartesian_grid();
  std::array<Cell1, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const auto cell = locate(x[a], -g.half_width(), g.spacing(), g.size());
    if (!cell) fail("point outside Cartesian grid", x, s.time());
    c[a] = *cell;
  }
  const auto v = s.value();
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? c[2].frac : 1.0 - c[2].frac;
    if (wz == 0.0) continue;
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? c[1].frac : 1.0 - c[1].frac;
      if (wy == 0.0) continue;
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? c[0].frac : 1.0 - c[0].frac;
        if (wx == 0.0) continue;
        const std::size_t idx = g.index(c[0].i + dx, c[1].i + dy, c[2].i + dz);
        if (!s.valid(idx)) fail("point in masked-out region", x, s.time());
        acc += wx * wy * wz * v[idx];
      }
    }
  }
  return acc;
}

// Cubic Lagrange weights and their xi-derivatives for nodes 0..3 at xi.
void cubic_weights(double xi, std::array<double, 4>& w, std::array<double, 4>& dw) {
  const double a = xi, b = xi - 1.0, c = xi - 2.0, d = xi - 3.0;
  w[0] = -b * c * d / 6.0;
  w[1] = a * c * d / 2.0;
  w[2] = -a * b * d / 2.0;
  w[3] = a * b * c / 6.0;
  dw[0] = -(c * d + b * d + b * c) / 6.0;
  dw[1] = (c * d + a * d + a * c) / 2.0;
  dw[2] = -(b * d + a * d + a * b) / 2.0;
  dw[3] = (b * c + a * c + a * b) / 6.0;
}

std::optional<LocalJet> jet_radial(const FieldSnapshot& s, const Vec3& x) {
  const auto& g = s.radial_grid();
  const double h = g.spacing();
  const double r = norm(x);
  const auto cell = locate(r, 0.0, h, g.size());
  if (!cell) return std::nullopt;
  const auto n = static_cast<long>(g.size());
  const auto i = static_cast<long>(cell->i);
  if (!s.valid(cell->i)) return std::nullopt;
  if (cell->frac > 0.0 && !s.valid(cell->i + 1)) return std::nullopt;
  auto ok = [&](long j) {
    const long m = j < 0 ? -j : j;
    return m < n && s.valid(static_cast<std::size_t>(m));
  };
  long b = i - 1;
  while (b > -3 && !ok(b + 3)) {
    --b;
  }
  for (long j = b; j < b + 4; ++j) {
    if (!ok(j)) return std::nullopt;
  }
  std::array<double, 4> w{}, dw{};
  cubic_weights((r - static_cast<double>(b) * h) / h, w, dw);
  const auto v = s.value();
  const auto q = s.rate();
  double f = 0, fr = 0, gq = 0, gr = 0;
  for (int k = 0; k < 4; ++k) {
    const long j = b + k;
    const auto m = static_cast<std::size_t>(j < 0 ? -j : j);
    f += w[k] * v[m];
    fr += dw[k] * v[m];
    gq += w[k] * q[m];
    gr += dw[k] * q[m];
  }
  fr /= h;
  gr /= h;
  LocalJet jet;
  jet.value = f;
  jet.rate = gq;
  if (r > 0.0) {
    jet.grad = (fr / r) * x;
    jet.grad_rate = (gr / r) * x;
  }
  return jet;
}

std::optional<LocalJet> jet_cartesian(const FieldSnapshot& s, const Vec3& x) {
  const auto& g = s.cartesian_grid();
  const double h = g.spacing();
  const std::size_t n = g.size();
  std::array<Cell1, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const auto cell = locate(x[a], -g.half_width(), h, n);
    if (!cell) return std::nullopt;
    c[a] = *cell;
  }
  const auto v = s.value();
  const auto q = s.rate();
  LocalJet jet;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? c[2].frac : 1.0 - c[2].frac;
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? c[1].frac : 1.0 - c[1].frac;
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? c[0].frac : 1.0 - c[0].frac;
        const double w = wx * wy * wz;
        if (w == 0.0) continue;
        const std::array<std::size_t, 3> node{c[0].i + dx, c[1].i + dy, c[2].i + dz};
        const std::size_t idx = g.index(node[0], node[1], node[2]);
        if (!s.valid(idx)) return std::nullopt;
        jet.value += w * v[idx];
        jet.rate += w * q[idx];
        for (int a = 0; a < 3; ++a) {
          if (node[a] == 0 || node[a] + 1 >= n) return std::nullopt;
          auto lo = node, hi = node;
          --lo[a];
          ++hi[a];
          const std::size_t il = g.index(lo[0], lo[1], lo[2]);
          const std::size_t ih = g.index(hi[0], hi[1], hi[2]);
          if (!s.valid(il) || !s.valid(ih)) return std::nullopt;
          jet.grad[a] += w * (v[ih] - v[il]) / (2.0 * h);
          jet.grad_rate[a] += w * (q[ih] - q[il]) / (2.0 * h);
        }
      }
    }
  }
  return jet;
}

std::optional<LocalJet> try_jet(const FieldSnapshot& s, const Vec3& x) {
  return s.is_radial() ? jet_radial(s, x) : jet_cartesian(s, x);
}

}  // namespace

double sample_field(const FieldSnapshot& snapshot, const SpacetimePoint& pt) {
  if (std::abs(pt.t - snapshot.time()) > 1e-9 * std::max(1.0, std::abs(pt.t))) {
    fail("time does not match snapshot", pt.x, pt.t);
  }
  return snapshot.is_radial() ? sample_radial(snapshot, pt.x)
                              : sample_cartesian(snapshot, pt.x);
}

LocalJet sample_jet(const FieldSnapshot& snapshot, const Vec3& x) {
  if (auto jet = try_jet(snapshot, x)) {
    return *jet;
  }
  fail("jet stencil leaves grid or validity mask", x, snapshot.time());
}

bool can_sample_jet(const FieldSnapshot& snapshot, const Vec3& x) noexcept {
  return try_jet(snapshot, x).has_value();
}

}  // namespace decaylab
