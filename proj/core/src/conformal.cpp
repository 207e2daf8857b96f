#include "decaylab/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "decaylab/errors.hpp"

namespace decaylab {

namespace {

[[noreturn]] void outside(const char* what, const SpacetimePoint& pt) {
  std::ostringstream os;
  os.precision(12);
  os << what << " at (t=" << pt.t << ", |x|=" << pt.radius() << ")";
  throw DomainError(os.str());
}

SpacetimePoint shifted(const SpacetimePoint& pt, int axis, double d) {
  SpacetimePoint q = pt;
  if (axis == 0) {
    q.t += d;
  } else {
    q.x[axis - 1] += d;
  }
  return q;
}

// Box f = f_tt - sum_i f_ii by centred second differences.
double fd_wave_operator(const ScalarField& f, const SpacetimePoint& pt, double s) {
  const double centre = f(pt);
  double acc = 0.0;
  for (int axis = 0; axis < 4; ++axis) {
    const double d2 =
        (f(shifted(pt, axis, s)) - 2.0 * centre + f(shifted(pt, axis, -s))) / (s * s);
    acc += axis == 0 ? d2 : -d2;
  }
  return acc;
}

}  // namespace

bool in_region(const SpacetimePoint& pt, ConeRegion region) noexcept {
  const double r = pt.radius();
  switch (region) {
    case ConeRegion::forward:
      return r < pt.t;
    case ConeRegion::backward:
      return r < -pt.t;
    case ConeRegion::q_region:
      return r < -pt.t && pt.t >= -1.0 && pt.t < 0.0;
  }
  return false;
}

SpacetimePoint phi_map(const SpacetimePoint& pt) {
  const double d = pt.interval();
  if (!(d > 0.0)) {
    outside("phi_map undefined on or outside the light cone", pt);
  }
  return {-pt.t / d, (1.0 / d) * pt.x};
}

double conformal_factor(const SpacetimePoint& pt) {
  const double d = pt.interval();
  if (!(d > 0.0)) {
    outside("conformal factor undefined on or outside the light cone", pt);
  }
  return 1.0 / d;
}

Jacobian4 phi_map_jacobian(const SpacetimePoint& pt) {
  const double d = pt.interval();
  if (!(d > 0.0)) {
    outside("phi_map Jacobian undefined on or outside the light cone", pt);
  }
  const double t = pt.t;
  const auto& x = pt.x;
  const double id = 1.0 / d;
  const double id2 = id * id;
  Jacobian4 j{};
  j[0][0] = (2.0 * t * t * id - 1.0) * id;
  for (int a = 0; a < 3; ++a) {
    j[0][a + 1] = -2.0 * t * x[a] * id2;
    j[a + 1][0] = -2.0 * t * x[a] * id2;
    for (int b = 0; b < 3; ++b) {
      j[a + 1][b + 1] = (a == b ? id : 0.0) + 2.0 * x[a] * x[b] * id2;
    }
  }
  return j;
}

Coefficient coefficient_c(const SpacetimePoint& pt, Power p, double margin) {
  if (!in_region(pt, ConeRegion::backward)) {
    outside("coefficient c requires a point of the backward cone", pt);
  }
  if (p.value() < 3.0) {
    throw DomainError("coefficient c requires p >= 3");
  }
  const double d = pt.interval();
  if (d < margin) {
    outside("point closer to the cone than the requested margin", pt);
  }
  const double e = p.value() - 3.0;
  Coefficient out;
  out.c = abs_power(d, e);
  out.dt_c = e == 0.0 ? 0.0 : 2.0 * e * pt.t * std::pow(d, e - 1.0);
  return out;
}

double clamped_coefficient(double t, double r2, double p) noexcept {
  if (p == 3.0) {
    return 1.0;
  }
  const double d = t * t - r2;
  return d > 0.0 ? abs_power(d, p - 3.0) : 0.0;
}

ScalarField to_compactified(ScalarField phi) {
  return [phi = std::move(phi)](const SpacetimePoint& q) {
    return phi(phi_map(q)) / q.interval();
  };
}

ScalarField to_physical(ScalarField psi) {
  return [psi = std::move(psi)](const SpacetimePoint& p) {
    return psi(phi_map(p)) / p.interval();
  };
}

FieldJet pullback_jet(const SpacetimePoint& y, const FieldJet& f) {
  const Jacobian4 j = phi_map_jacobian(y);
  const double d = y.interval();
  const std::array<double, 4> df{f.dt, f.grad[0], f.grad[1], f.grad[2]};
  std::array<double, 4> dF{};
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      dF[mu] += df[nu] * j[nu][mu];
    }
  }
  const std::array<double, 4> dd{2.0 * y.t, -2.0 * y.x[0], -2.0 * y.x[1],
                                 -2.0 * y.x[2]};
  FieldJet g;
  g.value = f.value / d;
  g.dt = dF[0] / d - f.value * dd[0] / (d * d);
  for (int a = 0; a < 3; ++a) {
    g.grad[a] = dF[a + 1] / d - f.value * dd[a + 1] / (d * d);
  }
  return g;
}

IdentityResidual conformal_identity_residual(const ScalarField& h,
                                             const SpacetimePoint& pt,
                                             double step) {
  if (!(step > 0.0)) {
    throw DomainError("finite-difference step must be positive");
  }
  const double margin = 4.0 * step;
  if (!(pt.t - pt.radius() >= margin)) {
    outside("identity check needs a margin of 4 steps inside the forward cone", pt);
  }
  const SpacetimePoint image = phi_map(pt);
  if (!(-image.t - image.radius() >= margin)) {
    outside("image point lies within 4 steps of the backward cone", image);
  }
  const ScalarField pulled = [&h](const SpacetimePoint& y) {
    return h(phi_map(y)) / y.interval();
  };
  IdentityResidual out;
  out.lhs = fd_wave_operator(pulled, pt, step);
  const double omega = conformal_factor(pt);
  out.rhs = omega * omega * omega * fd_wave_operator(h, image, step);
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

std::array<double, 4> morawetz_field(const SpacetimePoint& pt) noexcept {
  const double r2 = dot(pt.x, pt.x);
  return {pt.t * pt.t + r2, 2.0 * pt.t * pt.x[0], 2.0 * pt.t * pt.x[1],
          2.0 * pt.t * pt.x[2]};
}

double morawetz_pullback_check(const SpacetimePoint& pt, double step) {
  if (!in_region(pt, ConeRegion::forward)) {
    outside("Morawetz check requires a point of the forward cone", pt);
  }
  if (pt.t - pt.radius() <= step) {
    outside("finite-difference stencil crosses the cone", pt);
  }
  const auto z = morawetz_field(pt);
  std::array<double, 4> pushed{};
  for (int nu = 0; nu < 4; ++nu) {
    const SpacetimePoint hi = phi_map(shifted(pt, nu, step));
    const SpacetimePoint lo = phi_map(shifted(pt, nu, -step));
    const std::array<double, 4> col{
        (hi.t - lo.t) / (2.0 * step), (hi.x[0] - lo.x[0]) / (2.0 * step),
        (hi.x[1] - lo.x[1]) / (2.0 * step), (hi.x[2] - lo.x[2]) / (2.0 * step)};
    for (int mu = 0; mu < 4; ++mu) {
      pushed[mu] += col[mu] * z[nu];
    }
  }
  double dev = std::abs(pushed[0] - 1.0);
  for (int mu = 1; mu < 4; ++mu) {
    dev = std::max(dev, std::abs(pushed[mu]));
  }
  return dev;
}

}  // namespace decaylab
