#include "decaylab/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "decaylab/errors.hpp"
#include "quadrature.hpp"

namespace decaylab {

namespace {

constexpr double kPi = std::numbers::pi;

// Trapezoid on [a, b] with n >= 2 nodes.
template <class F>
double trapezoid(double a, double b, std::size_t n, F f) {
  if (!(b > a)) return 0.0;
  const double h = (b - a) / static_cast<double>(n - 1);
  double acc = 0.5 * (f(a) + f(b));
  for (std::size_t i = 1; i + 1 < n; ++i) acc += f(a + static_cast<double>(i) * h);
  return acc * h;
}

template <class Level>
QuadratureResult refine(const QuadratureOptions& opts, Level level_value) {
  if (opts.min_level < 1 || opts.max_level < opts.min_level) {
    throw ConfigError("quadrature levels must satisfy 1 <= min_level <= max_level");
  }
  QuadratureResult res;
  double prev = 0.0;
  for (std::size_t level = opts.min_level; level <= opts.max_level; ++level) {
    const std::size_t n = (std::size_t{1} << level) + 1;
    const double v = level_value(n);
    res.value = v;
    res.level = level;
    res.nodes = n;
    if (level > opts.min_level) {
      const double diff = std::abs(v - prev);
      const double scale = std::max(std::abs(v), std::abs(prev));
      res.last_change = scale > 0.0 ? diff / scale : 0.0;
      if (res.last_change < opts.tolerance) {
        res.converged = true;
        break;
      }
    }
    prev = v;
  }
  res.non_convergence = res.last_change > opts.flag_threshold;
  return res;
}

// Spherical means of a bump profile (and of its radial derivative term) over
// the sphere of radius tau about x.
struct Means {
  double mean = 0.0;        // M_tau(f)(x)
  double d_mean = 0.0;      // d/dtau M_tau(f)(x)
};

Means bump_means(double amplitude, double alpha, int k, double d, double tau) {
  Means out;
  auto profile = [&](double s2) {
    const double q = alpha * alpha - s2;
    return q > 0.0 ? amplitude * std::pow(q, k) : 0.0;
  };
  // F'(s)/s for the radial profile A (alpha^2 - s^2)^k.
  auto slope = [&](double s2) {
    const double q = alpha * alpha - s2;
    return q > 0.0 ? -2.0 * k * amplitude * std::pow(q, k - 1) : 0.0;
  };
  if (d == 0.0) {
    out.mean = profile(tau * tau);
    out.d_mean = slope(tau * tau) * tau;
    return out;
  }
  // |x + tau w - c|^2 = d^2 + tau^2 + 2 tau d mu < alpha^2.
  const double mu_max = std::min(1.0, (alpha * alpha - d * d - tau * tau) / (2.0 * tau * d));
  if (!(mu_max > -1.0)) return out;
  static const detail::GaussRule rule = detail::gauss_legendre(24);
  const double half = 0.5 * (mu_max + 1.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double mu = -1.0 + half * (rule.nodes[i] + 1.0);
    const double s2 = d * d + tau * tau + 2.0 * tau * d * mu;
    const double w = half * rule.weights[i];
    out.mean += 0.5 * w * profile(s2);
    out.d_mean += 0.5 * w * slope(s2) * (d * mu + tau);
  }
  return out;
}

}  // namespace

double WeightFunction::operator()(double t, double r) const noexcept {
  if (t < t0 || r > t) return 0.0;
  return std::pow(1.0 + t + r, -a) * std::pow(1.0 + t - r, -b);
}

double free_solution_kirchhoff(const InitialDataSpec& spec, const SpacetimePoint& pt) {
  if (!(pt.t > 1.0)) {
    throw DomainError("Kirchhoff formula needs t > 1");
  }
  const double tau = pt.t - 1.0;
  const double d = norm(pt.x - spec.center);
  const Means m0 =
      bump_means(spec.amplitude, spec.support_radius, spec.phi0_power, d, tau);
  const Means m1 =
      bump_means(spec.amplitude, spec.support_radius, spec.phi1_power, d, tau);
  return m0.mean + tau * m0.d_mean + tau * m1.mean;
}

QuadratureResult retarded_potential(const RadialSource& source, const SpacetimePoint& pt,
                                    const QuadratureOptions& opts) {
  if (!source.f) throw ConfigError("source function missing");
  const double t = pt.t;
  const double r = pt.radius();
  const double s_lo = source.s_min;
  const double s_hi = std::min(t, source.s_max);
  auto support = [&](double s) {
    return source.support_radius ? source.support_radius(s) : 1e300;
  };
  if (!(s_hi > s_lo)) {
    QuadratureResult z;
    z.converged = true;
    return z;
  }
  if (r == 0.0) {
    // The support edge t - s = R(s) cuts the integrand off with a jump; start
    // the rule there instead.
    double s_start = s_lo;
    if (source.support_radius && t - s_lo > support(s_lo)) {
      if (t - s_hi > support(s_hi)) {
        QuadratureResult z;
        z.converged = true;
        return z;
      }
      double a = s_lo;
      double b = s_hi;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        (t - m > support(m) ? a : b) = m;
      }
      s_start = b;
    }
    return refine(opts, [&](std::size_t n) {
      return trapezoid(s_start, s_hi, n, [&](double s) {
        const double tau = t - s;
        return tau <= support(s) ? tau * source.f(s, tau) : 0.0;
      });
    });
  }
  return refine(opts, [&](std::size_t n) {
    const double outer = trapezoid(s_lo, s_hi, n, [&](double s) {
      const double tau = t - s;
      const double lo = std::abs(r - tau);
      const double hi = std::min(r + tau, support(s));
      return trapezoid(lo, hi, n, [&](double lam) { return lam * source.f(s, lam); });
    });
    return outer / (2.0 * r);
  });
}

QuadratureResult retarded_potential_shell(const GeneralSource& source,
                                          const SpacetimePoint& pt,
                                          const QuadratureOptions& opts) {
  if (!source.f) throw ConfigError("source function missing");
  const double t = pt.t;
  const Vec3 x = pt.x;
  const double r = pt.radius();
  // Polar axis along x (e1 at the origin).
  const Vec3 a = r > 0.0 ? (1.0 / r) * x : Vec3{1.0, 0.0, 0.0};
  const Vec3 helper = std::abs(a[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  Vec3 b = helper - dot(helper, a) * a;
  b = (1.0 / norm(b)) * b;
  const Vec3 c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
               a[0] * b[1] - a[1] * b[0]};
  const double rho_lo = std::max(0.0, t - std::min(t, source.s_max));
  const double rho_hi = t - source.s_min;
  auto support = [&](double s) {
    return source.support_radius ? source.support_radius(s) : 1e300;
  };
  if (!(rho_hi > rho_lo)) {
    QuadratureResult z;
    z.converged = true;
    return z;
  }
  return refine(opts, [&](std::size_t n) {
    const std::size_t naz = std::max<std::size_t>(8, (n - 1) / 4);
    const double integral = trapezoid(rho_lo, rho_hi, n, [&](double rho) {
      if (rho == 0.0) return 0.0;
      const double s = t - rho;
      const double R = support(s);
      double mu_hi = 1.0;
      if (r > 0.0 && R < 1e299) {
        mu_hi = std::min(1.0, (R * R - r * r - rho * rho) / (2.0 * r * rho));
      } else if (R < 1e299 && rho > R) {
        return 0.0;
      }
      if (!(mu_hi > -1.0)) return 0.0;
      const double sphere = trapezoid(-1.0, mu_hi, n, [&](double mu) {
        const double st = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        double acc = 0.0;
        for (std::size_t k = 0; k < naz; ++k) {
          const double ph = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(naz);
          const Vec3 dir = mu * a + (st * std::cos(ph)) * b + (st * std::sin(ph)) * c;
          acc += source.f(s, x + rho * dir);
        }
        return acc * 2.0 * kPi / static_cast<double>(naz);
      });
      return rho * sphere;
    });
    return integral / (4.0 * kPi);
  });
}

RadialSource weight_source(const WeightFunction& w) {
  RadialSource src;
  src.f = [w](double s, double r) { return w(s, r); };
  src.support_radius = [](double s) { return s; };
  src.s_min = w.t0;
  return src;
}

LemmaTable decay_lemma_ratio(Power p, const std::vector<SpacetimePoint>& samples,
                             const QuadratureOptions& opts) {
  if (!(p.value() > 2.0)) throw ConfigError("decay lemma needs p > 2");
  LemmaTable table;
  table.p = p.value();
  const RadialSource src = weight_source(WeightFunction{p.value(), p.value(), 1.0});
  for (const auto& pt : samples) {
    if (pt.t < 1.0 || pt.t > 100.0) {
      throw ConfigError("decay lemma samples need t in [1, 100]");
    }
    const QuadratureResult q = retarded_potential(src, pt, opts);
    const double r = pt.radius();
    LemmaRow row;
    row.point = pt;
    row.potential = q.value;
    row.ratio = q.value * (1.0 + pt.t + r) * std::pow(1.0 + pt.t - r, p.value() - 2.0);
    row.converged = q.converged && !q.non_convergence;
    table.all_converged = table.all_converged && row.converged;
    if (table.rows.empty() || row.ratio > table.max_ratio) {
      table.max_ratio = row.ratio;
      table.argmax = pt;
    }
    table.rows.push_back(row);
  }
  return table;
}

std::vector<SpacetimePoint> lemma_sample_lattice(std::size_t per_family) {
  if (per_family < 2) throw ConfigError("lattice needs at least two times per family");
  std::vector<SpacetimePoint> out;
  for (std::size_t k = 0; k < per_family; ++k) {
    const double t = std::pow(100.0, static_cast<double>(k) /
                                         static_cast<double>(per_family - 1));
    out.push_back({t, {t - 1.0, 0.0, 0.0}});
    out.push_back({t, {0.0, 0.0, 0.0}});
    out.push_back({t, {1.0, 0.0, 0.0}});
  }
  return out;
}

BoundReport improved_bound_check(double weak_constant, Power p,
                                 const InitialDataSpec& spec,
                                 const std::vector<SpacetimePoint>& points,
                                 const std::vector<double>& measured,
                                 const QuadratureOptions& opts) {
  if (points.size() != measured.size()) {
    throw ConfigError("points and measured values differ in length");
  }
  if (!(weak_constant >= 0.0)) throw ConfigError("weak constant must be non-negative");
  BoundReport rep;
  rep.weak_constant = weak_constant;
  rep.p = p.value();
  const RadialSource src = weight_source(WeightFunction{p.value(), p.value(), 1.0});
  const double cp = std::pow(weak_constant, p.value());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    BoundRow row;
    row.point = pt;
    row.measured = std::abs(measured[i]);
    row.chi = std::abs(free_solution_kirchhoff(spec, pt));
    row.duhamel = cp == 0.0 ? 0.0 : cp * retarded_potential(src, pt, opts).value;
    row.bound = row.duhamel + row.chi;
    row.ok = row.measured <= row.bound;
    const double r = pt.radius();
    rep.implied_constant =
        std::max(rep.implied_constant,
                 row.bound * (1.0 + pt.t + r) * std::pow(1.0 + pt.t - r, p.value() - 2.0));
    if (!row.ok && rep.ok) {
      std::ostringstream os;
      os.precision(10);
      os << "measured " << row.measured << " exceeds bound " << row.bound << " at t="
         << pt.t << " |x|=" << r;
      rep.failure = os.str();
      rep.ok = false;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace decaylab
