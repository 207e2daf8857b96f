#include "decaylab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "decaylab/conformal.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/sampling.hpp"

namespace decaylab {

namespace {

bool on_collar(const FieldSnapshot& s, std::size_t idx) {
  if (s.is_radial()) {
    return idx + 1 < s.size() && !s.valid(idx + 1);
  }
  const auto& g = s.cartesian_grid();
  const std::size_t n = g.size();
  const std::size_t i = idx % n, j = (idx / n) % n, k = idx / (n * n);
  if (i == 0 || j == 0 || k == 0 || i + 1 == n || j + 1 == n || k + 1 == n) {
    return s.frame() == Frame::compactified;
  }
  return !s.valid(idx - 1) || !s.valid(idx + 1) || !s.valid(idx - n) ||
         !s.valid(idx + n) || !s.valid(idx - n * n) || !s.valid(idx + n * n);
}

}  // namespace

DecayFit fit_power_law(std::span<const double> t, std::span<const double> y,
                       FitWindow window, std::string probe) {
  if (t.size() != y.size()) throw FitError("time and value series differ in length");
  if (!(window.t_min < window.t_max)) throw FitError("fit window needs t_min < t_max");
  DecayFit fit;
  fit.probe = std::move(probe);
  std::vector<double> tw, yw;
  bool positive = false, negative = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t_min || t[i] > window.t_max || !std::isfinite(y[i])) continue;
    if (y[i] == 0.0) {
      ++fit.zero_excluded;
      continue;
    }
    positive = positive || y[i] > 0.0;
    negative = negative || y[i] < 0.0;
    tw.push_back(t[i]);
    yw.push_back(std::abs(y[i]));
  }
  if (positive && negative) {
    std::vector<double> te, ye;
    for (std::size_t i = 1; i + 1 < yw.size(); ++i) {
      if (yw[i] >= yw[i - 1] && yw[i] >= yw[i + 1]) {
        te.push_back(tw[i]);
        ye.push_back(yw[i]);
      }
    }
    tw = std::move(te);
    yw = std::move(ye);
    fit.envelope = true;
  }
  if (tw.size() < 8) {
    throw FitError("fewer than 8 usable samples in the fit window (" +
                   std::to_string(tw.size()) + ")");
  }
  const double n = static_cast<double>(tw.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < tw.size(); ++i) {
    sx += std::log(tw[i]);
    sy += std::log(yw[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < tw.size(); ++i) {
    const double dx = std::log(tw[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(yw[i]) - my);
  }
  if (!(sxx > 0.0)) throw FitError("fit window holds a single time");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < tw.size(); ++i) {
    const double r = std::log(yw[i]) - (intercept + slope * std::log(tw[i]));
    ss += r * r;
  }
  fit.exponent = -slope;
  fit.amplitude = std::exp(intercept);
  fit.rms_residual = std::sqrt(ss / n);
  fit.t_min = tw.front();
  fit.t_max = tw.back();
  fit.samples = tw.size();
  return fit;
}

WeightedSup weighted_sup_constant(std::span<const FieldSnapshot> snapshots, Power p,
                                  WeightKind kind) {
  WeightedSup best;
  bool any = false;
  const double pv = p.value();
  for (const auto& s : snapshots) {
    const bool compact = s.frame() == Frame::compactified;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.valid(i)) continue;
      SpacetimePoint pt{s.time(), s.position(i)};
      double phi = s.value()[i];
      if (compact) {
        const double d = pt.interval();
        if (!(d > 0.0) || pt.t >= 0.0) continue;
        pt = phi_map(pt);
        phi *= d;
      }
      const double r = pt.radius();
      double w;
      if (kind == WeightKind::strong) {
        w = (1.0 + pt.t + r) * std::pow(1.0 + pt.t - r, pv - 2.0);
      } else {
        if (!(r < pt.t)) continue;
        w = pt.interval();
      }
      any = true;
      const double v = std::abs(phi) * w;
      if (v > best.value) {
        best.value = v;
        best.argmax = pt;
        best.on_collar = on_collar(s, i);
      }
    }
  }
  if (!any) throw SamplingError("no masked node available for the weighted sup");
  return best;
}

DecayFit fit_lightcone_decay(std::span<const FieldSnapshot> snapshots, double v0,
                             FitWindow window) {
  std::vector<double> u1, val;
  for (const auto& s : snapshots) {
    double t, r, scale = 1.0;
    SpacetimePoint q;
    if (s.frame() == Frame::physical) {
      t = s.time();
      r = t - v0;
      if (r < 0.0) continue;
      q = {t, {r, 0.0, 0.0}};
    } else {
      const double tc = s.time();
      const double rc = tc + 1.0 / v0;
      if (rc < 0.0 || tc >= 0.0) continue;
      q = {tc, {rc, 0.0, 0.0}};
      const double d = q.interval();
      if (!(d > 0.0)) continue;
      const SpacetimePoint pt = phi_map(q);
      t = pt.t;
      r = pt.radius();
      scale = d;
    }
    const double u = t + r;
    if (u < window.t_min || u > window.t_max) continue;
    try {
      val.push_back(sample_field(s, q) * scale);
      u1.push_back(1.0 + u);
    } catch (const SamplingError&) {
      continue;
    }
  }
  FitWindow shifted{1.0 + window.t_min, 1.0 + window.t_max};
  DecayFit fit = fit_power_law(u1, val, shifted, "shell v=" + std::to_string(v0));
  return fit;
}

TimeSeries origin_series_to_physical(std::span<const double> compact_times,
                                     std::span<const double> psi_values) {
  if (compact_times.size() != psi_values.size()) {
    throw FitError("time and value series differ in length");
  }
  TimeSeries out;
  for (std::size_t i = 0; i < compact_times.size(); ++i) {
    const double tc = compact_times[i];
    if (!(tc < 0.0) || !std::isfinite(psi_values[i])) continue;
    const double t = -1.0 / tc;
    out.t.push_back(t);
    out.y.push_back(psi_values[i] / (t * t));
  }
  if (out.t.size() > 1 && out.t.front() > out.t.back()) {
    std::reverse(out.t.begin(), out.t.end());
    std::reverse(out.y.begin(), out.y.end());
  }
  return out;
}

StabilityReport refinement_stability(std::span<const double> values, double threshold) {
  StabilityReport rep;
  rep.values.assign(values.begin(), values.end());
  rep.threshold = threshold;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double scale = std::max(std::abs(values[i]), std::abs(values[i - 1]));
    rep.relative_changes.push_back(
        scale > 0.0 ? std::abs(values[i] - values[i - 1]) / scale : 0.0);
  }
  rep.stable = !rep.relative_changes.empty() && rep.relative_changes.back() < threshold &&
               std::all_of(values.begin(), values.end(),
                           [](double v) { return std::isfinite(v); });
  return rep;
}

StabilityReport refinement_stability(const std::function<double(std::size_t)>& extract,
                                     std::span<const std::size_t> resolutions,
                                     double threshold) {
  std::vector<double> values;
  values.reserve(resolutions.size());
  for (std::size_t n : resolutions) values.push_back(extract(n));
  return refinement_stability(values, threshold);
}

}  // namespace decaylab
