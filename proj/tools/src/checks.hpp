#pragma once

#include <cstdint>
#include <vector>

#include "decaylab/initial_data.hpp"

namespace decaylab::cli {

struct ConformalCheck {
  std::vector<double> steps;
  std::vector<double> residuals;  // max over the test points, per step
  double min_order = 0.0;
  double map_identity_max = 0.0;  // worst relative error of the map identities
};

/// Identity residual of a Gaussian at fixed points for steps 1e-2, 5e-3,
/// 2.5e-3, plus involution / reciprocity / null-coordinate identities on
/// `random_points` random points of both cones.
ConformalCheck run_conformal_checks(std::size_t random_points, std::uint64_t seed);

struct HuygensCheck {
  double t_min = 0.0;         // 1 + alpha + |c| + 2h
  double max_after = 0.0;     // max |chi(t, 0)| over t in (t_min, 20]
  double weighted_sup = 0.0;  // max_t t sup_r |chi(t, r)| on a radial lattice of spacing h
};

HuygensCheck run_huygens_check(const InitialDataSpec& spec, double h);

}  // namespace decaylab::cli
