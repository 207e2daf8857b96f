#pragma once

#include <stdexcept>
#include <string>

namespace decaylab {

/// Invalid scenario or grid configuration, detected before any work is done.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies outside the region where a map or coefficient is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Interpolation requested outside the grid or outside the validity mask.
class SamplingError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Too few usable samples for a decay fit.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace decaylab
