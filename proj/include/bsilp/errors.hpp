#pragma once

#include <stdexcept>
#include <string>

namespace bsilp {

// Malformed input data, schema violations, bad arguments. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was handed a measure kind it has no closed form for.
class UnsupportedMeasureError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Decision outside the induced feasible set, or a sampled noise realization
// left the follower without any feasible point. CLI exit code 2.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cell enumeration would exceed the configured budget. CLI exit code 3.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bsilp
