#pragma once

#include <stdexcept>
#include <string>

namespace mpslab {

// Bad arguments or malformed inputs (dimension mismatches, out-of-range
// parameters, unnormalized states beyond tolerance).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A request that would exceed the configured dense-vector / matrix budget.
// Carries the size the request would have needed.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& what, long long required, long long limit)
      : std::runtime_error(what + " (required " + std::to_string(required) +
                           ", limit " + std::to_string(limit) + ")"),
        required_(required),
        limit_(limit) {}
  long long required() const { return required_; }
  long long limit() const { return limit_; }

 private:
  long long required_;
  long long limit_;
};

// Numerical breakdown: non-converged decomposition, spectra with entries
// below the clamping floor, NaN/Inf contamination.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Complete destructive interference when superposing translates.
class DestructiveInterferenceError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace mpslab
