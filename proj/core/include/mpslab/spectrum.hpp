#pragma once

#include <vector>

#include "mpslab/errors.hpp"

namespace mpslab {

// Ordered probability vector: the eigenvalue spectrum of a reduced block, or
// any classical distribution fed to the entropy functionals.  Values are
// sorted nonincreasing on construction and tiny negatives are clamped per the
// linalg rule.
class Spectrum {
 public:
  // `normalized` tags the spectrum as a probability distribution and enforces
  // sum = 1 within kNormTol.
  explicit Spectrum(std::vector<double> values, bool normalized = true);

  static constexpr double kNormTol = 1e-8;

  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double sum() const { return sum_; }
  bool normalized_tag() const { return normalized_; }
  double max_value() const { return values_.empty() ? 0.0 : values_.front(); }

  // Count of values above the rank floor (1e-12).
  std::size_t numerical_rank() const;

 private:
  std::vector<double> values_;
  double sum_ = 0.0;
  bool normalized_ = false;
};

// Total weight beyond the largest `keep` values: sum_{i > keep} s_i.
// keep >= 1 (a Schmidt decomposition always has rank at least one).
double truncation_error(const Spectrum& s, long keep);

// Smallest keep-count whose truncation error is <= budget.
long min_rank_for_truncation(const Spectrum& s, double budget);

}  // namespace mpslab
