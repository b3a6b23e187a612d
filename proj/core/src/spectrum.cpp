#include "mpslab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "mpslab/linalg.hpp"

namespace mpslab {

Spectrum::Spectrum(std::vector<double> values, bool normalized)
    : values_(std::move(values)), normalized_(normalized) {
  if (values_.empty()) throw ValidationError("Spectrum: empty value list");
  for (double& v : values_) {
    if (!std::isfinite(v)) throw ValidationError("Spectrum: non-finite value");
    v = linalg::clamp_probability(v);
  }
  std::sort(values_.begin(), values_.end(), std::greater<double>());
  sum_ = 0.0;
  for (double v : values_) sum_ += v;
  if (normalized_ && std::abs(sum_ - 1.0) > kNormTol) {
    throw ValidationError("Spectrum tagged normalized but sums to " + std::to_string(sum_));
  }
}

std::size_t Spectrum::numerical_rank() const {
  std::size_t r = 0;
  for (double v : values_) {
    if (v > 1e-12) ++r;
  }
  return r;
}

double truncation_error(const Spectrum& s, long keep) {
  if (keep < 1) throw ValidationError("truncation_error: keep must be >= 1");
  double tail = 0.0;
  for (std::size_t i = static_cast<std::size_t>(keep); i < s.size(); ++i) tail += s[i];
  return std::min(1.0, std::max(0.0, tail));
}

long min_rank_for_truncation(const Spectrum& s, double budget) {
  double tail = s.sum();
  for (std::size_t keep = 0; keep <= s.size(); ++keep) {
    if (tail <= budget) return std::max<long>(1, static_cast<long>(keep));
    if (keep < s.size()) tail -= s[keep];
  }
  return static_cast<long>(s.size());
}

}  // namespace mpslab
