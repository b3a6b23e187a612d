#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "mpslab/spectrum.hpp"

// Entropy functionals and inequality bounds acting on spectra.  All entropies
// are in bits (log base 2).

namespace mpslab {

// Extended nonnegative Renyi order; alpha == 1 dispatches to the von Neumann
// formula, alpha == inf to the min-entropy.
struct RenyiOrder {
  double alpha = 1.0;

  static RenyiOrder von_neumann() { return {1.0}; }
  static RenyiOrder min_entropy() { return {std::numeric_limits<double>::infinity()}; }
  static RenyiOrder rank() { return {0.0}; }

  bool is_one() const { return alpha == 1.0; }
  bool is_inf() const { return std::isinf(alpha); }
};

enum class BoundStatus { holds, violated, not_applicable };

// Uniform carrier for bound evaluations and randomized verification runs.
// `satisfied` is `violated` only when the checked inequality fails by more
// than kViolationTol.
struct BoundReport {
  std::string name;
  double bound_value = 0.0;    // bits, when the report carries a bound
  std::string inputs_echo;
  BoundStatus satisfied = BoundStatus::not_applicable;
  long trials = 0;
  long violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  // min slack seen
  unsigned long long seed = 0;
  std::string note;

  static constexpr double kViolationTol = 1e-8;
};

std::string to_string(BoundStatus s);

double binary_entropy(double t);  // H(t, 1-t) in bits, H(0)=H(1)=0

// S_alpha of a normalized spectrum.
//   alpha = 0   -> log2 of the count of values > 1e-12
//   alpha = 1   -> -sum lambda log2 lambda  (0 log 0 = 0)
//   alpha = inf -> -log2 lambda_max
// Negative alpha is rejected.
double renyi_entropy(const Spectrum& s, RenyiOrder a);

// Maximal S_alpha (alpha > 1, finite) over ordered distributions on 2^L
// outcomes whose tail beyond position D has mass eps; attained by the
// distribution that is flat on the first D and flat on the rest.
double max_renyi_given_truncation(double eps, long D, int L, RenyiOrder a);

// The weaker closed form log2 D - alpha/(alpha-1) * log2(1-eps).
double max_renyi_given_truncation_loose(double eps, long D, RenyiOrder a);

// Minimal S_alpha over spectra within trace-norm budget eps of s, searched
// over spectra diagonal in the same basis: tail mass up to eps/2 is cut
// (smallest values first) and moved onto the largest value.
double smooth_renyi(const Spectrum& s, RenyiOrder a, double eps);

// The smoothed spectrum itself (what smooth_renyi evaluates).
Spectrum smooth_spectrum(const Spectrum& s, double eps);

// Audenaert continuity bound T log2(K-1) + H(T) on |S(rho) - S(sigma)| for
// density operators on a K-dimensional space at half trace distance T.
double audenaert_bound(double T, long K);

// Lower bound on log2 D for any MPS within trace distance delta of a state
// with block entropy S_block over L sites of local dimension d:
//   S_block - delta*L*log2(d)/2 - 1.
BoundReport bond_bound_von_neumann(double S_block, double delta, long L, int d);

// Renyi (alpha > 1) analogue: S_alpha - alpha/(alpha-1) * |log2(1-delta)|.
BoundReport bond_bound_renyi(double S_alpha, double delta, RenyiOrder a);

}  // namespace mpslab
