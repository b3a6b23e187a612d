#include "mpslab/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace mpslab {

namespace {

constexpr double kRankFloor = 1e-12;

double log2_safe(double x) { return std::log2(x); }

void require_normalized(const Spectrum& s, const char* who) {
  if (std::abs(s.sum() - 1.0) > Spectrum::kNormTol) {
    throw ValidationError(std::string(who) + ": spectrum not normalized (sum=" +
                          std::to_string(s.sum()) + ")");
  }
}

}  // namespace

std::string to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::holds: return "holds";
    case BoundStatus::violated: return "violated";
    case BoundStatus::not_applicable: return "not-applicable";
  }
  return "?";
}

double binary_entropy(double t) {
  if (t < 0.0 || t > 1.0) throw ValidationError("binary_entropy: argument outside [0,1]");
  double h = 0.0;
  if (t > 0.0) h -= t * log2_safe(t);
  if (t < 1.0) h -= (1.0 - t) * log2_safe(1.0 - t);
  return h;
}

double renyi_entropy(const Spectrum& s, RenyiOrder a) {
  if (std::isnan(a.alpha) || a.alpha < 0.0) {
    throw ValidationError("renyi_entropy: alpha must be nonnegative");
  }
  require_normalized(s, "renyi_entropy");

  double value;
  if (a.alpha == 0.0) {
    value = log2_safe(static_cast<double>(std::max<std::size_t>(1, s.numerical_rank())));
  } else if (a.is_inf()) {
    value = -log2_safe(s.max_value());
  } else if (a.is_one()) {
    double acc = 0.0;
    for (double v : s.values()) {
      if (v > 0.0) acc -= v * log2_safe(v);
    }
    value = acc;
  } else {
    double acc = 0.0;
    for (double v : s.values()) {
      if (v > 0.0) acc += std::pow(v, a.alpha);
    }
    value = log2_safe(acc) / (1.0 - a.alpha);
  }
  // round-off can leave a value like -1e-16 on pure states
  if (value < 0.0 && value > -1e-9) value = 0.0;
  return value;
}

double max_renyi_given_truncation(double eps, long D, int L, RenyiOrder a) {
  if (!(a.alpha > 1.0) || a.is_inf()) {
    throw ValidationError("max_renyi_given_truncation: requires finite alpha > 1");
  }
  if (eps < 0.0 || eps >= 1.0) throw ValidationError("max_renyi_given_truncation: eps outside [0,1)");
  if (L < 1 || L > 62) throw ValidationError("max_renyi_given_truncation: L outside [1,62]");
  const double dim = std::ldexp(1.0, L);  // 2^L
  if (D < 1 || static_cast<double>(D) >= dim) {
    throw ValidationError("max_renyi_given_truncation: requires 1 <= D < 2^L");
  }
  const double al = a.alpha;
  double head = std::pow(1.0 - eps, al) / std::pow(static_cast<double>(D), al - 1.0);
  double tail = eps > 0.0 ? std::pow(eps, al) / std::pow(dim - static_cast<double>(D), al - 1.0) : 0.0;
  return -log2_safe(head + tail) / (al - 1.0);
}

double max_renyi_given_truncation_loose(double eps, long D, RenyiOrder a) {
  if (!(a.alpha > 1.0) || a.is_inf()) {
    throw ValidationError("max_renyi_given_truncation_loose: requires finite alpha > 1");
  }
  if (eps < 0.0 || eps >= 1.0) throw ValidationError("max_renyi_given_truncation_loose: eps outside [0,1)");
  if (D < 1) throw ValidationError("max_renyi_given_truncation_loose: D must be >= 1");
  return log2_safe(static_cast<double>(D)) - a.alpha / (a.alpha - 1.0) * log2_safe(1.0 - eps);
}

Spectrum smooth_spectrum(const Spectrum& s, double eps) {
  if (eps < 0.0 || eps >= 1.0) throw ValidationError("smooth_spectrum: eps outside [0,1)");
  require_normalized(s, "smooth_spectrum");
  std::vector<double> v = s.values();
  double budget = eps / 2.0;
  double moved = 0.0;
  for (std::size_t i = v.size(); i-- > 1 && budget > 0.0;) {
    const double cut = std::min(v[i], budget);
    v[i] -= cut;
    moved += cut;
    budget -= cut;
  }
  v[0] += moved;
  return Spectrum(std::move(v), true);
}

double smooth_renyi(const Spectrum& s, RenyiOrder a, double eps) {
  if (eps < 0.0 || eps >= 1.0) throw ValidationError("smooth_renyi: eps outside [0,1)");
  if (eps == 0.0) return renyi_entropy(s, a);
  return renyi_entropy(smooth_spectrum(s, eps), a);
}

double audenaert_bound(double T, long K) {
  if (T < 0.0 || T > 1.0) throw ValidationError("audenaert_bound: T outside [0,1]");
  if (K < 2) throw ValidationError("audenaert_bound: K must be >= 2");
  return T * log2_safe(static_cast<double>(K - 1)) + binary_entropy(T);
}

BoundReport bond_bound_von_neumann(double S_block, double delta, long L, int d) {
  if (S_block < 0.0) throw ValidationError("bond_bound_von_neumann: S_block must be >= 0");
  if (delta < 0.0 || delta > 2.0) throw ValidationError("bond_bound_von_neumann: delta outside [0,2]");
  if (L < 1 || d < 2) throw ValidationError("bond_bound_von_neumann: bad block shape");
  BoundReport r;
  r.name = "bond_bound_von_neumann";
  r.bound_value = S_block - 0.5 * delta * static_cast<double>(L) * log2_safe(d) - 1.0;
  r.inputs_echo = "S=" + std::to_string(S_block) + " delta=" + std::to_string(delta) +
                  " L=" + std::to_string(L) + " d=" + std::to_string(d);
  return r;
}

BoundReport bond_bound_renyi(double S_alpha, double delta, RenyiOrder a) {
  if (!(a.alpha > 1.0)) throw ValidationError("bond_bound_renyi: requires alpha > 1");
  if (delta < 0.0 || delta >= 1.0) throw ValidationError("bond_bound_renyi: delta outside [0,1)");
  if (S_alpha < 0.0) throw ValidationError("bond_bound_renyi: S_alpha must be >= 0");
  BoundReport r;
  r.name = "bond_bound_renyi";
  const double penalty = a.is_inf() ? std::abs(log2_safe(1.0 - delta))
                                    : a.alpha / (a.alpha - 1.0) * std::abs(log2_safe(1.0 - delta));
  r.bound_value = S_alpha - penalty;
  r.inputs_echo = "S_alpha=" + std::to_string(S_alpha) + " delta=" + std::to_string(delta) +
                  " alpha=" + std::to_string(a.alpha);
  return r;
}

}  // namespace mpslab
