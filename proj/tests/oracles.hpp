#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// brute-force grid minimization for smooth entropies, dense translate sums,
// dense partial traces, and scale-optimized distance measures.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mpslab/entropy.hpp"
#include "mpslab/linalg.hpp"
#include "mpslab/mps.hpp"

namespace oracles {

// Minimal S_alpha over sorted spectra on a uniform grid (resolution 1/units)
// within trace-norm distance eps of `lambda`, for several orders in one
// exhaustive DFS.  Enumeration is confined to the L1 ball around lambda.
inline std::vector<double> smooth_min_grid_multi(const std::vector<double>& lambda,
                                                 const std::vector<mpslab::RenyiOrder>& alphas,
                                                 double eps, int units) {
  const int n = static_cast<int>(lambda.size());
  std::vector<int> lam_units(n);
  for (int i = 0; i < n; ++i) lam_units[i] = static_cast<int>(std::lround(lambda[i] * units));
  const int budget = static_cast<int>(std::lround(eps * units));

  std::vector<double> best(alphas.size(), std::numeric_limits<double>::infinity());
  std::vector<int> sigma(n);
  auto evaluate = [&] {
    for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
      const double alpha = alphas[ai].alpha;
      double value;
      if (alpha == 0.0) {
        int rank = 0;
        for (int k = 0; k < n; ++k) rank += sigma[k] > 0 ? 1 : 0;
        value = std::log2(std::max(1, rank));
      } else if (std::isinf(alpha)) {
        value = -std::log2(static_cast<double>(sigma[0]) / units);
      } else if (alpha == 1.0) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          if (sigma[k] > 0) {
            const double p = static_cast<double>(sigma[k]) / units;
            acc -= p * std::log2(p);
          }
        }
        value = acc;
      } else {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
          if (sigma[k] > 0) acc += std::pow(static_cast<double>(sigma[k]) / units, alpha);
        }
        value = std::log2(acc) / (1.0 - alpha);
      }
      best[ai] = std::min(best[ai], value);
    }
  };
  // i: position, mass: remaining units, cap: sorted ceiling, dist: used L1 units
  std::function<void(int, int, int, int)> dfs = [&](int i, int mass, int cap, int dist) {
    const int slack = budget - dist;
    if (slack < 0) return;
    if (i == n - 1) {
      if (mass > cap || std::abs(mass - lam_units[i]) > slack) return;
      sigma[i] = mass;
      evaluate();
      return;
    }
    const int min_v = std::max((mass + (n - i) - 1) / (n - i), lam_units[i] - slack);
    const int max_v = std::min({cap, mass, lam_units[i] + slack});
    for (int v = max_v; v >= min_v; --v) {
      sigma[i] = v;
      dfs(i + 1, mass - v, v, dist + std::abs(v - lam_units[i]));
    }
  };
  dfs(0, units, units, 0);
  return best;
}

inline double smooth_min_grid(const std::vector<double>& lambda, mpslab::RenyiOrder a, double eps,
                              int units) {
  return smooth_min_grid_multi(lambda, {a}, eps, units)[0];
}

// Sum of all cyclic translates of a dense amplitude vector, normalized.
inline Eigen::VectorXcd translate_sum_dense(const Eigen::VectorXcd& v, int n, int d) {
  const long long len = v.size();
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(len);
  std::vector<long long> pow(n + 1, 1);
  for (int k = 1; k <= n; ++k) pow[k] = pow[k - 1] * d;
  for (int t = 0; t < n; ++t) {
    for (long long idx = 0; idx < len; ++idx) {
      // digit at new site j comes from old site (j - t) mod n ... equivalently
      // new index built by rotating the digit string right by t
      long long src = 0;
      for (int j = 0; j < n; ++j) {
        const int jo = ((j - t) % n + n) % n;
        const int digit = static_cast<int>((idx / pow[n - 1 - j]) % d);
        src += static_cast<long long>(digit) * pow[n - 1 - jo];
      }
      acc(idx) += v(src);
    }
  }
  return acc / acc.norm();
}

// Dense reduced density matrix of contiguous sites [first, first+len).
inline Eigen::MatrixXcd dense_reduced(const Eigen::VectorXcd& v, int n, int d, int first, int len) {
  long long dl = 1, db = 1, dr = 1;
  for (int k = 0; k < first; ++k) dl *= d;
  for (int k = 0; k < len; ++k) db *= d;
  for (int k = first + len; k < n; ++k) dr *= d;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(db, db);
  for (long long a = 0; a < dl; ++a) {
    for (long long s = 0; s < db; ++s) {
      for (long long sp = 0; sp < db; ++sp) {
        std::complex<double> acc = 0.0;
        for (long long c = 0; c < dr; ++c) {
          acc += v((a * db + s) * dr + c) * std::conj(v((a * db + sp) * dr + c));
        }
        rho(s, sp) += acc;
      }
    }
  }
  return rho;
}

// Optimized trace-norm measure inf_alpha ||psi - alpha phi||_tr by dense grid
// search with refinement over the real scale alpha >= 0.
inline double trace_measure_grid(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi) {
  Eigen::VectorXcd p = psi / psi.norm();
  Eigen::VectorXcd q = phi / phi.norm();
  auto value = [&](double alpha) {
    Eigen::MatrixXcd m = p * p.adjoint() - alpha * (q * q.adjoint());
    Eigen::VectorXd ev = mpslab::linalg::hermitian_eigvals(m);
    return ev.cwiseAbs().sum();
  };
  double lo = 0.0, hi = 2.0, best_a = 0.0, best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 6; ++round) {
    const int steps = 40;
    for (int i = 0; i <= steps; ++i) {
      const double a = lo + (hi - lo) * i / steps;
      const double v = value(a);
      if (v < best) {
        best = v;
        best_a = a;
      }
    }
    const double w = (hi - lo) / steps;
    lo = std::max(0.0, best_a - 2 * w);
    hi = best_a + 2 * w;
  }
  return best;
}

// Optimized 2-norm measure inf_alpha || |psi> - alpha|phi> ||_2 over complex
// alpha by grid search with refinement.
inline double two_norm_measure_grid(const Eigen::VectorXcd& psi, const Eigen::VectorXcd& phi) {
  Eigen::VectorXcd p = psi / psi.norm();
  Eigen::VectorXcd q = phi / phi.norm();
  auto value = [&](std::complex<double> alpha) { return (p - alpha * q).norm(); };
  double best = std::numeric_limits<double>::infinity();
  std::complex<double> best_a = 0.0;
  double radius = 1.5;
  std::complex<double> center = 0.0;
  for (int round = 0; round < 8; ++round) {
    const int steps = 24;
    for (int i = -steps; i <= steps; ++i) {
      for (int j = -steps; j <= steps; ++j) {
        const std::complex<double> a =
            center + std::complex<double>(radius * i / steps, radius * j / steps);
        const double v = value(a);
        if (v < best) {
          best = v;
          best_a = a;
        }
      }
    }
    center = best_a;
    radius = radius / steps * 3;
  }
  return best;
}

}  // namespace oracles
