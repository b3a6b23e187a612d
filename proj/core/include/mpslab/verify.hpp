#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mpslab/entropy.hpp"
#include "mpslab/mps.hpp"
#include "mpslab/states.hpp"

// Randomized and deterministic verification harnesses for the truncation
// bounds, the continuity bound, the product-structure argument and the
// fidelity multiplicativity step, plus the scaling scans behind the
// approximability table.

namespace mpslab {

// Deterministic per-trial seed derived from a master seed (scheduling
// independent).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

// Random MPS with independent standard complex Gaussian tensor entries,
// canonicalized and normalized.  Interior bonds are min(D, d^k, d^(N-k)).
MatrixProductState random_mps(int N, int d, long D, std::uint64_t seed);

// Truncation lower bound: every normalized D-MPS candidate (random ones plus
// the compressed state itself) sits at normalized trace distance
// >= max_k eps_k(D) from psi.
BoundReport verify_eps_lower(const MatrixProductState& psi, long D, int trials,
                             std::uint64_t seed);

// Truncation upper bound: the realized 2-norm compression error never exceeds
// 2 sum_k eps_k(D).
BoundReport verify_eps_upper(const MatrixProductState& psi, const std::vector<long>& D_grid);

// One product-structure evaluation: Schmidt-decompose the candidate at the
// A|B cut, build the factorized state (phase-aligned Schmidt vectors, top-|b|
// subset on the B side) and report both fidelities to psiA (x) psiB.
struct ProductStructureCheck {
  double original_fidelity = 0.0;    // |<psiA psiB | candidate>|
  double factorized_fidelity = 0.0;  // |<psiA psiB | candidate'>|
  long schmidt_rank = 1;
  long tie_set_size = 1;
};
ProductStructureCheck product_structure_check(const MatrixProductState& psiA,
                                              const MatrixProductState& psiB,
                                              const MatrixProductState& candidate,
                                              long long dense_threshold = kDenseThreshold);

// Product-structure argument: factorizing a D-MPS candidate across the A|B
// cut never lowers the fidelity to a product state psiA (x) psiB.
BoundReport verify_product_structure(const MatrixProductState& psiA,
                                     const MatrixProductState& psiB, long D, int trials,
                                     std::uint64_t seed,
                                     long long dense_threshold = kDenseThreshold);

// K-copy measure bound T(phi^K, psi^K) >= sqrt(K/8) T(phi, psi), valid for
// T^2 <= 2/K (not-applicable outside the window).
BoundReport verify_multiplicativity(double T_single, int K);

// Entropy continuity on random density-matrix pairs (Wishart-style
// G G^dag / tr) at the stated dimension.
BoundReport verify_audenaert(int trials, int dim, std::uint64_t seed);

// Schur-concavity consequence: no sampled ordered distribution on 2^L
// outcomes with tail mass eps past position D exceeds
// max_renyi_given_truncation; the flat extremal distribution attains it.
BoundReport verify_majorization(double eps, long D, int L, RenyiOrder a, int samples,
                                std::uint64_t seed);

// One sorted sample with exact tail mass (Dirichlet head and tail with
// rejection on interleaving).
std::vector<double> sample_tail_constrained(double eps, long D, int L, std::mt19937_64& rng);

struct ScalingRow {
  std::string family;
  int N = 0;
  int L = 0;
  double alpha = 1.0;
  double entropy_bits = 0.0;
  long long D_required = 1;
  double delta_target = 0.0;
  bool skipped = false;
  std::string note;
};

// One row per (family grid point, block length, order): block entropy and the
// smallest bond dimension compatible with the per-cut truncation-error
// obstruction at the target error (for the copies family, the exact integer
// obstruction from the multiplicativity chain).
std::vector<ScalingRow> scaling_experiment(const std::string& family,
                                           const std::vector<FamilyParams>& grid,
                                           const std::vector<RenyiOrder>& alphas, double delta);

}  // namespace mpslab
