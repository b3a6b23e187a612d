#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpslab/mps.hpp"

// Time evolution of a spin chain under the transverse-field Ising model:
// exact reference evolution at small N via Hermitian eigendecomposition
// (parity-sector blocked), and Trotterized two-site-gate MPS evolution with
// per-bond retruncation at larger N.

namespace mpslab {

enum class Boundary { open, periodic };

// Coupling axis: `xx` is the production convention H = -sum X X - g sum Z;
// `zz` (H = -sum Z Z - g sum Z) is a commuting-Hamiltonian self-test knob.
enum class Coupling { xx, zz };

struct IsingSpec {
  int N = 2;
  double g = 1.0;  // critical point at g = 1
  Boundary boundary = Boundary::open;
  Coupling coupling = Coupling::xx;
};

struct QuenchResult {
  std::vector<double> times;
  std::vector<double> half_chain_entropy_bits;
  std::vector<long> max_bond;
  std::vector<double> per_step_truncation;   // squared weight dropped during the step
  std::vector<double> exact_error;           // 2-norm vs exact reference; empty if not computed
  double cumulative_truncation = 0.0;
  double trotter_error_scale = 0.0;          // reported steps * dt^3 heuristic scale
  bool truncated_run = false;                // halted at the hard bond cap
  std::string note;
};

// Dense 2^N x 2^N Hamiltonian matrix.
Eigen::MatrixXcd ising_hamiltonian(const IsingSpec& spec, long long matrix_dim_limit = 1 << 13);

// Exact evolution e^{-iHt}|psi0> at the given times (increasing from 0),
// recording the half-chain entropy.  psi0 is a dense amplitude vector.
QuenchResult exact_evolve(const Eigen::VectorXcd& psi0, const IsingSpec& spec,
                          const std::vector<double>& times,
                          long long matrix_dim_limit = 1 << 13);

// Exact evolved state at a single time (shared eigenbasis helper for
// cross-validation).
class ExactPropagator {
 public:
  ExactPropagator(const IsingSpec& spec, long long matrix_dim_limit = 1 << 13);
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi0, double t) const;
  int num_sites() const { return spec_.N; }

 private:
  IsingSpec spec_;
  // parity-sector eigendecompositions
  std::vector<std::vector<long>> sector_states_;
  std::vector<Eigen::VectorXd> sector_eigenvalues_;
  std::vector<Eigen::MatrixXcd> sector_eigenvectors_;
};

struct TebdPolicy {
  std::optional<long> max_bond;      // keep-at-most policy
  double step_budget = 0.0;          // per-step discarded-weight budget (split over bonds)
  long hard_cap = 1024;              // run halts (flagged) when a bond would exceed this
};

struct TebdRun {
  QuenchResult result;
  MatrixProductState final_state;
};

// Second-order Trotter evolution (odd half, even full, odd half per step) on
// an open chain, measuring the half-chain entropy after every step.  When
// `reference` is set, the 2-norm error against the exact evolved state is
// recorded at every step.  `t_offset` shifts the reported times (for chunked
// continuation runs).
TebdRun tebd_evolve(const MatrixProductState& psi0, const IsingSpec& spec, double dt, int steps,
                    const TebdPolicy& policy, const ExactPropagator* reference = nullptr,
                    double t_offset = 0.0);

struct GrowthReport {
  double slope_bits_per_time = 0.0;
  double slope_nats_per_time = 0.0;
  std::vector<long> bond_thresholds;        // 2, 4, 8, ...
  std::vector<double> bond_doubling_times;  // first time max_bond reached each threshold
};

// Least-squares entropy slope over [t0, t1] (at least 5 samples) and the
// first-passage times of the bond dimension through successive powers of two.
GrowthReport entropy_growth_report(const QuenchResult& r, double t0, double t1);

}  // namespace mpslab
