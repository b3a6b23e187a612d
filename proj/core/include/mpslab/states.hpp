#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mpslab/entropy.hpp"
#include "mpslab/mps.hpp"

// Constructors for the example state families: the magic two-register qutrit
// family, its tensor-power wrapper, entangled-pair rings, tagged
// translation-invariant variants and elementary reference states.

namespace mpslab {

// sqrt(1-p) |2...2>  +  sqrt(p/2^N) sum_x |x>|x>  on 2N qutrit sites.
// Built directly in right-canonical form with unit norm; interior bond at cut
// k is 2^min(k, 2N-k, N) + 1 (one branch label plus the pair register).
MatrixProductState magic_state(int N, double p);

// Analytic block spectrum {1-p} u {p/2^L x 2^L} of any contiguous block of
// L <= N sites of magic_state(N, p).  Cross-validated against the MPS
// machinery at desk scale by the test suite.
Spectrum magic_block_spectrum(int N, double p, int L);

// Closed-form block Renyi entropy of the magic family in bits.
double magic_block_renyi(double p, int L, RenyiOrder a);

// K unmaterialized copies of a base chain laid side by side.
struct ProductOfCopies {
  MatrixProductState base;
  int copies = 1;

  long long total_sites() const {
    return static_cast<long long>(base.num_sites()) * copies;
  }
};

// Parameter bundle for family grids (used by scaling experiments).
struct FamilyParams {
  int N = 0;
  double p = 0.0;
  int nu = 0;
  double kappa = 0.0;
  int copies = 1;
};

ProductOfCopies chi_copies(int N, double p, int K);

// Materializes base^{otimes copies} as one chain.
MatrixProductState materialize(const ProductOfCopies& c);

struct BlockEntropy {
  double bits = 0.0;
  bool exact = true;  // false: `bits` is a rigorous upper bound (two-cut subadditivity)
};

// Block entropies of the copies chain, computed per copy and combined by
// additivity over tensor factors.  Pieces touching a copy boundary are read
// off the base Schmidt spectra; interior pieces use the dense block route
// when it is affordable and otherwise fall back to the two-cut subadditivity
// upper bound (von Neumann order only).
class ChiBlockEntropies {
 public:
  ChiBlockEntropies(ProductOfCopies c, RenyiOrder a);

  BlockEntropy block(long long first, long long len);

  // Largest cut entropy through one copy (the per-copy area-law cap).
  double max_cut_entropy() const;
  const ProductOfCopies& copies() const { return c_; }

 private:
  BlockEntropy piece(int a, int b);

  ProductOfCopies c_;
  RenyiOrder a_;
  std::vector<Spectrum> cut_spectra_;
  std::vector<double> cut_entropy_;
  std::vector<std::vector<std::optional<BlockEntropy>>> piece_cache_;
};

// One-shot helpers (construct a ChiBlockEntropies for repeated queries).
BlockEntropy chi_block_entropy(const ProductOfCopies& c, long long first, long long len,
                               RenyiOrder a);
double chi_max_cut_entropy(const ProductOfCopies& c, RenyiOrder a);

// Exact integer bond obstruction for approximating the copies chain to
// trace-norm measure T = t_num / t_den: ceil(2^N (1 - 8 T)) + 1.
long long chi_bond_obstruction(int N, long long t_num, long long t_den);

// nu maximally entangled pairs (|00> + |11>)/sqrt(2) between opposite sites k
// and k + N/2 of an N-site qubit ring (stored on an open chain), remaining
// sites |0>.  Pair positions: floor(j N / (2 nu)), j = 0..nu-1.
MatrixProductState pair_ring(int N, int nu);

// Positions chosen by pair_ring (left endpoints).
std::vector<int> pair_ring_positions(int N, int nu);

// Interleaves each copy with a tag block |10...0> of the copy's length, then
// superposes all cyclic translations (desk scale only).
MatrixProductState tagged_translational_invariant(const ProductOfCopies& base,
                                                  long long dense_threshold = kDenseThreshold);

enum class ElementaryKind { all_up, ghz, basis };

MatrixProductState elementary_state(ElementaryKind kind, int N, int d, long long basis_index = 0);

}  // namespace mpslab
