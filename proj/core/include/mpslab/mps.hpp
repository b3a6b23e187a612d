#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mpslab/linalg.hpp"
#include "mpslab/spectrum.hpp"

// Open-boundary matrix product states over a uniform local dimension, with
// conversion to/from dense amplitude vectors, canonicalization, Schmidt
// spectra, bond truncation, overlaps, reduced blocks and distance measures.
//
// Site indices are 0-based.  A "cut" k (1 <= k <= N-1) separates the first k
// sites from the rest.  Amplitude indexing is big-endian: site 0 is the most
// significant digit.

namespace mpslab {

// Largest dense amplitude vector the library will materialize by default.
inline constexpr long long kDenseThreshold = 1LL << 24;

// d^n with overflow detection; returns -1 on overflow.
long long checked_pow(int d, int n);

// One matrix per physical index i, each D_left x D_right.
using SiteTensor = std::vector<Eigen::MatrixXcd>;

class MatrixProductState {
 public:
  MatrixProductState(int phys_dim, std::vector<SiteTensor> tensors);

  int num_sites() const { return static_cast<int>(tensors_.size()); }
  int phys_dim() const { return phys_dim_; }
  const SiteTensor& site(int k) const { return tensors_[k]; }
  const std::vector<SiteTensor>& tensors() const { return tensors_; }

  // Bond dimension left of site k; bond_dim(0) = bond_dim(N) = 1.
  long bond_dim(int k) const;
  long max_bond_dim() const;

  // Sites [0, n) satisfy the left-isometry condition.
  int left_iso_count() const { return left_iso_count_; }
  // Sites [m, N) satisfy the right-isometry condition.
  int right_iso_from() const { return right_iso_from_; }
  std::optional<double> norm_hint() const { return norm_hint_; }

  // Construction-time metadata claims (trusted by the algorithms, verified in
  // tests).
  MatrixProductState& with_canonical_claim(int left_iso_count, int right_iso_from);
  MatrixProductState& with_norm_hint(double n);

 private:
  int phys_dim_;
  std::vector<SiteTensor> tensors_;
  int left_iso_count_ = 0;
  int right_iso_from_ = 0;
  std::optional<double> norm_hint_;
};

// Angle-based equivalence of distance measures between two pure states.
struct DistanceReport {
  double theta = 0.0;                      // radians in [0, pi/2]
  double fidelity = 1.0;                   // |<a|b>| / (|a||b|) = cos(theta)
  double T = 0.0;                          // optimized trace-norm measure
  double V = 0.0;                          // optimized 2-norm measure
  double trace_distance_normalized = 0.0;  // || a^ - b^ ||_tr = 2 sin(theta)
};

// Per-cut truncation errors of a compression call, their sum, the achievable
// 2-norm bound 2*sum, and what the sweep actually realized.
struct TruncationReport {
  std::vector<double> eps_per_cut;  // from the *input* state's spectra
  double eps_sum = 0.0;
  double upper_bound = 0.0;         // 2 * eps_sum
  double realized_error = 0.0;      // || psi - phi ||_2
  double output_norm = 1.0;
};

// ---- reshape helpers shared by sweeps ----
Eigen::MatrixXcd stack_left(const SiteTensor& t);    // (D_l * d) x D_r, row a*d + i
SiteTensor unstack_left(const Eigen::MatrixXcd& m, int d);
Eigen::MatrixXcd stack_right(const SiteTensor& t);   // D_l x (d * D_r), col i*D_r + c
SiteTensor unstack_right(const Eigen::MatrixXcd& m, int d);

// ---- construction / conversion ----

// Builds an exact (or bond-capped) MPS from a dense amplitude vector of
// length d^N by successive SVDs.
MatrixProductState from_dense(const Eigen::VectorXcd& amplitudes, int phys_dim,
                              std::optional<long> max_bond = std::nullopt,
                              long long dense_threshold = kDenseThreshold);

// Evaluates all d^N amplitudes.
Eigen::VectorXcd to_dense(const MatrixProductState& m,
                          long long dense_threshold = kDenseThreshold);

// Chain concatenation: the tensor product state on Na + Nb sites.
MatrixProductState concat(const MatrixProductState& a, const MatrixProductState& b);

// ---- gauge / spectra ----

// Gauge-fixes so sites < center are left isometries and sites > center right
// isometries; the represented state is unchanged.
MatrixProductState canonicalize(const MatrixProductState& m, int center);

// Schmidt spectrum (eigenvalues of the left-block reduced state) at one cut.
Spectrum schmidt_spectrum(const MatrixProductState& m, int cut);

// All cuts 1..N-1 in one pass; the overload stops after `max_cut` cuts.
std::vector<Spectrum> schmidt_spectra(const MatrixProductState& m);
std::vector<Spectrum> schmidt_spectra(const MatrixProductState& m, int max_cut);

// 2-norm of the represented state.
double norm(const MatrixProductState& m);

// ---- compression ----

// Keeps the largest max_bond Schmidt values per cut (right-to-left
// canonicalization followed by a left-to-right SVD truncation sweep).  The
// output is not renormalized; its norm is sqrt(1 - lost weight).
std::pair<MatrixProductState, TruncationReport> compress(const MatrixProductState& m,
                                                         long max_bond);

// Exact-rank cleanup: drops singular values below rel_cutoff * s_max at every
// cut without otherwise changing the state.
MatrixProductState trim_zeros(const MatrixProductState& m, double rel_cutoff = 1e-13);

// ---- pairings ----

std::complex<double> overlap(const MatrixProductState& a, const MatrixProductState& b);

DistanceReport distances(const MatrixProductState& a, const MatrixProductState& b);

// Reduced density matrix of the contiguous block [first, first + len).
Eigen::MatrixXcd reduced_density(const MatrixProductState& m, int first, int len,
                                 long long dense_threshold = kDenseThreshold);

// Eigenvalue spectrum of a contiguous block, via the cheapest exact route
// (edge blocks through Schmidt spectra, interior blocks through
// reduced_density).  Throws ResourceLimitError when no exact route fits.
Spectrum block_spectrum(const MatrixProductState& m, int first, int len,
                        long long dense_threshold = kDenseThreshold);

// ---- ring operations ----

// Normalized sum of all N cyclic translates of the state (the chain is read
// as a ring; open-boundary embedding of each translate costs at most a factor
// D in bond dimension, so the output bond is <= N * D^2 before zero-trimming).
MatrixProductState translate_superposition(const MatrixProductState& m);

// Single cyclic translate by t sites (content of site k moves to k + t mod N).
MatrixProductState translate(const MatrixProductState& m, int t);

// ---- serialization ----

// Structured text format: header, per-site dimensions, row-major complex
// entries as decimal pairs at 17 significant digits.
void save_mps(const MatrixProductState& m, std::ostream& os);
MatrixProductState load_mps(std::istream& is);
void save_mps_file(const MatrixProductState& m, const std::string& path);
MatrixProductState load_mps_file(const std::string& path);

}  // namespace mpslab
