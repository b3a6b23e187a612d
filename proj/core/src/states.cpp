#include "mpslab/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpslab {

using linalg::ComplexMatrix;

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// largest interior-piece dimension handled exactly by the dense block route
constexpr long long kChiDenseCap = 729;

void check_magic_params(int N, double p) {
  if (N < 1) throw ValidationError("magic_state: N must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("magic_state: p outside [0,1]");
  if (N > 11) {
    throw ResourceLimitError("magic_state: pair register too large", 1LL << N, 1LL << 11);
  }
}

}  // namespace

MatrixProductState magic_state(int N, double p) {
  check_magic_params(N, p);
  const int n = 2 * N;
  const int d = 3;
  const bool has_a = p < 1.0;   // |2...2> branch
  const bool has_b = p > 0.0;   // pair-register branch
  const long a = has_a ? 1 : 0;

  auto b_dim = [&](int cut) -> long {  // pair-register width at bond `cut`
    if (!has_b) return 0;
    const int m = std::min(cut, n - cut);
    return 1L << std::min(m, N);
  };

  std::vector<SiteTensor> sites(n);
  for (int k = 0; k < n; ++k) {
    const long rows = (k == 0 ? 1 : a + b_dim(k));
    const long cols = (k == n - 1 ? 1 : a + b_dim(k + 1));
    sites[k] = SiteTensor(d, ComplexMatrix::Zero(rows, cols));
    if (k == 0) {
      if (has_a) sites[k][2](0, 0) = std::sqrt(1.0 - p);
      if (has_b) {
        for (int i = 0; i < 2; ++i) sites[k][i](0, a + i) = std::sqrt(p) * kInvSqrt2;
      }
      continue;
    }
    if (has_a && k < n - 1) sites[k][2](0, 0) = 1.0;
    if (has_a && k == n - 1) sites[k][2](0, 0) = 1.0;
    if (!has_b) continue;
    if (k < N) {
      // record half: append one bit of x
      const long w = 1L << k;
      for (long y = 0; y < w; ++y) {
        for (int i = 0; i < 2; ++i) sites[k][i](a + y, a + 2 * y + i) = kInvSqrt2;
      }
    } else {
      // consume half: physical index must reproduce the most significant bit
      const long m = 1L << (n - 1 - k);  // remaining register width after this site
      for (long b = 0; b < m; ++b) {
        for (int i = 0; i < 2; ++i) {
          sites[k][i](a + i * m + b, (k == n - 1 ? 0 : a + b)) = 1.0;
        }
      }
    }
  }
  MatrixProductState out(d, std::move(sites));
  out.with_canonical_claim(0, 1);
  out.with_norm_hint(1.0);
  return out;
}

Spectrum magic_block_spectrum(int N, double p, int L) {
  if (N < 1) throw ValidationError("magic_block_spectrum: N must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("magic_block_spectrum: p outside [0,1]");
  if (L < 1 || L > N) throw ValidationError("magic_block_spectrum: requires 1 <= L <= N");
  if (L > 24) throw ResourceLimitError("magic_block_spectrum: spectrum too large", 1LL << L, 1LL << 24);
  std::vector<double> v;
  v.reserve((1L << L) + 1);
  if (p < 1.0) v.push_back(1.0 - p);
  if (p > 0.0) {
    const double w = p / std::ldexp(1.0, L);
    for (long i = 0; i < (1L << L); ++i) v.push_back(w);
  }
  return Spectrum(std::move(v), true);
}

double magic_block_renyi(double p, int L, RenyiOrder a) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("magic_block_renyi: p outside [0,1]");
  if (L < 1 || L > 60) throw ValidationError("magic_block_renyi: L out of range");
  if (std::isnan(a.alpha) || a.alpha < 0.0) throw ValidationError("magic_block_renyi: bad alpha");
  const double dim = std::ldexp(1.0, L);
  if (a.alpha == 0.0) {
    double rank = 0.0;
    if (1.0 - p > 1e-12) rank += 1.0;
    if (p / dim > 1e-12) rank += dim;
    return std::log2(std::max(1.0, rank));
  }
  if (a.is_inf()) return -std::log2(std::max(1.0 - p, p / dim));
  if (a.is_one()) return binary_entropy(p) + p * static_cast<double>(L);
  double acc = 0.0;
  if (p < 1.0) acc += std::pow(1.0 - p, a.alpha);
  if (p > 0.0) acc += std::pow(2.0, (1.0 - a.alpha) * L) * std::pow(p, a.alpha);
  return std::log2(acc) / (1.0 - a.alpha);
}

ProductOfCopies chi_copies(int N, double p, int K) {
  if (K < 1) throw ValidationError("chi_copies: K must be >= 1");
  return ProductOfCopies{magic_state(N, p), K};
}

MatrixProductState materialize(const ProductOfCopies& c) {
  MatrixProductState out = c.base;
  for (int k = 1; k < c.copies; ++k) out = concat(out, c.base);
  return out;
}

// ------------------------------------------------------- chi block entropy

ChiBlockEntropies::ChiBlockEntropies(ProductOfCopies c, RenyiOrder a)
    : c_(std::move(c)), a_(a) {
  cut_spectra_ = schmidt_spectra(c_.base);
  cut_entropy_.reserve(cut_spectra_.size());
  for (const auto& s : cut_spectra_) cut_entropy_.push_back(renyi_entropy(s, a_));
  const int B = c_.base.num_sites();
  const int d = c_.base.phys_dim();
  piece_cache_.assign(B + 1, std::vector<std::optional<BlockEntropy>>(B + 1));

  // Exact interior pieces, computed in one incremental canonical-center sweep
  // so each step pays only a single orthogonalization.  The sweep stops at
  // the first bond too fat to orthogonalize cheaply; pieces beyond it fall
  // back to the two-cut bound.
  constexpr long kSweepBondCap = 600;
  constexpr long long kPieceFlopCap = 300'000'000;
  // contraction + eigensolve work estimate for the piece [a0, b)
  auto piece_cost = [&](int a0, int b) -> long long {
    const long long da = c_.base.bond_dim(a0);
    long long cost = 0, rows = da;
    for (int k = a0; k < b; ++k) {
      rows *= d;
      cost += rows * c_.base.bond_dim(k) * c_.base.bond_dim(k + 1);
      if (cost > kPieceFlopCap) return cost;
    }
    const long long dim = checked_pow(d, b - a0);
    if (dim < 0 || dim > kChiDenseCap) return kPieceFlopCap + 1;
    cost += dim * dim * (da * c_.base.bond_dim(b) + dim);
    return cost;
  };

  MatrixProductState work = c_.base;
  for (int a0 = 1; a0 + 1 < B; ++a0) {
    if (c_.base.bond_dim(a0) > kSweepBondCap) break;
    bool any = false;
    for (int b = a0 + 1; b < B && !any; ++b) {
      const long long dim = checked_pow(d, b - a0);
      if (dim < 0 || dim > kChiDenseCap) break;
      any = piece_cost(a0, b) <= kPieceFlopCap;
    }
    if (!any) continue;

    work = canonicalize(work, a0);
    for (int b = a0 + 1; b < B; ++b) {
      const long long dim = checked_pow(d, b - a0);
      if (dim < 0 || dim > kChiDenseCap) break;
      if (piece_cost(a0, b) > kPieceFlopCap) continue;
      Spectrum s = block_spectrum(work, a0, b - a0);
      piece_cache_[a0][b] = BlockEntropy{renyi_entropy(s, a_), true};
    }
  }
}

double ChiBlockEntropies::max_cut_entropy() const {
  double m = 0.0;
  for (double e : cut_entropy_) m = std::max(m, e);
  return m;
}

BlockEntropy ChiBlockEntropies::piece(int a, int b) {
  const int B = c_.base.num_sites();
  if (a == 0 && b == B) return {0.0, true};  // whole copy: pure factor
  auto& slot = piece_cache_[a][b];
  if (slot) return *slot;

  BlockEntropy result;
  if (a == 0) {
    result = {cut_entropy_[b - 1], true};
  } else if (b == B) {
    result = {cut_entropy_[a - 1], true};
  } else if (a_.is_one()) {
    // two-cut subadditivity: S(block) = S(wings) <= S(cut a) + S(cut b)
    result = {cut_entropy_[a - 1] + cut_entropy_[b - 1], false};
  } else {
    throw ResourceLimitError("chi block entropy: interior piece has no exact route at this order",
                             checked_pow(c_.base.phys_dim(), b - a), kChiDenseCap);
  }
  slot = result;
  return result;
}

BlockEntropy ChiBlockEntropies::block(long long first, long long len) {
  const long long total = c_.total_sites();
  if (first < 0 || len < 1 || first + len > total) {
    throw ValidationError("chi block entropy: bad block range");
  }
  if (len == total) return {0.0, true};
  const int B = c_.base.num_sites();
  BlockEntropy out{0.0, true};
  for (long long copy = first / B; copy * B < first + len; ++copy) {
    const int a = static_cast<int>(std::max<long long>(0, first - copy * B));
    const int b = static_cast<int>(std::min<long long>(B, first + len - copy * B));
    BlockEntropy pe = piece(a, b);
    out.bits += pe.bits;
    out.exact = out.exact && pe.exact;
  }
  return out;
}

BlockEntropy chi_block_entropy(const ProductOfCopies& c, long long first, long long len,
                               RenyiOrder a) {
  return ChiBlockEntropies(c, a).block(first, len);
}

double chi_max_cut_entropy(const ProductOfCopies& c, RenyiOrder a) {
  return ChiBlockEntropies(c, a).max_cut_entropy();
}

long long chi_bond_obstruction(int N, long long t_num, long long t_den) {
  if (N < 1 || N > 40) throw ValidationError("chi_bond_obstruction: N out of range");
  if (t_den < 1 || t_num < 0 || t_num > t_den) {
    throw ValidationError("chi_bond_obstruction: T must be a rational in [0,1]");
  }
  if (t_den > (1LL << 20)) throw ValidationError("chi_bond_obstruction: denominator too large");
  const long long num = (1LL << N) * (t_den - 8 * t_num);
  long long q;  // ceil(num / t_den)
  if (num >= 0) {
    q = (num + t_den - 1) / t_den;
  } else {
    q = -((-num) / t_den);
  }
  return std::max<long long>(1, q + 1);
}

// -------------------------------------------------------------- pair rings

std::vector<int> pair_ring_positions(int N, int nu) {
  if (N < 2 || N % 2 != 0) throw ValidationError("pair_ring: N must be even and >= 2");
  if (nu < 1 || nu > N / 2) throw ValidationError("pair_ring: requires 1 <= nu <= N/2");
  std::vector<int> pos(nu);
  for (int j = 0; j < nu; ++j) pos[j] = static_cast<int>((static_cast<long long>(j) * (N / 2)) / nu);
  return pos;
}

MatrixProductState pair_ring(int N, int nu) {
  const auto pos = pair_ring_positions(N, nu);
  if (nu > 14) throw ResourceLimitError("pair_ring: too many pairs", 1LL << nu, 1LL << 14);
  const int d = 2;

  std::vector<int> role(N, 0);  // 0 spectator, 1 opener, 2 closer
  for (int p : pos) {
    role[p] = 1;
    role[p + N / 2] = 2;
  }

  std::vector<SiteTensor> sites(N);
  long open = 0;  // currently open pairs
  for (int k = 0; k < N; ++k) {
    const long w = 1L << open;
    if (role[k] == 1) {
      sites[k] = SiteTensor(d, ComplexMatrix::Zero(w, 2 * w));
      for (long y = 0; y < w; ++y) {
        for (int i = 0; i < 2; ++i) sites[k][i](y, 2 * y + i) = kInvSqrt2;
      }
      ++open;
    } else if (role[k] == 2) {
      const long m = w / 2;
      sites[k] = SiteTensor(d, ComplexMatrix::Zero(w, m));
      for (long b = 0; b < m; ++b) {
        for (int i = 0; i < 2; ++i) sites[k][i](i * m + b, b) = 1.0;
      }
      --open;
    } else {
      sites[k] = SiteTensor(d, ComplexMatrix::Zero(w, w));
      sites[k][0] = ComplexMatrix::Identity(w, w);
    }
  }
  MatrixProductState out(d, std::move(sites));
  out.with_canonical_claim(0, 1);
  out.with_norm_hint(1.0);
  return out;
}

// -------------------------------------------------- tagged TI construction

MatrixProductState tagged_translational_invariant(const ProductOfCopies& base,
                                                  long long dense_threshold) {
  const int B = base.base.num_sites();
  const int d = base.base.phys_dim();
  const long long total = 2LL * B * base.copies;
  const long long dim = checked_pow(d, static_cast<int>(std::min<long long>(total, 64)));
  if (total > 40 || dim < 0 || dim > dense_threshold) {
    throw ResourceLimitError("tagged_translational_invariant: chain too large for the dense budget",
                             dim < 0 ? (1LL << 62) : dim, dense_threshold);
  }

  // tag block |1 0 ... 0> of the copy's length
  std::vector<SiteTensor> tag_sites(B, SiteTensor(d, ComplexMatrix::Zero(1, 1)));
  tag_sites[0][1](0, 0) = 1.0;
  for (int k = 1; k < B; ++k) tag_sites[k][0](0, 0) = 1.0;
  MatrixProductState tag(d, std::move(tag_sites));
  tag.with_norm_hint(1.0);

  MatrixProductState chain = concat(base.base, tag);
  for (int k = 1; k < base.copies; ++k) chain = concat(chain, concat(base.base, tag));
  return translate_superposition(chain);
}

// --------------------------------------------------------- elementary zoo

MatrixProductState elementary_state(ElementaryKind kind, int N, int d, long long basis_index) {
  if (N < 1) throw ValidationError("elementary_state: N must be >= 1");
  if (d < 2) throw ValidationError("elementary_state: d must be >= 2");

  if (kind == ElementaryKind::all_up) return elementary_state(ElementaryKind::basis, N, d, 0);

  if (kind == ElementaryKind::basis) {
    const long long dim = checked_pow(d, N);
    if (dim > 0 && (basis_index < 0 || basis_index >= dim)) {
      throw ValidationError("elementary_state: basis index out of range");
    }
    std::vector<SiteTensor> sites(N, SiteTensor(d, ComplexMatrix::Zero(1, 1)));
    long long rest = basis_index;
    for (int k = N - 1; k >= 0; --k) {
      sites[k][rest % d](0, 0) = 1.0;
      rest /= d;
    }
    MatrixProductState out(d, std::move(sites));
    out.with_canonical_claim(0, 1);
    out.with_norm_hint(1.0);
    return out;
  }

  // GHZ over levels 0 and 1
  if (N == 1) {
    std::vector<SiteTensor> sites(1, SiteTensor(d, ComplexMatrix::Zero(1, 1)));
    sites[0][0](0, 0) = kInvSqrt2;
    sites[0][1](0, 0) = kInvSqrt2;
    MatrixProductState out(d, std::move(sites));
    out.with_norm_hint(1.0);
    return out;
  }
  std::vector<SiteTensor> sites(N);
  sites[0] = SiteTensor(d, ComplexMatrix::Zero(1, 2));
  sites[0][0](0, 0) = kInvSqrt2;
  sites[0][1](0, 1) = kInvSqrt2;
  for (int k = 1; k < N - 1; ++k) {
    sites[k] = SiteTensor(d, ComplexMatrix::Zero(2, 2));
    sites[k][0](0, 0) = 1.0;
    sites[k][1](1, 1) = 1.0;
  }
  sites[N - 1] = SiteTensor(d, ComplexMatrix::Zero(2, 1));
  sites[N - 1][0](0, 0) = 1.0;
  sites[N - 1][1](1, 0) = 1.0;
  MatrixProductState out(d, std::move(sites));
  out.with_canonical_claim(0, 1);
  out.with_norm_hint(1.0);
  return out;
}

}  // namespace mpslab
