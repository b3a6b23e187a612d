#include "mpslab/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mpslab {

using linalg::ComplexMatrix;

long long checked_pow(int d, int n) {
  long long v = 1;
  for (int i = 0; i < n; ++i) {
    if (v > (1LL << 62) / d) return -1;
    v *= d;
  }
  return v;
}

MatrixProductState::MatrixProductState(int phys_dim, std::vector<SiteTensor> tensors)
    : phys_dim_(phys_dim), tensors_(std::move(tensors)) {
  if (phys_dim_ < 2) throw ValidationError("MatrixProductState: physical dimension must be >= 2");
  if (tensors_.empty()) throw ValidationError("MatrixProductState: need at least one site");
  const int n = num_sites();
  for (int k = 0; k < n; ++k) {
    const auto& t = tensors_[k];
    if (static_cast<int>(t.size()) != phys_dim_) {
      throw ValidationError("MatrixProductState: site " + std::to_string(k) + " has " +
                            std::to_string(t.size()) + " matrices, expected " +
                            std::to_string(phys_dim_));
    }
    for (const auto& a : t) {
      if (a.rows() != t[0].rows() || a.cols() != t[0].cols()) {
        throw ValidationError("MatrixProductState: ragged site tensor at site " + std::to_string(k));
      }
      if (!linalg::all_finite(a)) {
        throw ValidationError("MatrixProductState: non-finite entries at site " + std::to_string(k));
      }
    }
    if (k > 0 && tensors_[k - 1][0].cols() != t[0].rows()) {
      throw ValidationError("MatrixProductState: bond mismatch between sites " +
                            std::to_string(k - 1) + " and " + std::to_string(k));
    }
  }
  if (tensors_.front()[0].rows() != 1 || tensors_.back()[0].cols() != 1) {
    throw ValidationError("MatrixProductState: open boundaries require D_0 = D_N = 1");
  }
  right_iso_from_ = n;  // empty suffix claim
}

long MatrixProductState::bond_dim(int k) const {
  if (k < 0 || k > num_sites()) throw ValidationError("bond_dim: index out of range");
  if (k == num_sites()) return 1;
  return static_cast<long>(tensors_[k][0].rows());
}

long MatrixProductState::max_bond_dim() const {
  long m = 1;
  for (int k = 0; k <= num_sites(); ++k) m = std::max(m, bond_dim(k));
  return m;
}

MatrixProductState& MatrixProductState::with_canonical_claim(int left_iso_count, int right_iso_from) {
  if (left_iso_count < 0 || left_iso_count > num_sites() || right_iso_from < 0 ||
      right_iso_from > num_sites()) {
    throw ValidationError("with_canonical_claim: range out of bounds");
  }
  left_iso_count_ = left_iso_count;
  right_iso_from_ = right_iso_from;
  return *this;
}

MatrixProductState& MatrixProductState::with_norm_hint(double n) {
  norm_hint_ = n;
  return *this;
}

// ---------------------------------------------------------------- reshapes

Eigen::MatrixXcd stack_left(const SiteTensor& t) {
  const int d = static_cast<int>(t.size());
  const long rows = t[0].rows(), cols = t[0].cols();
  ComplexMatrix m(rows * d, cols);
  for (int i = 0; i < d; ++i) {
    for (long a = 0; a < rows; ++a) m.row(a * d + i) = t[i].row(a);
  }
  return m;
}

SiteTensor unstack_left(const Eigen::MatrixXcd& m, int d) {
  const long rows = m.rows() / d, cols = m.cols();
  SiteTensor t(d, ComplexMatrix(rows, cols));
  for (int i = 0; i < d; ++i) {
    for (long a = 0; a < rows; ++a) t[i].row(a) = m.row(a * d + i);
  }
  return t;
}

Eigen::MatrixXcd stack_right(const SiteTensor& t) {
  const int d = static_cast<int>(t.size());
  const long rows = t[0].rows(), cols = t[0].cols();
  ComplexMatrix m(rows, cols * d);
  for (int i = 0; i < d; ++i) m.middleCols(i * cols, cols) = t[i];
  return m;
}

SiteTensor unstack_right(const Eigen::MatrixXcd& m, int d) {
  const long cols = m.cols() / d;
  SiteTensor t(d);
  for (int i = 0; i < d; ++i) t[i] = m.middleCols(i * cols, cols);
  return t;
}

// ---------------------------------------------------------- dense bridging

MatrixProductState from_dense(const Eigen::VectorXcd& amplitudes, int phys_dim,
                              std::optional<long> max_bond, long long dense_threshold) {
  if (phys_dim < 2) throw ValidationError("from_dense: physical dimension must be >= 2");
  const long long len = amplitudes.size();
  if (len > dense_threshold) {
    throw ResourceLimitError("from_dense: amplitude vector too large", len, dense_threshold);
  }
  int n = 0;
  long long p = 1;
  while (p < len) {
    p *= phys_dim;
    ++n;
  }
  if (p != len || n < 1) {
    throw ValidationError("from_dense: length " + std::to_string(len) + " is not a positive power of " +
                          std::to_string(phys_dim));
  }
  if (max_bond && *max_bond < 1) throw ValidationError("from_dense: max_bond must be >= 1");

  const double scale = amplitudes.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) throw ValidationError("from_dense: non-finite amplitudes");

  std::vector<SiteTensor> sites;
  sites.reserve(n);
  // work(r, c): left index r = (bond, i_k), column c = big-endian suffix
  ComplexMatrix work(phys_dim, len / phys_dim);
  for (long long r = 0; r < phys_dim; ++r) {
    for (long long c = 0; c < len / phys_dim; ++c) work(r, c) = amplitudes(r * (len / phys_dim) + c);
  }
  long bond = 1;
  for (int k = 0; k < n - 1; ++k) {
    auto f = linalg::svd(work);
    long keep = static_cast<long>(f.s.size());
    const double cutoff = f.s(0) * 1e-13;
    while (keep > 1 && f.s(keep - 1) <= cutoff) --keep;
    if (max_bond) keep = std::min(keep, *max_bond);

    SiteTensor t(phys_dim, ComplexMatrix(bond, keep));
    for (int i = 0; i < phys_dim; ++i) {
      for (long a = 0; a < bond; ++a) t[i].row(a) = f.u.block(a * phys_dim + i, 0, 1, keep);
    }
    sites.push_back(std::move(t));

    // carry = diag(s) * vh, then regroup the next physical index out of the columns
    ComplexMatrix carry = f.s.head(keep).asDiagonal() * f.vh.topRows(keep);
    const long long cols_next = carry.cols() / phys_dim;
    ComplexMatrix next(keep * phys_dim, cols_next);
    for (long a = 0; a < keep; ++a) {
      for (int i = 0; i < phys_dim; ++i) {
        next.row(a * phys_dim + i) = carry.block(a, i * cols_next, 1, cols_next);
      }
    }
    work = std::move(next);
    bond = keep;
  }
  // last site: no decomposition, absorb everything
  SiteTensor last(phys_dim, ComplexMatrix(bond, 1));
  for (int i = 0; i < phys_dim; ++i) {
    for (long a = 0; a < bond; ++a) last[i](a, 0) = work(a * phys_dim + i, 0);
  }
  sites.push_back(std::move(last));

  MatrixProductState out(phys_dim, std::move(sites));
  out.with_canonical_claim(n - 1, n);
  out.with_norm_hint(max_bond ? norm(out) : amplitudes.norm());
  return out;
}

Eigen::VectorXcd to_dense(const MatrixProductState& m, long long dense_threshold) {
  const long long len = checked_pow(m.phys_dim(), m.num_sites());
  if (len < 0 || len > dense_threshold) {
    throw ResourceLimitError("to_dense: dense amplitude vector too large",
                             len < 0 ? (1LL << 62) : len, dense_threshold);
  }
  const int d = m.phys_dim();
  ComplexMatrix cur = ComplexMatrix::Ones(1, 1);
  for (int k = 0; k < m.num_sites(); ++k) {
    const long rows = cur.rows();
    ComplexMatrix next(rows * d, m.site(k)[0].cols());
    for (int i = 0; i < d; ++i) {
      ComplexMatrix blk = cur * m.site(k)[i];
      for (long s = 0; s < rows; ++s) next.row(s * d + i) = blk.row(s);
    }
    cur = std::move(next);
  }
  return Eigen::VectorXcd(cur.col(0));
}

MatrixProductState concat(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.phys_dim() != b.phys_dim()) throw ValidationError("concat: physical dimensions differ");
  std::vector<SiteTensor> sites = a.tensors();
  sites.insert(sites.end(), b.tensors().begin(), b.tensors().end());
  MatrixProductState out(a.phys_dim(), std::move(sites));
  if (a.norm_hint() && b.norm_hint()) out.with_norm_hint(*a.norm_hint() * *b.norm_hint());
  return out;
}

// ----------------------------------------------------------- canonical form

MatrixProductState canonicalize(const MatrixProductState& m, int center) {
  const int n = m.num_sites();
  if (center < 0 || center >= n) throw ValidationError("canonicalize: center out of range");
  const int d = m.phys_dim();
  std::vector<SiteTensor> t = m.tensors();

  // right-to-left pass down to center + 1
  for (int k = n - 1; k > center; --k) {
    if (k >= m.right_iso_from() && k > center) continue;
    auto f = linalg::lq(stack_right(t[k]));
    t[k] = unstack_right(f.q, d);
    for (int i = 0; i < d; ++i) t[k - 1][i] = t[k - 1][i] * f.l;
  }
  // left-to-right pass up to center - 1
  for (int k = 0; k < center; ++k) {
    if (k < m.left_iso_count()) continue;
    auto f = linalg::qr(stack_left(t[k]));
    t[k] = unstack_left(f.q, d);
    for (int i = 0; i < d; ++i) t[k + 1][i] = f.r * t[k + 1][i];
  }

  MatrixProductState out(d, std::move(t));
  out.with_canonical_claim(center, center + 1);
  if (m.norm_hint()) out.with_norm_hint(*m.norm_hint());
  return out;
}

namespace {

// Frobenius norm of a full site tensor.
double site_frobenius(const SiteTensor& t) {
  double s = 0.0;
  for (const auto& a : t) s += a.squaredNorm();
  return std::sqrt(s);
}

// Schmidt spectra via the left gram sweep; requires sites [1, N) right
// isometric.  Collects eigenvalues of the accumulated left gram at each cut.
std::vector<Spectrum> spectra_from_right_canonical(const MatrixProductState& m,
                                                   int max_cut) {
  const int n = m.num_sites();
  const int d = m.phys_dim();
  std::vector<Spectrum> out;
  ComplexMatrix gram;  // left gram at the current bond
  for (int k = 0; k < std::min(max_cut, n - 1); ++k) {
    const auto& site = m.site(k);
    ComplexMatrix next = ComplexMatrix::Zero(site[0].cols(), site[0].cols());
    if (k == 0) {
      for (int i = 0; i < d; ++i) next.noalias() += site[i].adjoint() * site[i];
    } else {
      for (int i = 0; i < d; ++i) next.noalias() += site[i].adjoint() * (gram * site[i]);
    }
    gram = std::move(next);

    Eigen::VectorXd ev = linalg::hermitian_eigvals(gram);
    // rank across the cut can never exceed the dimension of either side
    long long cap = ev.size();
    const long long left_dim = checked_pow(d, k + 1);
    const long long right_dim = checked_pow(d, n - 1 - k);
    if (left_dim > 0) cap = std::min(cap, left_dim);
    if (right_dim > 0) cap = std::min(cap, right_dim);
    std::vector<double> vals(ev.data(), ev.data() + cap);
    const double total = std::abs(gram.trace());
    if (std::abs(total - 1.0) > Spectrum::kNormTol) {
      throw ValidationError("schmidt_spectrum: state not normalized (norm^2 = " +
                            std::to_string(total) + "); normalize first");
    }
    out.emplace_back(std::move(vals), true);
  }
  return out;
}

const MatrixProductState& ensure_right_canonical(const MatrixProductState& m,
                                                 std::optional<MatrixProductState>& storage) {
  if (m.right_iso_from() <= 1 || m.num_sites() == 1) return m;
  storage.emplace(canonicalize(m, 0));
  return *storage;
}

}  // namespace

std::vector<Spectrum> schmidt_spectra(const MatrixProductState& m) {
  return schmidt_spectra(m, m.num_sites() - 1);
}

std::vector<Spectrum> schmidt_spectra(const MatrixProductState& m, int max_cut) {
  if (max_cut < 1 || max_cut >= m.num_sites()) {
    if (m.num_sites() == 1 && max_cut == 0) return {};
    throw ValidationError("schmidt_spectra: max_cut out of range");
  }
  std::optional<MatrixProductState> storage;
  const MatrixProductState& rc = ensure_right_canonical(m, storage);
  return spectra_from_right_canonical(rc, max_cut);
}

Spectrum schmidt_spectrum(const MatrixProductState& m, int cut) {
  if (cut < 1 || cut >= m.num_sites()) throw ValidationError("schmidt_spectrum: cut out of range");
  std::optional<MatrixProductState> storage;
  const MatrixProductState& rc = ensure_right_canonical(m, storage);
  auto spectra = spectra_from_right_canonical(rc, cut);
  return spectra.back();
}

double norm(const MatrixProductState& m) {
  if (m.norm_hint()) return *m.norm_hint();
  if (m.right_iso_from() == 1) return site_frobenius(m.site(0));
  if (m.left_iso_count() == m.num_sites() - 1) return site_frobenius(m.site(m.num_sites() - 1));
  return std::sqrt(std::abs(overlap(m, m)));
}

// ---------------------------------------------------------------- compress

namespace {

struct SweepOutput {
  MatrixProductState mps;
  std::vector<double> discarded;  // absolute squared weight dropped per cut
};

// Left-to-right truncation sweep over a right-canonical chain.
SweepOutput truncate_sweep(const MatrixProductState& rc, long max_keep, double rel_cutoff) {
  const int n = rc.num_sites();
  const int d = rc.phys_dim();
  std::vector<SiteTensor> t = rc.tensors();
  std::vector<double> discarded(std::max(0, n - 1), 0.0);

  for (int k = 0; k + 1 < n; ++k) {
    auto f = linalg::svd(stack_left(t[k]));
    long keep = static_cast<long>(f.s.size());
    if (rel_cutoff > 0.0 && keep > 1) {
      const double cutoff = f.s(0) * rel_cutoff;
      while (keep > 1 && f.s(keep - 1) <= cutoff) --keep;
    }
    keep = std::min(keep, max_keep);
    double lost = 0.0;
    for (long i = keep; i < f.s.size(); ++i) lost += f.s(i) * f.s(i);
    discarded[k] = lost;

    t[k] = unstack_left(f.u.leftCols(keep), d);
    ComplexMatrix carry = f.s.head(keep).asDiagonal() * f.vh.topRows(keep);
    for (int i = 0; i < d; ++i) t[k + 1][i] = carry * t[k + 1][i];
  }

  MatrixProductState out(d, std::move(t));
  out.with_canonical_claim(n - 1, n);
  out.with_norm_hint(site_frobenius(out.site(n - 1)));
  return {std::move(out), std::move(discarded)};
}

}  // namespace

std::pair<MatrixProductState, TruncationReport> compress(const MatrixProductState& m, long max_bond) {
  if (max_bond < 1) throw ValidationError("compress: bond budget must be >= 1");

  TruncationReport report;
  auto spectra = schmidt_spectra(m);  // validates normalization
  report.eps_per_cut.reserve(spectra.size());
  for (const auto& s : spectra) report.eps_per_cut.push_back(truncation_error(s, max_bond));
  report.eps_sum = 0.0;
  for (double e : report.eps_per_cut) report.eps_sum += e;
  report.upper_bound = 2.0 * report.eps_sum;

  std::optional<MatrixProductState> storage;
  const MatrixProductState& rc = ensure_right_canonical(m, storage);
  auto sweep = truncate_sweep(rc, max_bond, 0.0);

  report.output_norm = norm(sweep.mps);
  const std::complex<double> ov = overlap(m, sweep.mps);
  const double n_in = norm(m);
  double err2 = n_in * n_in + report.output_norm * report.output_norm - 2.0 * ov.real();
  report.realized_error = std::sqrt(std::max(0.0, err2));
  return {std::move(sweep.mps), std::move(report)};
}

MatrixProductState trim_zeros(const MatrixProductState& m, double rel_cutoff) {
  std::optional<MatrixProductState> storage;
  const MatrixProductState& rc = ensure_right_canonical(m, storage);
  auto sweep = truncate_sweep(rc, std::numeric_limits<long>::max(), rel_cutoff);
  return std::move(sweep.mps);
}

// ---------------------------------------------------------------- pairings

std::complex<double> overlap(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.num_sites() != b.num_sites() || a.phys_dim() != b.phys_dim()) {
    throw ValidationError("overlap: shape mismatch");
  }
  const int d = a.phys_dim();
  ComplexMatrix v = ComplexMatrix::Ones(1, 1);
  for (int k = 0; k < a.num_sites(); ++k) {
    ComplexMatrix next = ComplexMatrix::Zero(a.site(k)[0].cols(), b.site(k)[0].cols());
    for (int i = 0; i < d; ++i) {
      next.noalias() += a.site(k)[i].adjoint() * (v * b.site(k)[i]);
    }
    v = std::move(next);
  }
  return v(0, 0);
}

DistanceReport distances(const MatrixProductState& a, const MatrixProductState& b) {
  const double na = norm(a), nb = norm(b);
  if (na <= 0.0 || nb <= 0.0) throw ValidationError("distances: zero-norm input");
  const std::complex<double> ov = overlap(a, b);
  double fid = std::abs(ov) / (na * nb);
  fid = std::min(1.0, std::max(0.0, fid));
  DistanceReport r;
  r.fidelity = fid;
  r.theta = std::acos(fid);
  r.V = std::sin(r.theta);
  r.T = r.theta <= M_PI / 4.0 ? std::sin(2.0 * r.theta) : 1.0;
  r.trace_distance_normalized = 2.0 * std::sin(r.theta);
  return r;
}

Eigen::MatrixXcd reduced_density(const MatrixProductState& m, int first, int len,
                                 long long dense_threshold) {
  const int n = m.num_sites();
  if (first < 0 || len < 1 || first + len > n) throw ValidationError("reduced_density: bad block");
  const long long dim = checked_pow(m.phys_dim(), len);
  if (dim < 0 || dim > dense_threshold) {
    throw ResourceLimitError("reduced_density: block dimension too large",
                             dim < 0 ? (1LL << 62) : dim, dense_threshold);
  }
  constexpr long long kMaxDensityDim = 1LL << 13;
  if (dim > kMaxDensityDim) {
    throw ResourceLimitError("reduced_density: block density matrix too large", dim, kMaxDensityDim);
  }

  // skip the gauge sweep (and its tensor copy) when the caller already holds
  // a chain canonicalized at the block's left edge
  std::optional<MatrixProductState> storage;
  const bool ready = m.left_iso_count() >= first && m.right_iso_from() <= first + 1;
  if (!ready) storage.emplace(canonicalize(m, first));
  const MatrixProductState& c = ready ? m : *storage;
  const int d = m.phys_dim();
  const long da = c.bond_dim(first);
  const long db = c.bond_dim(first + len);
  constexpr long long kMaxThetaEntries = 1LL << 26;
  if (static_cast<long long>(da) * db * dim > kMaxThetaEntries) {
    throw ResourceLimitError("reduced_density: block environment too large",
                             static_cast<long long>(da) * db * dim, kMaxThetaEntries);
  }

  // theta rows indexed (alpha * d^j + prefix), columns = current right bond
  ComplexMatrix theta = ComplexMatrix::Identity(da, da);
  for (int k = first; k < first + len; ++k) {
    const long rows = theta.rows();
    ComplexMatrix next(rows * d, c.site(k)[0].cols());
    for (int i = 0; i < d; ++i) {
      ComplexMatrix blk = theta * c.site(k)[i];
      for (long s = 0; s < rows; ++s) next.row(s * d + i) = blk.row(s);
    }
    theta = std::move(next);
  }

  const double nrm = norm(c);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (long a = 0; a < da; ++a) {
    rho.noalias() += theta.middleRows(a * dim, dim) * theta.middleRows(a * dim, dim).adjoint();
  }
  rho /= nrm * nrm;
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return rho;
}

Spectrum block_spectrum(const MatrixProductState& m, int first, int len,
                        long long dense_threshold) {
  const int n = m.num_sites();
  if (first < 0 || len < 1 || first + len > n) throw ValidationError("block_spectrum: bad block");
  if (len == n) return Spectrum({1.0}, true);
  if (first == 0) return schmidt_spectrum(m, len);
  if (first + len == n) return schmidt_spectrum(m, first);
  Eigen::MatrixXcd rho = reduced_density(m, first, len, dense_threshold);
  Eigen::VectorXd ev = linalg::hermitian_eigvals(rho);
  return Spectrum(std::vector<double>(ev.data(), ev.data() + ev.size()), true);
}

// ----------------------------------------------------------------- rings

MatrixProductState translate(const MatrixProductState& m, int t) {
  const int n = m.num_sites();
  const int d = m.phys_dim();
  t = ((t % n) + n) % n;
  if (t == 0 || n == 1) return m;

  // Content of original site k appears at new site (k + t) mod n.  The ring
  // seam is carried through as an extra bond label of dimension B.
  const long B = m.bond_dim(n - t);
  if (B * m.max_bond_dim() > (1L << 14)) {
    throw ResourceLimitError("translate: embedded bond dimension too large",
                             B * m.max_bond_dim(), 1L << 14);
  }
  std::vector<SiteTensor> out(n);

  // new site 0 holds original site n - t
  out[0] = SiteTensor(d, ComplexMatrix(1, B * m.bond_dim(n - t + 1)));
  for (int i = 0; i < d; ++i) {
    const auto& a = m.site(n - t)[i];
    for (long b = 0; b < B; ++b) {
      out[0][i].block(0, b * a.cols(), 1, a.cols()) = a.row(b);
    }
  }
  // new sites 1 .. t-1 hold originals n-t+1 .. n-1 as identity-extended blocks
  for (int k = 1; k < t; ++k) {
    const auto& src = m.site(n - t + k);
    const long r = src[0].rows(), cmat = src[0].cols();
    out[k] = SiteTensor(d, ComplexMatrix::Zero(B * r, B * cmat));
    for (int i = 0; i < d; ++i) {
      for (long b = 0; b < B; ++b) out[k][i].block(b * r, b * cmat, r, cmat) = src[i];
    }
  }
  // new sites t .. n-2 hold originals 0 .. n-2-t
  for (int k = t; k < n - 1; ++k) {
    const auto& src = m.site(k - t);
    const long r = src[0].rows(), cmat = src[0].cols();
    out[k] = SiteTensor(d, ComplexMatrix::Zero(B * r, B * cmat));
    for (int i = 0; i < d; ++i) {
      for (long b = 0; b < B; ++b) out[k][i].block(b * r, b * cmat, r, cmat) = src[i];
    }
  }
  // new site n-1 holds original n-1-t and closes the seam
  {
    const auto& src = m.site(n - 1 - t);
    const long r = src[0].rows();
    out[n - 1] = SiteTensor(d, ComplexMatrix(B * r, 1));
    for (int i = 0; i < d; ++i) {
      for (long b = 0; b < B; ++b) {
        for (long a = 0; a < r; ++a) out[n - 1][i](b * r + a, 0) = src[i](a, b);
      }
    }
  }
  MatrixProductState res(d, std::move(out));
  if (m.norm_hint()) res.with_norm_hint(*m.norm_hint());
  return res;
}

namespace {

MatrixProductState direct_sum(const MatrixProductState& a, const MatrixProductState& b) {
  const int n = a.num_sites();
  const int d = a.phys_dim();
  std::vector<SiteTensor> out(n);
  if (n == 1) {
    out[0] = SiteTensor(d);
    for (int i = 0; i < d; ++i) out[0][i] = a.site(0)[i] + b.site(0)[i];
    return MatrixProductState(d, std::move(out));
  }
  for (int k = 0; k < n; ++k) {
    const auto& ta = a.site(k);
    const auto& tb = b.site(k);
    const long ra = ta[0].rows(), ca = ta[0].cols();
    const long rb = tb[0].rows(), cb = tb[0].cols();
    out[k] = SiteTensor(d);
    for (int i = 0; i < d; ++i) {
      if (k == 0) {
        ComplexMatrix m(1, ca + cb);
        m << ta[i], tb[i];
        out[k][i] = std::move(m);
      } else if (k == n - 1) {
        ComplexMatrix m(ra + rb, 1);
        m << ta[i], tb[i];
        out[k][i] = std::move(m);
      } else {
        ComplexMatrix m = ComplexMatrix::Zero(ra + rb, ca + cb);
        m.topLeftCorner(ra, ca) = ta[i];
        m.bottomRightCorner(rb, cb) = tb[i];
        out[k][i] = std::move(m);
      }
    }
  }
  return MatrixProductState(d, std::move(out));
}

}  // namespace

MatrixProductState translate_superposition(const MatrixProductState& m) {
  const int n = m.num_sites();
  MatrixProductState acc = m;
  for (int t = 1; t < n; ++t) {
    acc = direct_sum(acc, translate(m, t));
    acc = trim_zeros(acc);
  }
  const double nrm = norm(acc);
  if (nrm <= 1e-10 * static_cast<double>(n) * norm(m)) {
    throw DestructiveInterferenceError(
        "translate_superposition: translates interfere destructively (norm " + std::to_string(nrm) + ")");
  }
  std::vector<SiteTensor> t = acc.tensors();
  for (int i = 0; i < m.phys_dim(); ++i) t[0][i] /= nrm;
  MatrixProductState out(m.phys_dim(), std::move(t));
  out.with_canonical_claim(0, acc.right_iso_from());
  out.with_norm_hint(1.0);
  return out;
}

// ------------------------------------------------------------ serialization

void save_mps(const MatrixProductState& m, std::ostream& os) {
  os << "mpslab-mps 1\n";
  os << "sites " << m.num_sites() << " physdim " << m.phys_dim() << "\n";
  os << "bonds";
  for (int k = 0; k <= m.num_sites(); ++k) os << " " << m.bond_dim(k);
  os << "\n";
  char buf[64];
  for (int k = 0; k < m.num_sites(); ++k) {
    os << "site " << k << "\n";
    for (int i = 0; i < m.phys_dim(); ++i) {
      const auto& a = m.site(k)[i];
      for (long r = 0; r < a.rows(); ++r) {
        for (long c = 0; c < a.cols(); ++c) {
          const auto v = a(r, c);
          std::snprintf(buf, sizeof buf, "%.17g %.17g", v.real(), v.imag());
          os << buf << (c + 1 < a.cols() ? " " : "");
        }
        os << "\n";
      }
    }
  }
  os << "end\n";
}

MatrixProductState load_mps(std::istream& is) {
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != "mpslab-mps" || version != 1) throw ValidationError("load_mps: bad header");
  std::string tok;
  int n = 0, d = 0;
  is >> tok >> n >> magic >> d;
  if (tok != "sites" || magic != "physdim" || n < 1 || d < 2) {
    throw ValidationError("load_mps: bad dimensions line");
  }
  is >> tok;
  if (tok != "bonds") throw ValidationError("load_mps: missing bonds line");
  std::vector<long> bonds(n + 1);
  for (auto& b : bonds) is >> b;
  if (bonds.front() != 1 || bonds.back() != 1) throw ValidationError("load_mps: bad boundary bonds");

  std::vector<SiteTensor> sites(n);
  for (int k = 0; k < n; ++k) {
    int kk = -1;
    is >> tok >> kk;
    if (tok != "site" || kk != k) throw ValidationError("load_mps: bad site header");
    sites[k] = SiteTensor(d, ComplexMatrix(bonds[k], bonds[k + 1]));
    for (int i = 0; i < d; ++i) {
      for (long r = 0; r < bonds[k]; ++r) {
        for (long c = 0; c < bonds[k + 1]; ++c) {
          double re = 0.0, im = 0.0;
          if (!(is >> re >> im)) throw ValidationError("load_mps: truncated entries");
          sites[k][i](r, c) = {re, im};
        }
      }
    }
  }
  is >> tok;
  if (tok != "end") throw ValidationError("load_mps: missing end marker");
  return MatrixProductState(d, std::move(sites));
}

void save_mps_file(const MatrixProductState& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("save_mps_file: cannot open " + path);
  save_mps(m, os);
  if (!os) throw ValidationError("save_mps_file: write failed for " + path);
}

MatrixProductState load_mps_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("load_mps_file: cannot open " + path);
  return load_mps(is);
}

}  // namespace mpslab
