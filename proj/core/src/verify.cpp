#include "mpslab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

namespace mpslab {

using linalg::ComplexMatrix;

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 step on master + index
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

MatrixProductState random_mps(int N, int d, long D, std::uint64_t seed) {
  if (N < 1 || d < 2 || D < 1) throw ValidationError("random_mps: bad shape");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto env = [&](int k) -> long {
    long long left = checked_pow(d, k);
    long long right = checked_pow(d, N - k);
    long long v = D;
    if (left > 0) v = std::min(v, left);
    if (right > 0) v = std::min(v, right);
    return static_cast<long>(v);
  };
  std::vector<SiteTensor> sites(N);
  for (int k = 0; k < N; ++k) {
    const long rows = env(k), cols = env(k + 1);
    sites[k] = SiteTensor(d, ComplexMatrix(rows, cols));
    for (int i = 0; i < d; ++i) {
      for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) sites[k][i](r, c) = {gauss(rng), gauss(rng)};
      }
    }
  }
  MatrixProductState m(d, std::move(sites));
  MatrixProductState canon = canonicalize(m, 0);
  const double nrm = norm(canon);
  if (nrm <= 0.0) throw NumericalFailure("random_mps: zero-norm sample");
  std::vector<SiteTensor> t = canon.tensors();
  for (int i = 0; i < d; ++i) t[0][i] /= nrm;
  MatrixProductState out(d, std::move(t));
  out.with_canonical_claim(0, 1);
  out.with_norm_hint(1.0);
  return out;
}

BoundReport verify_eps_lower(const MatrixProductState& psi, long D, int trials,
                             std::uint64_t seed) {
  if (trials < 1) throw ValidationError("verify_eps_lower: trials must be >= 1");
  auto spectra = schmidt_spectra(psi);
  double eps_max = 0.0;
  for (const auto& s : spectra) eps_max = std::max(eps_max, truncation_error(s, D));

  BoundReport r;
  r.name = "eps_lower";
  r.bound_value = eps_max;
  r.seed = seed;
  r.inputs_echo = "N=" + std::to_string(psi.num_sites()) + " D=" + std::to_string(D) +
                  " trials=" + std::to_string(trials);

  auto check = [&](const MatrixProductState& phi) {
    const double dist = distances(psi, phi).trace_distance_normalized;
    const double margin = dist - eps_max;
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -BoundReport::kViolationTol) ++r.violations;
    ++r.trials;
  };

  check(compress(psi, D).first);
  for (int t = 0; t < trials; ++t) {
    check(random_mps(psi.num_sites(), psi.phys_dim(), D, trial_seed(seed, t)));
  }
  r.satisfied = r.violations == 0 ? BoundStatus::holds : BoundStatus::violated;
  return r;
}

BoundReport verify_eps_upper(const MatrixProductState& psi, const std::vector<long>& D_grid) {
  if (D_grid.empty()) throw ValidationError("verify_eps_upper: empty grid");
  BoundReport r;
  r.name = "eps_upper";
  r.inputs_echo = "N=" + std::to_string(psi.num_sites());
  for (long D : D_grid) {
    auto [phi, report] = compress(psi, D);
    const double margin = report.upper_bound - report.realized_error;
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -BoundReport::kViolationTol) ++r.violations;
    ++r.trials;
  }
  r.satisfied = r.violations == 0 ? BoundStatus::holds : BoundStatus::violated;
  return r;
}

ProductStructureCheck product_structure_check(const MatrixProductState& psiA,
                                              const MatrixProductState& psiB,
                                              const MatrixProductState& candidate,
                                              long long dense_threshold) {
  if (psiA.phys_dim() != psiB.phys_dim() || candidate.phys_dim() != psiA.phys_dim()) {
    throw ValidationError("product_structure_check: physical dimension mismatch");
  }
  const int d = psiA.phys_dim();
  const int na = psiA.num_sites(), nb = psiB.num_sites();
  if (candidate.num_sites() != na + nb) {
    throw ValidationError("product_structure_check: candidate length mismatch");
  }
  const long long dim_a = checked_pow(d, na), dim_b = checked_pow(d, nb);
  if (dim_a < 0 || dim_b < 0 || dim_a * dim_b > dense_threshold) {
    throw ResourceLimitError("product_structure_check: joint chain too large",
                             dim_a < 0 || dim_b < 0 ? (1LL << 62) : dim_a * dim_b, dense_threshold);
  }
  Eigen::VectorXcd va = to_dense(psiA, dense_threshold);
  Eigen::VectorXcd vb = to_dense(psiB, dense_threshold);
  va /= va.norm();
  vb /= vb.norm();
  Eigen::VectorXcd w = to_dense(candidate, dense_threshold);
  w /= w.norm();

  ComplexMatrix W(dim_a, dim_b);
  for (long long row = 0; row < dim_a; ++row) {
    W.row(row) = w.segment(row * dim_b, dim_b).transpose();
  }
  auto f = linalg::svd(W);
  const long rank = f.s.size();

  // a_k = <psiA|alpha_k>, b_k = <psiB|beta_k>
  Eigen::VectorXcd ak = (f.u.adjoint() * va).conjugate();
  Eigen::VectorXcd bk(rank);
  for (long k = 0; k < rank; ++k) {
    std::complex<double> acc = 0.0;
    for (long long c = 0; c < dim_b; ++c) acc += std::conj(vb(c)) * f.vh(k, c);
    bk(k) = acc;
  }

  std::complex<double> f0 = 0.0;
  double sum_abs_a = 0.0;
  double bmax = 0.0;
  for (long k = 0; k < rank; ++k) {
    f0 += f.s(k) * ak(k) * bk(k);
    sum_abs_a += f.s(k) * std::abs(ak(k));
    bmax = std::max(bmax, std::abs(bk(k)));
  }
  ProductStructureCheck out;
  long lset = 0;
  double bsum = 0.0;
  for (long k = 0; k < rank; ++k) {
    if (std::abs(bk(k)) >= bmax - 1e-12) {
      ++lset;
      bsum += std::abs(bk(k));
    }
  }
  out.tie_set_size = std::max<long>(1, lset);
  out.original_fidelity = std::abs(f0);
  out.factorized_fidelity = sum_abs_a * bsum / std::sqrt(static_cast<double>(out.tie_set_size));
  out.schmidt_rank = 0;
  for (long k = 0; k < rank; ++k) out.schmidt_rank += f.s(k) > f.s(0) * 1e-12 ? 1 : 0;
  out.schmidt_rank = std::max<long>(1, out.schmidt_rank);
  return out;
}

BoundReport verify_product_structure(const MatrixProductState& psiA,
                                     const MatrixProductState& psiB, long D, int trials,
                                     std::uint64_t seed, long long dense_threshold) {
  if (trials < 1) throw ValidationError("verify_product_structure: trials must be >= 1");
  const int d = psiA.phys_dim();
  const int na = psiA.num_sites(), nb = psiB.num_sites();

  BoundReport r;
  r.name = "product_structure";
  r.seed = seed;
  r.inputs_echo = "KA=" + std::to_string(na) + " KB=" + std::to_string(nb) + " D=" +
                  std::to_string(D) + " trials=" + std::to_string(trials);
  long rank_one_cases = 0;

  for (int t = 0; t < trials; ++t) {
    MatrixProductState phi = random_mps(na + nb, d, D, trial_seed(seed, t));
    ProductStructureCheck check = product_structure_check(psiA, psiB, phi, dense_threshold);
    const double margin = check.factorized_fidelity - check.original_fidelity;
    if (check.schmidt_rank >= 2) {
      r.worst_margin = std::min(r.worst_margin, margin);
      if (margin < -BoundReport::kViolationTol) ++r.violations;
    } else {
      ++rank_one_cases;
      if (std::abs(margin) > 1e-8) ++r.violations;  // rank one must be the equality case
    }
    ++r.trials;
  }
  r.note = "rank_one_cases=" + std::to_string(rank_one_cases);
  r.satisfied = r.violations == 0 ? BoundStatus::holds : BoundStatus::violated;
  return r;
}

BoundReport verify_multiplicativity(double T_single, int K) {
  if (T_single < 0.0 || T_single > 1.0) throw ValidationError("verify_multiplicativity: T outside [0,1]");
  if (K < 1) throw ValidationError("verify_multiplicativity: K must be >= 1");
  BoundReport r;
  r.name = "multiplicativity";
  r.inputs_echo = "T=" + std::to_string(T_single) + " K=" + std::to_string(K);
  if (T_single * T_single > 2.0 / static_cast<double>(K) + 1e-15) {
    r.satisfied = BoundStatus::not_applicable;
    r.note = "outside validity window T^2 <= 2/K";
    return r;
  }
  const double theta = 0.5 * std::asin(std::min(1.0, T_single));
  const double fid_k = std::pow(std::cos(theta), K);
  const double theta_k = std::acos(std::min(1.0, fid_k));
  const double t_k = theta_k <= M_PI / 4.0 ? std::sin(2.0 * theta_k) : 1.0;
  r.bound_value = std::sqrt(static_cast<double>(K) / 8.0) * T_single;
  r.worst_margin = t_k - r.bound_value;
  r.trials = 1;
  if (r.worst_margin < -BoundReport::kViolationTol) ++r.violations;
  r.satisfied = r.violations == 0 ? BoundStatus::holds : BoundStatus::violated;
  r.note = "T_K=" + std::to_string(t_k);
  return r;
}

BoundReport verify_audenaert(int trials, int dim, std::uint64_t seed) {
  if (dim < 2) throw ValidationError("verify_audenaert: dim must be >= 2");
  if (trials < 1) throw ValidationError("verify_audenaert: trials must be >= 1");
  BoundReport r;
  r.name = "audenaert";
  r.seed = seed;
  r.inputs_echo = "dim=" + std::to_string(dim) + " trials=" + std::to_string(trials);

  auto random_density = [&](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) g(i, j) = {gauss(rng), gauss(rng)};
    }
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
  };
  auto entropy_of = [&](const ComplexMatrix& rho) {
    Eigen::VectorXd ev = linalg::hermitian_eigvals(rho);
    Spectrum s(std::vector<double>(ev.data(), ev.data() + ev.size()), true);
    return renyi_entropy(s, RenyiOrder::von_neumann());
  };

  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    ComplexMatrix rho = random_density(rng);
    ComplexMatrix sigma = random_density(rng);
    const double s1 = entropy_of(rho), s2 = entropy_of(sigma);
    Eigen::VectorXd diff = linalg::hermitian_eigvals(rho - sigma);
    const double tdist = diff.cwiseAbs().sum() / 2.0;
    const double bound = audenaert_bound(std::min(1.0, tdist), dim);
    const double margin = bound - std::abs(s1 - s2);
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -BoundReport::kViolationTol) ++r.violations;
    ++r.trials;
  }
  r.satisfied = r.violations == 0 ? BoundStatus::holds : BoundStatus::violated;
  return r;
}

std::vector<double> sample_tail_constrained(double eps, long D, int L, std::mt19937_64& rng) {
  if (L < 1 || L > 20) throw ValidationError("sample_tail_constrained: L outside [1,20]");
  const long total = 1L << L;
  if (D < 1 || D >= total) throw ValidationError("sample_tail_constrained: requires 1 <= D < 2^L");
  if (eps < 0.0 || eps >= 1.0) throw ValidationError("sample_tail_constrained: eps outside [0,1)");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> head(D), tail(total - D);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    double hs = 0.0, ts = 0.0;
    for (auto& x : head) {
      x = expo(rng);
      hs += x;
    }
    for (auto& x : tail) {
      x = expo(rng);
      ts += x;
    }
    for (auto& x : head) x *= (1.0 - eps) / hs;
    if (eps > 0.0) {
      for (auto& x : tail) x *= eps / ts;
    } else {
      for (auto& x : tail) x = 0.0;
    }
    std::sort(head.begin(), head.end(), std::greater<double>());
    std::sort(tail.begin(), tail.end(), std::greater<double>());
    if (tail.empty() || head.back() >= tail.front()) {
      std::vector<double> out;
      out.reserve(total);
      out.insert(out.end(), head.begin(), head.end());
      out.insert(out.end(), tail.begin(), tail.end());
      return out;
    }
  }
  throw NumericalFailure("sample_tail_constrained: rejection sampling failed to interleave");
}

BoundReport verify_majorization(double eps, long D, int L, RenyiOrder a, int samples,
                                std::uint64_t seed) {
  if (samples < 1) throw ValidationError("verify_majorization: samples must be >= 1");
  BoundReport r;
  r.name = "majorization";
  r.seed = seed;
  r.inputs_echo = "eps=" + std::to_string(eps) + " D=" + std::to_string(D) + " L=" +
                  std::to_string(L) + " alpha=" + std::to_string(a.alpha);
  r.bound_value = max_renyi_given_truncation(eps, D, L, a);

  // the flat head/tail distribution must attain the bound
  {
    const long total = 1L << L;
    std::vector<double> extremal(total);
    for (long i = 0; i < D; ++i) extremal[i] = (1.0 - eps) / D;
    for (long i = D; i < total; ++i) extremal[i] = eps / (total - D);
    const double attained = renyi_entropy(Spectrum(std::move(extremal), true), a);
    if (std::abs(attained - r.bound_value) > 1e-10) {
      ++r.violations;
      r.note = "extremal mismatch " + std::to_string(attained - r.bound_value);
    }
  }

  for (int t = 0; t < samples; ++t) {
    std::mt19937_64 rng(trial_seed(seed, t));
    Spectrum q(sample_tail_constrained(eps, D, L, rng), true);
    const double margin = r.bound_value - renyi_entropy(q, a);
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -BoundReport::kViolationTol) ++r.violations;
    ++r.trials;
  }
  r.satisfied = r.violations == 0 ? BoundStatus::holds : BoundStatus::violated;
  return r;
}

// ------------------------------------------------------- scaling experiment

namespace {

long long eps_obstruction(const std::vector<Spectrum>& spectra, double delta) {
  long long d_req = 1;
  for (const auto& s : spectra) d_req = std::max<long long>(d_req, min_rank_for_truncation(s, delta));
  return d_req;
}

void rational_from_double(double x, long long& num, long long& den) {
  den = 1000000;
  num = std::llround(x * den);
}

}  // namespace

std::vector<ScalingRow> scaling_experiment(const std::string& family,
                                           const std::vector<FamilyParams>& grid,
                                           const std::vector<RenyiOrder>& alphas, double delta) {
  if (delta < 0.0 || delta >= 1.0) throw ValidationError("scaling_experiment: delta outside [0,1)");
  if (alphas.empty()) throw ValidationError("scaling_experiment: no orders given");
  std::vector<FamilyParams> sorted = grid;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const FamilyParams& a, const FamilyParams& b) { return a.N < b.N; });

  std::vector<ScalingRow> rows;
  auto push_skipped = [&](const FamilyParams& fp, int lmax, const std::string& why) {
    for (int L = 1; L <= lmax; ++L) {
      for (const auto& a : alphas) {
        ScalingRow row;
        row.family = family;
        row.N = fp.N;
        row.L = L;
        row.alpha = a.alpha;
        row.delta_target = delta;
        row.skipped = true;
        row.note = why;
        rows.push_back(row);
      }
    }
  };

  for (const auto& fp : sorted) {
    if (family == "magic") {
      std::vector<Spectrum> spectra;
      try {
        spectra = schmidt_spectra(magic_state(fp.N, fp.p));
      } catch (const ResourceLimitError& e) {
        push_skipped(fp, fp.N, e.what());
        continue;
      }
      const long long d_req = eps_obstruction(spectra, delta);
      for (int L = 1; L <= fp.N; ++L) {
        for (const auto& a : alphas) {
          ScalingRow row;
          row.family = family;
          row.N = fp.N;
          row.L = L;
          row.alpha = a.alpha;
          row.entropy_bits = renyi_entropy(spectra[L - 1], a);
          row.D_required = d_req;
          row.delta_target = delta;
          rows.push_back(row);
        }
      }
    } else if (family == "pair_ring") {
      std::vector<Spectrum> spectra;
      try {
        spectra = schmidt_spectra(pair_ring(fp.N, fp.nu));
      } catch (const ResourceLimitError& e) {
        push_skipped(fp, fp.N / 2, e.what());
        continue;
      } catch (const ValidationError& e) {
        push_skipped(fp, std::max(1, fp.N / 2), e.what());
        continue;
      }
      const long long d_req = eps_obstruction(spectra, delta);
      for (int L = 1; L <= fp.N / 2; ++L) {
        for (const auto& a : alphas) {
          ScalingRow row;
          row.family = family;
          row.N = fp.N;
          row.L = L;
          row.alpha = a.alpha;
          row.entropy_bits = renyi_entropy(spectra[L - 1], a);
          row.D_required = d_req;
          row.delta_target = delta;
          rows.push_back(row);
        }
      }
    } else if (family == "chi") {
      const int lmax = 2 * fp.N;
      long long t_num = 0, t_den = 1;
      rational_from_double(delta, t_num, t_den);
      std::vector<std::unique_ptr<ChiBlockEntropies>> calcs;
      try {
        ProductOfCopies c = chi_copies(fp.N, fp.p, std::max(1, fp.copies));
        for (const auto& a : alphas) {
          calcs.push_back(std::make_unique<ChiBlockEntropies>(c, a));
        }
      } catch (const ResourceLimitError& e) {
        push_skipped(fp, lmax, e.what());
        continue;
      }
      const long long d_req = chi_bond_obstruction(fp.N, t_num, t_den);
      const long long total = calcs.front()->copies().total_sites();
      for (int L = 1; L <= std::min<long long>(lmax, total - 1); ++L) {
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
          ScalingRow row;
          row.family = family;
          row.N = fp.N;
          row.L = L;
          row.alpha = alphas[ai].alpha;
          row.entropy_bits = calcs[ai]->block(0, L).bits;
          row.D_required = d_req;
          row.delta_target = delta;
          rows.push_back(row);
        }
      }
    } else {
      throw ValidationError("scaling_experiment: unknown family '" + family + "'");
    }
  }
  return rows;
}

}  // namespace mpslab
