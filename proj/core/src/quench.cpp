#include "mpslab/quench.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mpslab/entropy.hpp"

namespace mpslab {

using linalg::ComplexMatrix;

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

int bit_of(long long state, int site, int n) { return static_cast<int>((state >> (n - 1 - site)) & 1); }

void check_spec(const IsingSpec& spec) {
  if (spec.N < 2) throw ValidationError("IsingSpec: N must be >= 2");
  if (spec.g < 0.0) throw ValidationError("IsingSpec: g must be >= 0");
}

}  // namespace

Eigen::MatrixXcd ising_hamiltonian(const IsingSpec& spec, long long matrix_dim_limit) {
  check_spec(spec);
  const long long dim = checked_pow(2, spec.N);
  if (dim < 0 || dim > matrix_dim_limit) {
    throw ResourceLimitError("ising_hamiltonian: matrix dimension too large",
                             dim < 0 ? (1LL << 62) : dim, matrix_dim_limit);
  }
  const int n = spec.N;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const int nbonds = spec.boundary == Boundary::periodic ? n : n - 1;
  for (long long b = 0; b < dim; ++b) {
    double diag = 0.0;
    for (int k = 0; k < n; ++k) diag -= spec.g * (1.0 - 2.0 * bit_of(b, k, n));
    for (int e = 0; e < nbonds; ++e) {
      const int k = e, kp = (e + 1) % n;
      if (spec.coupling == Coupling::xx) {
        const long long flipped = b ^ ((1LL << (n - 1 - k)) | (1LL << (n - 1 - kp)));
        h(flipped, b) += -1.0;
      } else {
        diag -= (1.0 - 2.0 * bit_of(b, k, n)) * (1.0 - 2.0 * bit_of(b, kp, n));
      }
    }
    h(b, b) += diag;
  }
  return h;
}

// ------------------------------------------------------- exact propagation

ExactPropagator::ExactPropagator(const IsingSpec& spec, long long matrix_dim_limit) : spec_(spec) {
  check_spec(spec);
  const long long dim = checked_pow(2, spec.N);
  if (dim < 0 || dim > matrix_dim_limit) {
    throw ResourceLimitError("ExactPropagator: matrix dimension too large",
                             dim < 0 ? (1LL << 62) : dim, matrix_dim_limit);
  }
  const int n = spec.N;
  // both couplings preserve the parity of the number of flipped spins
  sector_states_.assign(2, {});
  std::vector<long> pos(dim, -1);
  for (long long b = 0; b < dim; ++b) {
    const int parity = __builtin_parityll(b);
    pos[b] = static_cast<long>(sector_states_[parity].size());
    sector_states_[parity].push_back(static_cast<long>(b));
  }
  const int nbonds = spec.boundary == Boundary::periodic ? n : n - 1;
  for (int s = 0; s < 2; ++s) {
    const auto& states = sector_states_[s];
    const long m = static_cast<long>(states.size());
    ComplexMatrix h = ComplexMatrix::Zero(m, m);
    for (long j = 0; j < m; ++j) {
      const long long b = states[j];
      double diag = 0.0;
      for (int k = 0; k < n; ++k) diag -= spec.g * (1.0 - 2.0 * bit_of(b, k, n));
      for (int e = 0; e < nbonds; ++e) {
        const int k = e, kp = (e + 1) % n;
        if (spec.coupling == Coupling::xx) {
          const long long flipped = b ^ ((1LL << (n - 1 - k)) | (1LL << (n - 1 - kp)));
          h(pos[flipped], j) += -1.0;
        } else {
          diag -= (1.0 - 2.0 * bit_of(b, k, n)) * (1.0 - 2.0 * bit_of(b, kp, n));
        }
      }
      h(j, j) += diag;
    }
    auto eig = linalg::hermitian_eig(h);
    sector_eigenvalues_.push_back(std::move(eig.eigenvalues));
    sector_eigenvectors_.push_back(std::move(eig.eigenvectors));
  }
}

Eigen::VectorXcd ExactPropagator::evolve(const Eigen::VectorXcd& psi0, double t) const {
  const long long dim = checked_pow(2, spec_.N);
  if (psi0.size() != dim) throw ValidationError("ExactPropagator::evolve: state size mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
  for (int s = 0; s < 2; ++s) {
    const auto& states = sector_states_[s];
    const long m = static_cast<long>(states.size());
    Eigen::VectorXcd comp(m);
    for (long j = 0; j < m; ++j) comp(j) = psi0(states[j]);
    if (comp.norm() == 0.0) continue;
    Eigen::VectorXcd coeff = sector_eigenvectors_[s].adjoint() * comp;
    for (long j = 0; j < m; ++j) coeff(j) *= std::exp(-kI * sector_eigenvalues_[s](j) * t);
    comp = sector_eigenvectors_[s] * coeff;
    for (long j = 0; j < m; ++j) out(states[j]) = comp(j);
  }
  return out;
}

namespace {

double half_chain_entropy_dense(const Eigen::VectorXcd& psi, int n) {
  const int h = n / 2;
  const long long rows = checked_pow(2, h), cols = checked_pow(2, n - h);
  ComplexMatrix m(rows, cols);
  for (long long r = 0; r < rows; ++r) m.row(r) = psi.segment(r * cols, cols).transpose();
  Eigen::VectorXd s = linalg::singular_values(m);
  std::vector<double> probs(s.size());
  for (long i = 0; i < s.size(); ++i) probs[i] = s(i) * s(i);
  return renyi_entropy(Spectrum(std::move(probs), true), RenyiOrder::von_neumann());
}

long dense_schmidt_rank(const Eigen::VectorXcd& psi, int n) {
  const int h = n / 2;
  const long long rows = checked_pow(2, h), cols = checked_pow(2, n - h);
  ComplexMatrix m(rows, cols);
  for (long long r = 0; r < rows; ++r) m.row(r) = psi.segment(r * cols, cols).transpose();
  Eigen::VectorXd s = linalg::singular_values(m);
  long rank = 0;
  for (long i = 0; i < s.size(); ++i) {
    if (s(i) * s(i) > 1e-12) ++rank;
  }
  return rank;
}

}  // namespace

QuenchResult exact_evolve(const Eigen::VectorXcd& psi0, const IsingSpec& spec,
                          const std::vector<double>& times, long long matrix_dim_limit) {
  if (times.empty()) throw ValidationError("exact_evolve: empty time grid");
  if (times.front() < 0.0) throw ValidationError("exact_evolve: times must start at >= 0");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) throw ValidationError("exact_evolve: times must increase");
  }
  const double n0 = psi0.norm();
  if (std::abs(n0 - 1.0) > 1e-8) throw ValidationError("exact_evolve: psi0 not normalized");

  ExactPropagator prop(spec, matrix_dim_limit);
  QuenchResult r;
  r.note = spec.boundary == Boundary::periodic ? "boundary=periodic" : "boundary=open";
  for (double t : times) {
    Eigen::VectorXcd psi = prop.evolve(psi0, t);
    if (std::abs(psi.norm() - 1.0) > 1e-8) {
      throw NumericalFailure("exact_evolve: norm drifted to " + std::to_string(psi.norm()));
    }
    r.times.push_back(t);
    r.half_chain_entropy_bits.push_back(half_chain_entropy_dense(psi, spec.N));
    r.max_bond.push_back(dense_schmidt_rank(psi, spec.N));
    r.per_step_truncation.push_back(0.0);
  }
  return r;
}

// ------------------------------------------------------------------- TEBD

namespace {

// exp(-i h tau) for the two-site bond term at bond k
ComplexMatrix bond_gate(const IsingSpec& spec, int k, double tau) {
  const int n = spec.N;
  ComplexMatrix h = ComplexMatrix::Zero(4, 4);
  const double wl = (k == 0) ? 1.0 : 0.5;
  const double wr = (k == n - 2) ? 1.0 : 0.5;
  // basis order |i j> with i (left site) major; Z|0> = +|0>
  auto z = [](int b) { return 1.0 - 2.0 * b; };
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const int row = i * 2 + j;
      h(row, row) += -spec.g * (wl * z(i) + wr * z(j));
      if (spec.coupling == Coupling::zz) {
        h(row, row) += -z(i) * z(j);
      } else {
        h((1 - i) * 2 + (1 - j), row) += -1.0;  // X X flips both
      }
    }
  }
  auto eig = linalg::hermitian_eig(h);
  Eigen::VectorXcd phases(4);
  for (int i = 0; i < 4; ++i) phases(i) = std::exp(-kI * eig.eigenvalues(i) * tau);
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

struct Chain {
  std::vector<SiteTensor> t;
  int center = 0;
  int d = 2;

  long bond(int k) const { return k == 0 ? 1 : t[k - 1][0].cols(); }
  long max_bond() const {
    long m = 1;
    for (const auto& site : t) m = std::max(m, static_cast<long>(site[0].cols()));
    return m;
  }
};

void move_center_right(Chain& c) {
  auto f = linalg::qr(stack_left(c.t[c.center]));
  c.t[c.center] = unstack_left(f.q, c.d);
  for (int i = 0; i < c.d; ++i) c.t[c.center + 1][i] = f.r * c.t[c.center + 1][i];
  ++c.center;
}

void move_center_left(Chain& c) {
  auto f = linalg::lq(stack_right(c.t[c.center]));
  c.t[c.center] = unstack_right(f.q, c.d);
  for (int i = 0; i < c.d; ++i) c.t[c.center - 1][i] = c.t[c.center - 1][i] * f.l;
  --c.center;
}

void move_center_to(Chain& c, int target) {
  while (c.center < target) move_center_right(c);
  while (c.center > target) move_center_left(c);
}

// Applies a two-site gate at bond k (sites k, k+1); center must be at k or
// k+1.  Returns the relative discarded weight.  `toward_right` decides where
// the center lands.  Throws ResourceLimitError on hard-cap overflow.
double apply_gate(Chain& c, int k, const ComplexMatrix& gate, const TebdPolicy& policy,
                  double bond_budget, bool toward_right) {
  const int d = c.d;
  const long dl = c.t[k][0].rows();
  const long dr = c.t[k + 1][0].cols();

  // two-site tensor in (d*d) x (dl*dr) layout for the gate contraction
  ComplexMatrix theta(d * d, dl * dr);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ComplexMatrix blk = c.t[k][i] * c.t[k + 1][j];  // dl x dr
      for (long a = 0; a < dl; ++a) theta.block(i * d + j, a * dr, 1, dr) = blk.row(a);
    }
  }
  theta = gate * theta;

  // back to (dl*d) x (d*dr) for the splitting SVD
  ComplexMatrix m(dl * d, d * dr);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (long a = 0; a < dl; ++a) {
        m.block(a * d + i, j * dr, 1, dr) = theta.block(i * d + j, a * dr, 1, dr);
      }
    }
  }
  auto f = linalg::svd(m);
  const long r0 = static_cast<long>(f.s.size());
  double total = 0.0;
  for (long i = 0; i < r0; ++i) total += f.s(i) * f.s(i);

  long keep = r0;
  if (bond_budget > 0.0) {
    double dropped = 0.0;
    while (keep > 1) {
      const double w = f.s(keep - 1) * f.s(keep - 1);
      if (dropped + w > bond_budget * total) break;
      dropped += w;
      --keep;
    }
  }
  if (policy.max_bond) keep = std::min(keep, *policy.max_bond);
  if (keep > policy.hard_cap) {
    throw ResourceLimitError("tebd: bond dimension exceeds the hard cap", keep, policy.hard_cap);
  }
  double discarded = 0.0;
  for (long i = keep; i < r0; ++i) discarded += f.s(i) * f.s(i);

  if (toward_right) {
    c.t[k] = unstack_left(f.u.leftCols(keep), d);
    ComplexMatrix carry = f.s.head(keep).asDiagonal() * f.vh.topRows(keep);
    c.t[k + 1] = unstack_right(carry, d);
    c.center = k + 1;
  } else {
    c.t[k + 1] = unstack_right(f.vh.topRows(keep), d);
    ComplexMatrix carry = f.u.leftCols(keep) * f.s.head(keep).asDiagonal().toDenseMatrix();
    c.t[k] = unstack_left(carry, d);
    c.center = k;
  }
  return total > 0.0 ? discarded / total : 0.0;
}

}  // namespace

TebdRun tebd_evolve(const MatrixProductState& psi0, const IsingSpec& spec, double dt, int steps,
                    const TebdPolicy& policy, const ExactPropagator* reference, double t_offset) {
  check_spec(spec);
  if (spec.boundary != Boundary::open) {
    throw ValidationError("tebd_evolve: the sweep runs on open boundaries");
  }
  if (psi0.phys_dim() != 2) throw ValidationError("tebd_evolve: qubit chains only");
  if (psi0.num_sites() != spec.N) throw ValidationError("tebd_evolve: chain length mismatch");
  if (dt <= 0.0) throw ValidationError("tebd_evolve: dt must be positive");
  if (steps < 1) throw ValidationError("tebd_evolve: steps must be >= 1");
  if (reference && reference->num_sites() != spec.N) {
    throw ValidationError("tebd_evolve: reference size mismatch");
  }
  if (reference && t_offset != 0.0) {
    throw ValidationError("tebd_evolve: exact comparison requires a run starting at t = 0");
  }

  const int n = spec.N;
  std::vector<ComplexMatrix> even_half(n - 1), odd_full(n - 1);
  for (int k = 0; k < n - 1; ++k) {
    if (k % 2 == 0) even_half[k] = bond_gate(spec, k, dt / 2.0);
    else odd_full[k] = bond_gate(spec, k, dt);
  }
  // gate applications per step (even gates fire twice)
  int apps = 0;
  for (int k = 0; k < n - 1; ++k) apps += (k % 2 == 0) ? 2 : 1;
  const double bond_budget = policy.step_budget > 0.0 ? policy.step_budget / apps : 0.0;

  Chain c;
  c.d = 2;
  {
    MatrixProductState canon = canonicalize(psi0, 0);
    c.t = canon.tensors();
    c.center = 0;
  }

  QuenchResult r;
  r.note = "trotter=2 dt=" + std::to_string(dt) + " boundary=open";
  const int half = n / 2;

  Eigen::VectorXcd psi0_dense;
  if (reference) psi0_dense = to_dense(psi0).normalized();

  auto measure = [&](double t, double step_truncation) {
    move_center_to(c, half);
    auto f = linalg::svd(stack_right(c.t[half]));
    double total = 0.0;
    for (long i = 0; i < f.s.size(); ++i) total += f.s(i) * f.s(i);
    std::vector<double> probs(f.s.size());
    for (long i = 0; i < f.s.size(); ++i) probs[i] = f.s(i) * f.s(i) / total;
    double entropy = renyi_entropy(Spectrum(std::move(probs), true), RenyiOrder::von_neumann());
    r.times.push_back(t);
    r.half_chain_entropy_bits.push_back(entropy);
    r.max_bond.push_back(c.max_bond());
    r.per_step_truncation.push_back(step_truncation);
    if (reference) {
      MatrixProductState cur(2, c.t);
      Eigen::VectorXcd dense = to_dense(cur);
      Eigen::VectorXcd exact = reference->evolve(psi0_dense, t);
      r.exact_error.push_back((exact - dense).norm());
    }
  };

  if (t_offset == 0.0) measure(0.0, 0.0);

  bool halted = false;
  for (int step = 0; step < steps && !halted; ++step) {
    double step_truncation = 0.0;
    try {
      // even half step, left to right
      for (int k = 0; k + 1 < n; k += 2) {
        move_center_to(c, k);
        step_truncation += apply_gate(c, k, even_half[k], policy, bond_budget, true);
      }
      // odd full step, right to left
      for (int k = ((n - 2) % 2 == 1) ? n - 2 : n - 3; k >= 1; k -= 2) {
        move_center_to(c, k + 1);
        step_truncation += apply_gate(c, k, odd_full[k], policy, bond_budget, false);
      }
      // even half step, left to right
      for (int k = 0; k + 1 < n; k += 2) {
        move_center_to(c, k);
        step_truncation += apply_gate(c, k, even_half[k], policy, bond_budget, true);
      }
    } catch (const ResourceLimitError&) {
      r.truncated_run = true;
      r.note += " halted=hard_cap";
      halted = true;
      break;
    }
    r.cumulative_truncation += step_truncation;
    measure(t_offset + (step + 1) * dt, step_truncation);
  }
  r.trotter_error_scale = static_cast<double>(steps) * dt * dt * dt * n;

  move_center_to(c, 0);
  MatrixProductState final_state(2, c.t);
  final_state.with_canonical_claim(0, 1);
  return {std::move(r), std::move(final_state)};
}

GrowthReport entropy_growth_report(const QuenchResult& r, double t0, double t1) {
  if (t1 <= t0) throw ValidationError("entropy_growth_report: empty window");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (r.times[i] >= t0 - 1e-12 && r.times[i] <= t1 + 1e-12) {
      xs.push_back(r.times[i]);
      ys.push_back(r.half_chain_entropy_bits[i]);
    }
  }
  if (xs.size() < 5) {
    throw ValidationError("entropy_growth_report: need at least 5 samples in the window, have " +
                          std::to_string(xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  GrowthReport g;
  g.slope_bits_per_time = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  g.slope_nats_per_time = g.slope_bits_per_time * std::log(2.0);

  long max_seen = 0;
  for (long b : r.max_bond) max_seen = std::max(max_seen, b);
  for (long threshold = 2; threshold <= max_seen; threshold *= 2) {
    for (std::size_t i = 0; i < r.times.size(); ++i) {
      if (r.max_bond[i] >= threshold) {
        g.bond_thresholds.push_back(threshold);
        g.bond_doubling_times.push_back(r.times[i]);
        break;
      }
    }
  }
  return g;
}

}  // namespace mpslab
