#include <doctest.h>

#include <random>
#include <sstream>

#include "mpslab/mps.hpp"
#include "mpslab/states.hpp"
#include "mpslab/verify.hpp"
#include "oracles.hpp"

using namespace mpslab;
using linalg::ComplexMatrix;

namespace {

Eigen::VectorXcd random_state(long long dim, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(dim);
  for (long long i = 0; i < dim; ++i) v(i) = {g(rng), g(rng)};
  return v / v.norm();
}

Eigen::VectorXcd kron(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd out(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// checks the isometry conditions the canonical-form metadata claims
void check_canonical_claims(const MatrixProductState& m) {
  const int d = m.phys_dim();
  for (int k = 0; k < m.left_iso_count(); ++k) {
    ComplexMatrix acc = ComplexMatrix::Zero(m.site(k)[0].cols(), m.site(k)[0].cols());
    for (int i = 0; i < d; ++i) acc += m.site(k)[i].adjoint() * m.site(k)[i];
    CHECK((acc - ComplexMatrix::Identity(acc.rows(), acc.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (int k = m.right_iso_from(); k < m.num_sites(); ++k) {
    ComplexMatrix acc = ComplexMatrix::Zero(m.site(k)[0].rows(), m.site(k)[0].rows());
    for (int i = 0; i < d; ++i) acc += m.site(k)[i] * m.site(k)[i].adjoint();
    CHECK((acc - ComplexMatrix::Identity(acc.rows(), acc.cols())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

}  // namespace

TEST_CASE("from_dense of |00> is a product chain and round-trips exactly") {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = 1.0;
  MatrixProductState m = from_dense(v, 2);
  CHECK(m.max_bond_dim() == 1);
  CHECK((to_dense(m) - v).norm() < 1e-14);
}

TEST_CASE("from_dense of GHZ has interior bonds 2") {
  const int n = 6;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1 << n);
  v(0) = v((1 << n) - 1) = 1.0 / std::sqrt(2.0);
  MatrixProductState m = from_dense(v, 2);
  for (int k = 1; k < n; ++k) CHECK(m.bond_dim(k) == 2);
  CHECK((to_dense(m) - v).norm() < 1e-12);
  // Schmidt rank across any cut is 2: confirmed by the dense reduced state
  for (int cut = 1; cut < n; ++cut) {
    Eigen::MatrixXcd rho = oracles::dense_reduced(v, n, 2, 0, cut);
    Eigen::VectorXd ev = linalg::hermitian_eigvals(rho);
    int rank = 0;
    for (long i = 0; i < ev.size(); ++i) rank += ev(i) > 1e-12 ? 1 : 0;
    CHECK(rank == 2);
  }
}

TEST_CASE("from_dense/to_dense round trip on random states") {
  for (unsigned seed : {1u, 2u, 3u}) {
    Eigen::VectorXcd v = random_state(1 << 8, seed);
    MatrixProductState m = from_dense(v, 2);
    CHECK((to_dense(m) - v).norm() < 1e-10);
    check_canonical_claims(m);
  }
}

TEST_CASE("from_dense rejects bad lengths and oversized requests") {
  CHECK_THROWS_AS(from_dense(Eigen::VectorXcd::Ones(6), 2), ValidationError);
  CHECK_THROWS_AS(from_dense(Eigen::VectorXcd::Ones(8), 2, std::nullopt, 4), ResourceLimitError);
  CHECK_THROWS_AS(to_dense(elementary_state(ElementaryKind::all_up, 30, 2)), ResourceLimitError);
}

TEST_CASE("from_dense with a bond cap obeys the compression contract") {
  for (unsigned seed : {5u, 6u}) {
    Eigen::VectorXcd v = random_state(1 << 8, seed);
    MatrixProductState exact = from_dense(v, 2);
    auto spectra = schmidt_spectra(exact);
    for (long cap : {1L, 2L, 4L}) {
      double bound = 0.0;
      for (const auto& s : spectra) bound += truncation_error(s, cap);
      bound *= 2.0;
      MatrixProductState m = from_dense(v, 2, cap);
      CHECK(m.max_bond_dim() <= cap);
      CHECK((to_dense(m) - v).norm() <= bound + 1e-10);
    }
  }
}

TEST_CASE("concat represents the tensor product") {
  Eigen::VectorXcd va = random_state(1 << 3, 11);
  Eigen::VectorXcd vb = random_state(1 << 2, 12);
  MatrixProductState m = concat(from_dense(va, 2), from_dense(vb, 2));
  CHECK((to_dense(m) - kron(va, vb)).norm() < 1e-12);
}

TEST_CASE("canonicalize preserves the state and sets isometries") {
  MatrixProductState m = random_mps(8, 2, 4, 99);
  for (int center : {0, 3, 7}) {
    MatrixProductState c = canonicalize(m, center);
    CHECK(c.left_iso_count() == center);
    CHECK(c.right_iso_from() == center + 1);
    check_canonical_claims(c);
    CHECK(std::abs(overlap(m, c) - std::complex<double>(1.0, 0.0)) < 1e-10);
  }
  // canonicalizing twice is stable
  MatrixProductState c1 = canonicalize(m, 4);
  MatrixProductState c2 = canonicalize(c1, 4);
  CHECK(std::abs(overlap(c1, c2) - std::complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("schmidt spectra: products, GHZ, and the dense oracle") {
  MatrixProductState up = elementary_state(ElementaryKind::all_up, 6, 2);
  for (int cut = 1; cut < 6; ++cut) {
    Spectrum s = schmidt_spectrum(up, cut);
    CHECK(s.numerical_rank() == 1);
    CHECK(s[0] == doctest::Approx(1.0));
  }
  MatrixProductState ghz = elementary_state(ElementaryKind::ghz, 6, 2);
  for (int cut = 1; cut < 6; ++cut) {
    Spectrum s = schmidt_spectrum(ghz, cut);
    CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-12));
  }
  // random state: spectra match the dense reduced-density eigenvalues
  Eigen::VectorXcd v = random_state(1 << 7, 21);
  MatrixProductState m = from_dense(v, 2);
  auto spectra = schmidt_spectra(m);
  for (int cut = 1; cut < 7; ++cut) {
    Eigen::VectorXd ev = linalg::hermitian_eigvals(oracles::dense_reduced(v, 7, 2, 0, cut));
    for (std::size_t i = 0; i < spectra[cut - 1].size(); ++i) {
      CHECK(spectra[cut - 1][i] == doctest::Approx(ev(i)).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(schmidt_spectrum(m, 0), ValidationError);
  CHECK_THROWS_AS(schmidt_spectrum(m, 7), ValidationError);
}

TEST_CASE("schmidt_spectrum rejects unnormalized states") {
  Eigen::VectorXcd v = random_state(1 << 4, 33) * 1.5;
  MatrixProductState m = from_dense(v, 2);
  CHECK_THROWS_AS(schmidt_spectrum(m, 2), ValidationError);
}

TEST_CASE("magic middle-cut spectrum matches the dense partial trace") {
  MatrixProductState m = magic_state(2, 0.25);  // 4 qutrit sites
  Eigen::VectorXcd v = to_dense(m);
  Spectrum s = schmidt_spectrum(m, 2);
  Eigen::VectorXd ev = linalg::hermitian_eigvals(oracles::dense_reduced(v, 4, 3, 0, 2));
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i] == doctest::Approx(ev(i)).epsilon(1e-10));
  }
}

TEST_CASE("compress: identity when the budget covers the rank") {
  MatrixProductState m = random_mps(8, 2, 4, 7);
  auto [out, report] = compress(m, 16);
  CHECK(report.eps_sum == 0.0);
  CHECK(report.realized_error < 1e-10);
  CHECK(out.max_bond_dim() <= m.max_bond_dim());
  CHECK(std::abs(overlap(m, out) - std::complex<double>(1, 0)) < 1e-10);
}

TEST_CASE("compress GHZ to a product") {
  MatrixProductState ghz = elementary_state(ElementaryKind::ghz, 8, 2);
  auto [out, report] = compress(ghz, 1);
  for (double eps : report.eps_per_cut) CHECK(eps == doctest::Approx(0.5).epsilon(1e-12));
  // realized fidelity between the normalized states is 1/sqrt(2)
  CHECK(distances(ghz, out).fidelity == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
  CHECK(out.max_bond_dim() == 1);
  CHECK(report.realized_error <= report.upper_bound + 1e-10);
}

TEST_CASE("compress magic at D=1: middle-cut truncation error is p") {
  MatrixProductState m = magic_state(4, 0.25);
  auto [out, report] = compress(m, 1);
  CHECK(report.eps_per_cut[3] == doctest::Approx(0.25).epsilon(1e-10));  // cut k = N = 4
  CHECK(report.realized_error <= report.upper_bound + 1e-8);
}

TEST_CASE("compression error never exceeds twice the truncation-error sum") {
  for (unsigned seed : {40u, 41u, 42u}) {
    Eigen::VectorXcd v = random_state(1 << 8, seed);
    MatrixProductState m = from_dense(v, 2);
    for (long D : {1L, 2L, 4L}) {
      auto [out, report] = compress(m, D);
      CHECK(report.realized_error <= report.upper_bound + 1e-8);
      CHECK(out.max_bond_dim() <= D);
      // the report matches a dense evaluation of the realized error
      CHECK(report.realized_error ==
            doctest::Approx((to_dense(out) - v).norm()).epsilon(1e-8));
    }
  }
}

TEST_CASE("overlap matches the dense inner product") {
  Eigen::VectorXcd va = random_state(1 << 8, 51);
  Eigen::VectorXcd vb = random_state(1 << 8, 52);
  MatrixProductState a = from_dense(va, 2);
  MatrixProductState b = from_dense(vb, 2);
  const std::complex<double> dense = va.adjoint() * vb;
  CHECK(std::abs(overlap(a, b) - dense) < 1e-10);
  CHECK(std::abs(overlap(a, a) - std::complex<double>(1, 0)) < 1e-10);
  CHECK_THROWS_AS(overlap(a, elementary_state(ElementaryKind::all_up, 4, 2)), ValidationError);
}

TEST_CASE("distances: equal, orthogonal, and the GHZ-product pair") {
  MatrixProductState ghz = elementary_state(ElementaryKind::ghz, 6, 2);
  MatrixProductState up = elementary_state(ElementaryKind::all_up, 6, 2);
  auto same = distances(ghz, ghz);
  CHECK(same.theta == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(same.T == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(same.V == doctest::Approx(0.0).epsilon(1e-9));

  auto gp = distances(ghz, up);
  CHECK(gp.fidelity == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(gp.theta == doctest::Approx(M_PI / 4).epsilon(1e-12));
  CHECK(gp.V == doctest::Approx(0.70711).epsilon(1e-4));
  CHECK(gp.T == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(gp.trace_distance_normalized == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  MatrixProductState b0 = elementary_state(ElementaryKind::basis, 4, 2, 3);
  MatrixProductState b1 = elementary_state(ElementaryKind::basis, 4, 2, 9);
  auto ortho = distances(b0, b1);
  CHECK(ortho.theta == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(ortho.V == doctest::Approx(1.0));
  CHECK(ortho.T == doctest::Approx(1.0));
}

TEST_CASE("distance measures agree with brute-force scale optimization") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::VectorXcd va = random_state(1 << 4, 100 + trial);
    Eigen::VectorXcd vb = random_state(1 << 4, 200 + trial);
    auto rep = distances(from_dense(va, 2), from_dense(vb, 2));
    if (rep.theta <= M_PI / 4.0) {
      CHECK(std::abs(oracles::trace_measure_grid(va, vb) - rep.T) < 1e-6);
    }
    CHECK(std::abs(oracles::two_norm_measure_grid(va, vb) - rep.V) < 1e-6);
  }
}

TEST_CASE("reduced density matrices") {
  MatrixProductState up = elementary_state(ElementaryKind::all_up, 5, 2);
  Eigen::MatrixXcd rho = reduced_density(up, 2, 1);
  CHECK(std::abs(rho(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(rho(1, 1)) < 1e-12);

  MatrixProductState ghz = elementary_state(ElementaryKind::ghz, 5, 2);
  Eigen::MatrixXcd half = reduced_density(ghz, 3, 1);
  CHECK(std::abs(half(0, 0) - 0.5) < 1e-12);
  CHECK(std::abs(half(1, 1) - 0.5) < 1e-12);

  // magic family block: (1-p)|22><22| + (p/4) sum_y |y><y| on two qubits
  MatrixProductState m = magic_state(4, 0.25);
  Eigen::MatrixXcd blk = reduced_density(m, 1, 2);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(9, 9);
  for (int y : {0, 1, 3, 4}) expected(y, y) = 0.25 / 4;  // qutrit digits 0/1 pairs
  expected(8, 8) = 0.75;
  CHECK((blk - expected).cwiseAbs().maxCoeff() < 1e-10);

  // against the dense partial trace on a random state
  Eigen::VectorXcd v = random_state(1 << 6, 77);
  MatrixProductState r = from_dense(v, 2);
  Eigen::MatrixXcd lhs = reduced_density(r, 2, 3);
  Eigen::MatrixXcd rhs = oracles::dense_reduced(v, 6, 2, 2, 3);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(reduced_density(r, 0, 40), ValidationError);
}

TEST_CASE("block_spectrum picks consistent routes") {
  Eigen::VectorXcd v = random_state(1 << 6, 88);
  MatrixProductState m = from_dense(v, 2);
  for (auto [first, len] : std::vector<std::pair<int, int>>{{0, 2}, {1, 3}, {4, 2}, {2, 4}}) {
    Spectrum s = block_spectrum(m, first, len);
    Eigen::VectorXd ev = linalg::hermitian_eigvals(oracles::dense_reduced(v, 6, 2, first, len));
    for (std::size_t i = 0; i < std::min<std::size_t>(s.size(), 4); ++i) {
      CHECK(s[i] == doctest::Approx(ev(i)).epsilon(1e-9));
    }
  }
}

TEST_CASE("translate and translate_superposition against the dense oracle") {
  // |10> on a 2-site ring
  MatrixProductState one = elementary_state(ElementaryKind::basis, 2, 2, 2);
  Eigen::VectorXcd flat = to_dense(translate_superposition(one));
  CHECK(std::abs(flat(1) - 1.0 / std::sqrt(2.0)) < 1e-12);
  CHECK(std::abs(flat(2) - 1.0 / std::sqrt(2.0)) < 1e-12);

  // translation-invariant input is unchanged
  MatrixProductState up = elementary_state(ElementaryKind::all_up, 5, 2);
  CHECK(std::abs(std::abs(overlap(translate_superposition(up), up)) - 1.0) < 1e-10);

  // a ring of pairs against the explicit dense sum of translates
  MatrixProductState ring = pair_ring(8, 1);
  Eigen::VectorXcd dense = oracles::translate_sum_dense(to_dense(ring), 8, 2);
  MatrixProductState ti = translate_superposition(ring);
  CHECK((to_dense(ti) - dense).norm() < 1e-8);
  CHECK(ti.max_bond_dim() <= 8 * ring.max_bond_dim() * ring.max_bond_dim());

  // single translate oracle
  MatrixProductState t1 = translate(ring, 3);
  Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(1 << 8);
  {
    Eigen::VectorXcd src = to_dense(ring);
    for (long long idx = 0; idx < expect.size(); ++idx) {
      long long rot = 0;
      for (int j = 0; j < 8; ++j) {
        const int jo = ((j - 3) % 8 + 8) % 8;
        const int digit = static_cast<int>((idx >> (8 - 1 - j)) & 1);
        rot += static_cast<long long>(digit) << (8 - 1 - jo);
      }
      expect(idx) = src(rot);
    }
  }
  CHECK((to_dense(t1) - expect).norm() < 1e-12);
}

TEST_CASE("destructive interference is reported distinctly") {
  // |+-> - |-+> style cancellation: (|01> - |10>) has translates summing to 0
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  MatrixProductState singlet = from_dense(v, 2);
  CHECK_THROWS_AS(translate_superposition(singlet), DestructiveInterferenceError);
}

TEST_CASE("serialization round trip at 17 significant digits") {
  MatrixProductState m = random_mps(6, 3, 5, 4242);
  std::stringstream ss;
  save_mps(m, ss);
  MatrixProductState loaded = load_mps(ss);
  CHECK(loaded.num_sites() == m.num_sites());
  CHECK(loaded.phys_dim() == m.phys_dim());
  for (int k = 0; k <= m.num_sites(); ++k) CHECK(loaded.bond_dim(k) == m.bond_dim(k));
  CHECK(std::abs(overlap(m, loaded) - std::complex<double>(1, 0)) < 1e-12);

  std::stringstream corrupted("mpslab-mps 2\n");
  CHECK_THROWS_AS(load_mps(corrupted), ValidationError);
}
