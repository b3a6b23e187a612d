#include <doctest.h>

#include <cmath>

#include "mpslab/verify.hpp"

using namespace mpslab;

TEST_CASE("trial seeds are deterministic and index-dependent") {
  CHECK(trial_seed(42, 0) == trial_seed(42, 0));
  CHECK(trial_seed(42, 0) != trial_seed(42, 1));
  CHECK(trial_seed(42, 0) != trial_seed(43, 0));
}

TEST_CASE("random_mps produces normalized states within the bond budget") {
  for (unsigned seed : {1u, 2u}) {
    MatrixProductState m = random_mps(7, 2, 5, seed);
    CHECK(m.num_sites() == 7);
    CHECK(m.max_bond_dim() <= 5);
    CHECK(norm(m) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("eps lower bound: trivial and GHZ cases") {
  MatrixProductState ghz = elementary_state(ElementaryKind::ghz, 8, 2);

  // D covering the Schmidt rank: zero obstruction, trivially satisfied
  BoundReport trivial = verify_eps_lower(ghz, 2, 10, 5);
  CHECK(trivial.bound_value == doctest::Approx(0.0));
  CHECK(trivial.satisfied == BoundStatus::holds);

  BoundReport r = verify_eps_lower(ghz, 1, 50, 7);
  CHECK(r.bound_value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.violations == 0);
  CHECK(r.worst_margin >= 0.0);
}

TEST_CASE("eps lower bound on the magic state") {
  BoundReport r = verify_eps_lower(magic_state(4, 0.25), 2, 100, 11);
  CHECK(r.violations == 0);
  CHECK(r.satisfied == BoundStatus::holds);
}

TEST_CASE("eps upper bound over a grid") {
  BoundReport ghz = verify_eps_upper(elementary_state(ElementaryKind::ghz, 8, 2), {1, 2});
  CHECK(ghz.violations == 0);
  BoundReport magic = verify_eps_upper(magic_state(4, 0.25), {1, 2, 4, 8, 17});
  CHECK(magic.violations == 0);
  CHECK(magic.satisfied == BoundStatus::holds);
}

TEST_CASE("product structure harness on Bell pair products") {
  MatrixProductState bell = pair_ring(2, 1);
  BoundReport r = verify_product_structure(bell, bell, 2, 100, 13);
  CHECK(r.violations == 0);
  CHECK(r.satisfied == BoundStatus::holds);
}

TEST_CASE("product-structure check: product candidates sit at the equality point") {
  MatrixProductState bell = pair_ring(2, 1);
  // candidate already factorizes across the cut
  MatrixProductState product = concat(bell, elementary_state(ElementaryKind::ghz, 2, 2));
  ProductStructureCheck eq = product_structure_check(bell, bell, product);
  CHECK(eq.schmidt_rank == 1);
  CHECK(eq.factorized_fidelity == doctest::Approx(eq.original_fidelity).epsilon(1e-10));

  // rank-2 candidate with a two-fold tie among the b-overlaps
  ProductStructureCheck tie =
      product_structure_check(bell, bell, elementary_state(ElementaryKind::ghz, 4, 2));
  CHECK(tie.schmidt_rank == 2);
  CHECK(tie.tie_set_size == 2);
  CHECK(tie.factorized_fidelity >= tie.original_fidelity - 1e-10);
}

TEST_CASE("multiplicativity bound: examples and sweeps") {
  BoundReport zero = verify_multiplicativity(0.0, 16);
  CHECK(zero.bound_value == doctest::Approx(0.0));
  CHECK(zero.satisfied == BoundStatus::holds);

  BoundReport r = verify_multiplicativity(0.1, 100);
  CHECK(r.bound_value == doctest::Approx(std::sqrt(12.5) * 0.1).epsilon(1e-12));
  CHECK(r.satisfied == BoundStatus::holds);

  BoundReport outside = verify_multiplicativity(0.9, 100);
  CHECK(outside.satisfied == BoundStatus::not_applicable);

  for (int K : {2, 3, 8, 64, 256}) {
    const double tmax = std::sqrt(2.0 / K);
    for (int j = 1; j <= 8; ++j) {
      BoundReport sweep = verify_multiplicativity(tmax * j / 8, K);
      CHECK(sweep.satisfied != BoundStatus::violated);
    }
  }
}

TEST_CASE("audenaert harness") {
  BoundReport r2 = verify_audenaert(100, 2, 3);
  CHECK(r2.violations == 0);
  BoundReport r8 = verify_audenaert(100, 8, 3);
  CHECK(r8.violations == 0);
  CHECK(r8.worst_margin >= 0.0);
}

TEST_CASE("majorization harness and the exact-attainment check") {
  BoundReport r = verify_majorization(0.1, 2, 3, RenyiOrder{2.0}, 500, 17);
  CHECK(r.violations == 0);
  CHECK(r.bound_value == doctest::Approx(1.2982).epsilon(1e-4));

  BoundReport flat = verify_majorization(0.0, 4, 4, RenyiOrder{1.5}, 50, 19);
  CHECK(flat.bound_value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(flat.violations == 0);
}

TEST_CASE("scaling experiment: magic family") {
  std::vector<FamilyParams> grid;
  for (int n : {4, 6}) {
    FamilyParams fp;
    fp.N = n;
    fp.p = 1.0 / n;
    grid.push_back(fp);
  }
  const double delta = std::sqrt(1.0 / 6.0);
  auto rows = scaling_experiment("magic", grid, {RenyiOrder{0.5}}, delta);
  REQUIRE(rows.size() == 4 + 6);
  for (const auto& row : rows) {
    CHECK_FALSE(row.skipped);
    CHECK(row.entropy_bits >=
          row.L - 0.5 / (1.0 - 0.5) * std::log2(static_cast<double>(row.N)) - 1e-6);
    CHECK(row.D_required <= 2);  // approximable side at delta >= sqrt(p)
  }
  // sorted by (N, L, alpha)
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::make_tuple(rows[i - 1].N, rows[i - 1].L, rows[i - 1].alpha) <=
          std::make_tuple(rows[i].N, rows[i].L, rows[i].alpha));
  }
}

TEST_CASE("scaling experiment: pair ring obstruction grows with the pair count") {
  std::vector<FamilyParams> grid;
  for (int n : {8, 12, 16}) {
    FamilyParams fp;
    fp.N = n;
    fp.nu = n / 4;
    grid.push_back(fp);
  }
  const double delta = 0.1;
  auto rows = scaling_experiment("pair_ring", grid, {RenyiOrder::min_entropy()}, delta);
  long long prev = 0;
  for (const auto& row : rows) {
    if (row.L != row.N / 2) continue;
    // D_required = ceil(2^nu (1 - delta)) at the max cut
    const long long expected =
        static_cast<long long>(std::ceil((1LL << (row.N / 4)) * (1.0 - delta)));
    CHECK(row.D_required == expected);
    CHECK(row.D_required >= prev);
    prev = row.D_required;
  }
}

TEST_CASE("scaling experiment: chi rows stay under the area-law cap") {
  std::vector<FamilyParams> grid;
  FamilyParams fp;
  fp.N = 4;
  fp.p = 0.25;
  fp.copies = 3;
  grid.push_back(fp);
  auto rows = scaling_experiment("chi", grid, {RenyiOrder::von_neumann()}, 0.05);
  CHECK(!rows.empty());
  for (const auto& row : rows) {
    CHECK_FALSE(row.skipped);
    CHECK(row.entropy_bits <= 4.0);
    CHECK(row.D_required == chi_bond_obstruction(4, 50000, 1000000));
  }
}

TEST_CASE("scaling experiment flags out-of-reach grid points instead of dropping them") {
  std::vector<FamilyParams> grid;
  FamilyParams fp;
  fp.N = 14;  // pair register beyond the construction guard
  fp.p = 1.0 / 14;
  grid.push_back(fp);
  auto rows = scaling_experiment("magic", grid, {RenyiOrder{0.5}}, 0.1);
  REQUIRE(!rows.empty());
  for (const auto& row : rows) {
    CHECK(row.skipped);
    CHECK_FALSE(row.note.empty());
  }
  CHECK_THROWS_AS(scaling_experiment("nope", grid, {RenyiOrder{0.5}}, 0.1), ValidationError);
}
