#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "diagline/enumerate.hpp"
#include "diagline/errors.hpp"
#include "diagline/instance.hpp"
#include "diagline/singularity.hpp"
#include "oracles.hpp"

using namespace diagline;

namespace {

std::vector<std::int64_t> random_vec(std::mt19937_64& rng, int s, int span, bool nonzero) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(s));
  for (auto& x : v) do x = static_cast<std::int64_t>(rng() % (2 * span + 1)) - span; while (nonzero && x == 0);
  return v;
}

}  // namespace

TEST_CASE("exact linear algebra") {
  Matrix m = {{2, 4, 6}, {1, 2, 3}};
  CHECK(exact_rank(m) == 1);
  Matrix sq = {{2, 0, 1}, {1, 3, 2}, {1, 1, 2}};
  CHECK(exact_determinant(sq) == 6);
  Matrix big = {{BigInt("100000000000000000000"), 1}, {1, BigInt("100000000000000000000")}};
  CHECK(exact_determinant(big) == BigInt("10000000000000000000000000000000000000000") - 1);
  CHECK(min_minor_valuation(Matrix{{2, 4}, {6, 8}}, 2) == 3u);
  CHECK_FALSE(min_minor_valuation(m, 3));
  CHECK(min_minor_valuation(Matrix{{1, 0, 9}, {0, 3, 9}}, 3) == 1u);
}

TEST_CASE("Jacobian examples") {
  const auto s3 = LineSystem::relaxed(2, {1, 1, -2}, {1, 1, 1});
  auto rep = jacobian(s3, std::vector<std::int64_t>{1, 1, 1});
  CHECK(rep.rank == 1);
  CHECK_FALSE(rep.nonsingular);
  CHECK(rep.matrix[1][2] == -4);
  CHECK(rep.distinct_ratios == 1);

  const auto fl = flagship_instance().line_system();
  std::vector<std::int64_t> zero(12, 0);
  CHECK(jacobian(fl, zero).rank == 1);

  auto ch = jacobian(LineSystem::relaxed(1, {1, -1}, {1, 1}), std::vector<std::int64_t>{3, 3});
  CHECK(ch.rank == 1);
  CHECK(ch.nonsingular);
  CHECK(ch.ratio_profile[0] == BigRational(3));
}

TEST_CASE("property: rank agrees with rational Gaussian elimination") {
  std::mt19937_64 rng(50);
  for (int t = 0; t < 300; ++t) {
    const int k = 1 + static_cast<int>(rng() % 4), s = k + static_cast<int>(rng() % 5);
    const auto c = random_vec(rng, s, 4, true), y = random_vec(rng, s, 3, true), z = random_vec(rng, s, 3, false);
    const auto ls = LineSystem::relaxed(k, c, y);
    CHECK(jacobian(ls, z).rank == oracle::jacobian_rank(k, c, y, z));
  }
}

TEST_CASE("property: distinct ratios give full rank on the chosen columns") {
  std::mt19937_64 rng(51);
  int tested = 0;
  while (tested < 200) {
    const int k = 2 + static_cast<int>(rng() % 3), s = k + static_cast<int>(rng() % 4);
    const auto c = random_vec(rng, s, 4, true), y = random_vec(rng, s, 3, true), z = random_vec(rng, s, 4, true);
    // Pick k indices with pairwise distinct ratios z_i / y_i.
    std::vector<int> cols;
    std::set<BigRational> seen;
    for (int i = 0; i < s && static_cast<int>(cols.size()) < k; ++i) {
      BigRational r(BigInt(y[i] < 0 ? -z[i] : z[i]), BigInt(y[i] < 0 ? -y[i] : y[i]));
      if (seen.insert(r).second) cols.push_back(i);
    }
    if (static_cast<int>(cols.size()) < k) continue;
    const auto ls = LineSystem::relaxed(k, c, y);
    const auto j = jacobian_matrix(ls, z);
    CHECK(jacobian_minor(j, cols) != 0);
    CHECK(jacobian(ls, z).rank == k);
    ++tested;
  }
}

TEST_CASE("property: fewer than k distinct ratios collapse every minor") {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + static_cast<int>(rng() % 3), s = k + static_cast<int>(rng() % (9 - k));
    const auto c = random_vec(rng, s, 4, true), y = random_vec(rng, s, 3, true);
    // z_i = r y_i with r drawn from k - 1 values.
    std::vector<std::int64_t> z(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) z[i] = y[i] * static_cast<std::int64_t>(rng() % (k - 1));
    const auto ls = LineSystem::relaxed(k, c, y);
    const auto rep = jacobian(ls, z);
    CHECK(rep.distinct_ratios <= k - 1);
    CHECK(all_minors_vanish(rep.matrix));
    CHECK(rep.rank < k);
  }
}

TEST_CASE("property: Jacobian commutes with joint permutation") {
  std::mt19937_64 rng(53);
  for (int t = 0; t < 100; ++t) {
    const int k = 1 + static_cast<int>(rng() % 3), s = 2 + static_cast<int>(rng() % 5);
    const auto c = random_vec(rng, s, 4, true), y = random_vec(rng, s, 3, true), z = random_vec(rng, s, 3, false);
    std::vector<int> perm(static_cast<std::size_t>(s));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::int64_t> c2(s), y2(s), z2(s);
    for (int i = 0; i < s; ++i) c2[i] = c[perm[i]], y2[i] = y[perm[i]], z2[i] = z[perm[i]];
    const auto a = jacobian_matrix(LineSystem::relaxed(k, c, y), z);
    const auto b = jacobian_matrix(LineSystem::relaxed(k, c2, y2), z2);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < s; ++i) CHECK(b[j][i] == a[j][perm[i]]);
  }
}

TEST_CASE("guarantees on every flagship solution up to B = 2") {
  const auto fl = flagship_instance().line_system();
  const auto sols = enumerate_line_solutions(fl, 2);
  CHECK(sols.size() == 448545);
  const auto reps = classify_solutions(fl, sols);
  std::size_t guaranteed = 0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    CHECK(reps[i].solves);
    if (reps[i].guaranteed_nonsingular) {
      ++guaranteed;
      CHECK(reps[i].rank == 3);
    }
  }
  // The flagship has vanishing subsums and no solution in this box with every
  // z_i != 0, so the guarantee never fires here.
  CHECK(guaranteed == 0);
}

TEST_CASE("property: without vanishing subsums every nonzero solution is non-singular") {
  std::mt19937_64 rng(54);
  std::size_t instances = 0, guaranteed = 0;
  for (int t = 0; t < 400 && instances < 20; ++t) {
    const auto c = random_vec(rng, 6, 5, true), y = random_vec(rng, 6, 3, true);
    const auto ls = LineSystem::relaxed(2, c, y);
    if (ls.c0() == 0 || classify_solution(ls, std::vector<std::int64_t>(6, 0)).vanishing_subsums_found) continue;
    ++instances;
    const auto sols = enumerate_line_solutions(ls, 3);
    for (const auto& r : classify_solutions(ls, sols)) {
      CHECK(r.guaranteed_nonsingular != r.z_zero);
      if (r.guaranteed_nonsingular) {
        ++guaranteed;
        CHECK(r.rank == 2);
      }
    }
  }
  CHECK(instances == 20);
  CHECK(guaranteed > 20);
}

TEST_CASE("the n = 0 counterexample is not guaranteed") {
  const auto s3 = LineSystem::relaxed(2, {1, 1, -2}, {1, 1, 1});
  const auto rep = classify_solution(s3, std::vector<std::int64_t>{1, 1, 1});
  CHECK(rep.all_z_nonzero);
  CHECK_FALSE(rep.clause_b);
  CHECK_FALSE(rep.c0_nonzero);
  CHECK_FALSE(rep.guaranteed_nonsingular);
  CHECK(rep.rank == 1);
  for (const auto& z : enumerate_line_solutions(s3, 3)) {
    if (std::all_of(z.begin(), z.end(), [](std::int64_t v) { return v == 0; })) continue;
    CHECK(jacobian(s3, z).rank == 1);
  }
  const auto zero = classify_solution(s3, std::vector<std::int64_t>{0, 0, 0});
  CHECK(zero.z_zero);
  CHECK_FALSE(zero.guaranteed_nonsingular);
  CHECK_THROWS_AS(classify_solution(s3, std::vector<std::int64_t>{1, 1}), InvalidInput);
}
