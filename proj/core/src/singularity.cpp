#include "diagline/singularity.hpp"

#include <algorithm>
#include <set>

#include "diagline/errors.hpp"

namespace diagline {

namespace {

// Bareiss elimination in place; returns the rank. Every division is exact.
int bareiss(Matrix& m, bool* swapped_odd = nullptr) {
  const std::size_t rows = m.size();
  if (rows == 0) return 0;
  const std::size_t cols = m[0].size();
  BigInt prev = 1;
  std::size_t r = 0;
  bool odd = false;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    if (piv != r) {
      std::swap(m[piv], m[r]);
      odd = !odd;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        BigInt num = m[r][c] * m[i][j] - m[i][c] * m[r][j];
        BigInt q, rem;
        boost::multiprecision::divide_qr(num, prev, q, rem);
        if (rem != 0) throw ConsistencyError("fraction-free elimination hit an inexact division");
        m[i][j] = std::move(q);
      }
      m[i][c] = 0;
    }
    prev = m[r][c];
    ++r;
  }
  if (swapped_odd) *swapped_odd = odd;
  return static_cast<int>(r);
}

int p_valuation(const BigRational& v, std::int64_t p) {
  return static_cast<int>(valuation(numerator(v), p)) - static_cast<int>(valuation(denominator(v), p));
}

}  // namespace

int exact_rank(Matrix m) { return bareiss(m); }

BigInt exact_determinant(Matrix m) {
  const std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) throw InvalidInput("determinant needs a square matrix");
  if (n == 0) return 1;
  bool odd = false;
  if (bareiss(m, &odd) < static_cast<int>(n)) return 0;
  // With full rank no column is skipped, so the last pivot is the determinant.
  return odd ? BigInt(-m[n - 1][n - 1]) : m[n - 1][n - 1];
}

std::optional<unsigned> min_minor_valuation(const Matrix& m, std::int64_t p) {
  if (p < 2) throw InvalidInput("p must be >= 2");
  const std::size_t k = m.size();
  if (k == 0) return 0u;
  const std::size_t s = m[0].size();
  if (s < k) return std::nullopt;
  // Full-pivot elimination over Z_(p): each pivot has minimal valuation in its
  // submatrix, so the pivot valuations sum to the valuation of the gcd of all
  // k x k minors.
  std::vector<std::vector<BigRational>> a(k, std::vector<BigRational>(s));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < s; ++j) a[i][j] = BigRational(m[i][j]);
  std::vector<bool> row_used(k, false), col_used(s, false);
  unsigned total = 0;
  for (std::size_t step = 0; step < k; ++step) {
    int best = -1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (row_used[i]) continue;
      for (std::size_t j = 0; j < s; ++j) {
        if (col_used[j] || a[i][j] == 0) continue;
        const int v = p_valuation(a[i][j], p);
        if (best < 0 || v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (best < 0) return std::nullopt;
    total += static_cast<unsigned>(best);
    row_used[bi] = col_used[bj] = true;
    for (std::size_t i = 0; i < k; ++i) {
      if (row_used[i] || a[i][bj] == 0) continue;
      const BigRational f = a[i][bj] / a[bi][bj];
      for (std::size_t j = 0; j < s; ++j)
        if (!col_used[j]) a[i][j] -= f * a[bi][j];
      a[i][bj] = 0;
    }
  }
  return total;
}

Matrix jacobian_matrix(const LineSystem& ls, std::span<const std::int64_t> z) {
  if (static_cast<int>(z.size()) != ls.s()) throw InvalidInput("z has wrong length");
  Matrix j(static_cast<std::size_t>(ls.k()), std::vector<BigInt>(z.size()));
  for (int r = 1; r <= ls.k(); ++r)
    for (int i = 0; i < ls.s(); ++i)
      j[static_cast<std::size_t>(r - 1)][static_cast<std::size_t>(i)] =
          r * ls.coeff(r, i) * big_pow(BigInt(z[static_cast<std::size_t>(i)]), static_cast<unsigned>(r - 1));
  return j;
}

JacobianReport jacobian(const LineSystem& ls, std::span<const std::int64_t> z) {
  JacobianReport rep;
  rep.matrix = jacobian_matrix(ls, z);
  rep.rank = exact_rank(rep.matrix);
  rep.nonsingular = rep.rank == ls.k();
  std::set<BigRational> distinct;
  for (int i = 0; i < ls.s(); ++i) {
    // Boost refuses a negative denominator; move the sign to the numerator.
    const std::int64_t yi = ls.y()[static_cast<std::size_t>(i)], zi = z[static_cast<std::size_t>(i)];
    BigRational r(BigInt(yi < 0 ? -zi : zi), BigInt(yi < 0 ? -yi : yi));
    rep.ratio_profile.push_back(r);
    distinct.insert(r);
  }
  rep.distinct_ratios = static_cast<int>(distinct.size());
  return rep;
}

bool is_nonsingular(const LineSystem& ls, std::span<const std::int64_t> z) {
  return exact_rank(jacobian_matrix(ls, z)) == ls.k();
}

BigInt jacobian_minor(const Matrix& j, std::span<const int> cols) {
  if (cols.size() != j.size()) throw InvalidInput("minor needs exactly k columns");
  Matrix sub(j.size(), std::vector<BigInt>(cols.size()));
  for (std::size_t r = 0; r < j.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c] < 0 || static_cast<std::size_t>(cols[c]) >= j[r].size()) throw InvalidInput("column out of range");
      sub[r][c] = j[r][static_cast<std::size_t>(cols[c])];
    }
  return exact_determinant(std::move(sub));
}

bool all_minors_vanish(const Matrix& j) {
  const int k = static_cast<int>(j.size());
  const int s = k == 0 ? 0 : static_cast<int>(j[0].size());
  if (s < k) return true;
  std::vector<int> cols(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) cols[static_cast<std::size_t>(c)] = c;
  while (true) {
    if (jacobian_minor(j, cols) != 0) return false;
    int c = k - 1;
    while (c >= 0 && cols[static_cast<std::size_t>(c)] == s - k + c) --c;
    if (c < 0) return true;
    ++cols[static_cast<std::size_t>(c)];
    for (int d = c + 1; d < k; ++d) cols[static_cast<std::size_t>(d)] = cols[static_cast<std::size_t>(d - 1)] + 1;
  }
}

namespace {

SolutionReport classify_with_scan(const LineSystem& ls, std::span<const std::int64_t> z, bool scan_done,
                                  const std::vector<IndexMask>& subsums) {
  SolutionReport rep;
  rep.c0_nonzero = ls.c0() != 0;
  rep.subsum_scan_done = scan_done;
  rep.vanishing_subsums = subsums;
  rep.vanishing_subsums_found = !subsums.empty();
  rep.z_zero = std::all_of(z.begin(), z.end(), [](std::int64_t v) { return v == 0; });
  rep.all_z_nonzero = std::all_of(z.begin(), z.end(), [](std::int64_t v) { return v != 0; });
  rep.solves = ls.solves(z);
  const auto jac = jacobian(ls, z);
  rep.rank = jac.rank;
  rep.nonsingular = jac.nonsingular;
  if (rep.z_zero) {
    rep.note = "z = 0: guarantee clauses not applicable";
    return rep;
  }
  if (!rep.c0_nonzero) {
    rep.note = "sum c_i y_i^k = 0: guarantee clauses need n != 0";
    return rep;
  }
  rep.clause_a = scan_done && !rep.vanishing_subsums_found;
  rep.clause_b = rep.all_z_nonzero;
  rep.guaranteed_nonsingular = rep.clause_a || rep.clause_b;
  if (!scan_done) rep.note = "subset scan skipped (s too large); clause (a) not evaluated";
  if (rep.guaranteed_nonsingular && rep.solves && !rep.nonsingular)
    throw ConsistencyError("guaranteed non-singular solution has Jacobian rank " + std::to_string(rep.rank) +
                           " < k = " + std::to_string(ls.k()));
  return rep;
}

}  // namespace

SolutionReport classify_solution(const LineSystem& ls, std::span<const std::int64_t> z, int max_s) {
  return classify_solutions(ls, {std::vector<std::int64_t>(z.begin(), z.end())}, max_s).front();
}

std::vector<SolutionReport> classify_solutions(const LineSystem& ls,
                                               const std::vector<std::vector<std::int64_t>>& zs, int max_s) {
  bool scan_done = ls.s() <= max_s;
  std::vector<IndexMask> subsums;
  if (scan_done) subsums = vanishing_subsum_scan(ls, max_s);
  std::vector<SolutionReport> out;
  out.reserve(zs.size());
  for (const auto& z : zs) out.push_back(classify_with_scan(ls, z, scan_done, subsums));
  return out;
}

}  // namespace diagline
