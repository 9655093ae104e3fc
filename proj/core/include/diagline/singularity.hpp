#pragma once

// Exact Jacobian of the line system at z, its rank, the ratio profile z_i/y_i
// and the two generic conditions that force a nonzero solution to be
// non-singular.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diagline/bigint.hpp"
#include "diagline/core.hpp"

namespace diagline {

using Matrix = std::vector<std::vector<BigInt>>;

// Rank over Q by fraction-free elimination.
int exact_rank(Matrix m);
// Determinant of a square matrix, fraction-free.
BigInt exact_determinant(Matrix m);

// Minimum p-adic valuation over the k x k minors of a k x s matrix, or
// nullopt when all of them vanish (rank < k).
std::optional<unsigned> min_minor_valuation(const Matrix& m, std::int64_t p);

struct JacobianReport {
  Matrix matrix;  // J[j-1][i] = j c_i y_i^{k-j} z_i^{j-1}
  int rank = 0;
  bool nonsingular = false;
  std::vector<BigRational> ratio_profile;  // z_i / y_i in index order
  int distinct_ratios = 0;
};

Matrix jacobian_matrix(const LineSystem& ls, std::span<const std::int64_t> z);
JacobianReport jacobian(const LineSystem& ls, std::span<const std::int64_t> z);
bool is_nonsingular(const LineSystem& ls, std::span<const std::int64_t> z);

// k x k minor on the given columns.
BigInt jacobian_minor(const Matrix& j, std::span<const int> cols);
// True iff every k x k minor is zero (direct enumeration of column sets).
bool all_minors_vanish(const Matrix& j);

struct SolutionReport {
  bool z_zero = false;
  bool solves = false;
  bool c0_nonzero = false;               // sum c_i y_i^k != 0, i.e. n != 0
  bool subsum_scan_done = false;
  std::vector<IndexMask> vanishing_subsums;
  bool vanishing_subsums_found = false;
  bool all_z_nonzero = false;
  bool clause_a = false;                 // no vanishing subsum and z != 0
  bool clause_b = false;                 // every z_i != 0
  bool guaranteed_nonsingular = false;
  int rank = 0;
  bool nonsingular = false;
  std::string note;
};

// The guarantee needs z != 0 and n != 0; without n != 0, c = (1, 1, -2),
// y = (1, 1, 1), z = (1, 1, 1) has all z_i != 0 and rank 1.
// Throws ConsistencyError if a guaranteed solution has rank < k.
SolutionReport classify_solution(const LineSystem& ls, std::span<const std::int64_t> z, int max_s = 28);

// Same, sharing one subset scan across many z.
std::vector<SolutionReport> classify_solutions(const LineSystem& ls,
                                               const std::vector<std::vector<std::int64_t>>& zs,
                                               int max_s = 28);

}  // namespace diagline
