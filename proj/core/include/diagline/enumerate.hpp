#pragma once

// Exact counting of integer points on the line system, the translation
// system and the Vinogradov system.
//
// All three reduce to one problem: count v in [lo, hi]^s with
//   sum_i A[j][i] v_i^j = 0   for j = 1..k.
// The naive engine walks the whole box. The meet-in-the-middle engine splits
// the coordinates into two halves, enumerates the k-vector of partial sums on
// each side and joins L against the negated keys of R.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diagline/bigint.hpp"
#include "diagline/core.hpp"

namespace diagline {

enum class CountMethod { naive, mitm };
std::string to_string(CountMethod m);

enum class JoinMode {
  automatic,  // hash join if it fits the memory budget, else streaming sort
  hash,       // in-memory open-addressing table on one half
  sorted      // sorted runs (spilled to disk past the budget) and a merge join
};

enum class KeyMode {
  automatic,  // packed 64-bit keys when the value bound permits
  packed,
  big         // arbitrary-precision key vectors
};

struct CountOptions {
  double eval_budget = 1e9;                      // naive: max box points
  std::uint64_t memory_budget = 2ULL << 30;      // bytes for the join structures
  unsigned threads = 0;                          // 0: DIAGLINE_THREADS or hardware
  JoinMode join = JoinMode::automatic;
  KeyMode keys = KeyMode::automatic;
  std::optional<std::vector<int>> left;          // explicit left half (0-based)
  std::filesystem::path spill_dir;               // default: temp directory
};

struct CountResult {
  BigInt count = 0;
  std::int64_t box = 0;
  CountMethod method = CountMethod::naive;
  double wall_time = 0.0;
  std::string instance_digest;
  std::string join;  // "hash", "sorted", "sorted-spilled", "big" or "" for naive
};

// The generic counting problem. Rows are A[j-1][i].
struct PowerSystem {
  int k = 0;
  std::vector<std::vector<BigInt>> rows;
  std::int64_t lo = 0, hi = 0;

  int s() const noexcept { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
};

PowerSystem line_power_system(const LineSystem& ls, std::int64_t box);

CountResult count_power_system_naive(const PowerSystem& sys, const CountOptions& opt = {});
CountResult count_power_system_mitm(const PowerSystem& sys, const CountOptions& opt = {});

// N(B; y): z in [-B, B]^s solving the line system.
CountResult count_lines_naive(const LineSystem& ls, std::int64_t box, const CountOptions& opt = {});
CountResult count_lines_mitm(const LineSystem& ls, std::int64_t box, const CountOptions& opt = {});
// naive when the box is small, mitm otherwise.
CountResult count_lines(const LineSystem& ls, std::int64_t box, const CountOptions& opt = {});

// All solutions z in [-B, B]^s (lexicographic by z), at most `limit`.
std::vector<std::vector<std::int64_t>> enumerate_line_solutions(const LineSystem& ls, std::int64_t box,
                                                                std::size_t limit = 10'000'000,
                                                                const CountOptions& opt = {});

// Upsilon: x in [-X, X]^s with sum_i c_i x_i^j = 0 (1 <= j <= k).
CountResult count_translation_system(std::span<const std::int64_t> c, int k, std::int64_t X,
                                     const CountOptions& opt = {});

struct AveragingReport {
  BigInt lhs;           // Upsilon_s(X)
  BigInt shifted_count; // solutions of the (s+1)-variable system in [-2X, 2X]^{s+1}
  std::int64_t X = 0;
  double rhs = 0.0;     // shifted_count / X
  bool holds = false;   // exact: X * lhs <= shifted_count
};

// Compares Upsilon_s(X) against X^{-1} times the count for the system with
// the extra coefficient c0 = -(c_1 + ... + c_s). Refuses sum c_i = 0.
AveragingReport verify_averaging_inequality(std::span<const std::int64_t> c, int k, std::int64_t X,
                                            const CountOptions& opt = {});

// (x, y) in [lo, hi]^{2t} with sum_l (x_l^j - y_l^j) = 0 for 1 <= j <= k.
CountResult count_vinogradov(int t, int k, std::int64_t lo, std::int64_t hi, const CountOptions& opt = {});

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;  // natural log scale
  double residual = 0.0;   // RMS of log residuals
};

// Least squares of log(count) on log(box). Needs >= 3 points, all counts > 0.
GrowthFit fit_growth_exponent(std::span<const std::pair<double, double>> points);

}  // namespace diagline
