#pragma once

// Diagonal forms c_1 x_1^k + ... + c_s x_s^k = n, base points on them, and the
// linear-in-powers system whose solutions z give integral lines y + t z.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diagline/bigint.hpp"

namespace diagline {

class DiagonalForm {
 public:
  // Throws InvalidInput unless k >= 1, c nonempty with nonzero entries, n != 0.
  DiagonalForm(int k, std::vector<std::int64_t> c, BigInt n);

  int k() const noexcept { return k_; }
  int s() const noexcept { return static_cast<int>(c_.size()); }
  const std::vector<std::int64_t>& c() const noexcept { return c_; }
  const BigInt& n() const noexcept { return n_; }

  // Not all coefficients share one sign. Recorded only.
  bool mixed_sign() const noexcept;

 private:
  int k_;
  std::vector<std::int64_t> c_;
  BigInt n_;
};

struct BasePoint {
  std::vector<std::int64_t> y;
};

// Exact sum c_1 y_1^k + ... + c_s y_s^k (128-bit path, big fallback).
BigInt diagonal_value(int k, std::span<const std::int64_t> c, std::span<const std::int64_t> y);

// True iff all y_i != 0 and the form vanishes at y with right-hand side n.
// Throws InvalidInput on a length mismatch.
bool verify_base_point(const DiagonalForm& form, std::span<const std::int64_t> y);

class LineSystem {
 public:
  // Strict constructor: refuses a base point that does not verify.
  static LineSystem build(const DiagonalForm& form, const BasePoint& y);
  // Relaxed constructor: any nonzero c and y, no right-hand side check.
  static LineSystem relaxed(int k, std::vector<std::int64_t> c, std::vector<std::int64_t> y);

  int k() const noexcept { return k_; }
  int s() const noexcept { return static_cast<int>(c_.size()); }
  const std::vector<std::int64_t>& c() const noexcept { return c_; }
  const std::vector<std::int64_t>& y() const noexcept { return y_; }

  // Row j (1 <= j <= k), column i (0-based): c_i y_i^{k-j}.
  const BigInt& coeff(int j, int i) const { return a_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)]; }
  const std::vector<std::vector<BigInt>>& rows() const noexcept { return a_; }

  // All coefficients fit in int64; enumeration fast paths need this.
  bool fits_i64() const noexcept { return fits_i64_; }
  std::int64_t coeff_i64(int j, int i) const {
    return a_i64_[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)];
  }

  // c0 = -(c_1 y_1^k + ... + c_s y_s^k); equals -n for a strict system.
  const BigInt& c0() const noexcept { return c0_; }
  bool strict() const noexcept { return form_.has_value(); }
  const std::optional<DiagonalForm>& form() const noexcept { return form_; }

  // Row values sum_i A[j][i] z_i^j for j = 1..k.
  std::vector<BigInt> evaluate(std::span<const std::int64_t> z) const;
  bool solves(std::span<const std::int64_t> z) const;

  // Stable digest of (k, c, y).
  std::string digest() const;

 private:
  LineSystem(int k, std::vector<std::int64_t> c, std::vector<std::int64_t> y,
             std::optional<DiagonalForm> form);

  int k_;
  std::vector<std::int64_t> c_;
  std::vector<std::int64_t> y_;
  std::vector<std::vector<BigInt>> a_;
  std::vector<std::vector<std::int64_t>> a_i64_;
  bool fits_i64_ = false;
  BigInt c0_;
  std::optional<DiagonalForm> form_;
};

LineSystem build_line_system(const DiagonalForm& form, const BasePoint& y);

// Expands sum_i c_i (y_i + t z_i)^k - n as a polynomial in t and reports
// whether every coefficient vanishes.
bool line_identity_check(const DiagonalForm& form, const BasePoint& y,
                         std::span<const std::int64_t> z);

// Coefficients (ascending powers of t) of sum_i c_i (y_i + t z_i)^k - n.
std::vector<BigInt> line_polynomial(const DiagonalForm& form, const BasePoint& y,
                                    std::span<const std::int64_t> z);

// A subset of {0..s-1}, as a bit mask (bit i = index i).
using IndexMask = std::uint64_t;

inline constexpr int kDefaultMaxSubsetScan = 28;

// Every nonempty subset S with sum_{i in S} w_i = 0, sorted ascending by
// mask. Meet in the middle over the two index halves.
std::vector<IndexMask> zero_sum_subsets(std::span<const BigInt> weights,
                                        int max_s = kDefaultMaxSubsetScan);

// zero_sum_subsets over the weights c_i y_i^k.
std::vector<IndexMask> vanishing_subsum_scan(const DiagonalForm& form, const BasePoint& y,
                                             int max_s = kDefaultMaxSubsetScan);
std::vector<IndexMask> vanishing_subsum_scan(const LineSystem& ls,
                                             int max_s = kDefaultMaxSubsetScan);

std::vector<int> mask_indices(IndexMask m);

// Published upper bounds t0(k) for s0(k), 2 <= k <= 15.
std::optional<int> reference_t0(int k);
const std::vector<std::pair<int, int>>& reference_table();

}  // namespace diagline
