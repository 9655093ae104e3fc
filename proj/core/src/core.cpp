#include "diagline/core.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>
#include <unordered_map>

#include "diagline/errors.hpp"
#include "diagline/util.hpp"

namespace diagline {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DIAGLINE_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

DiagonalForm::DiagonalForm(int k, std::vector<std::int64_t> c, BigInt n)
    : k_(k), c_(std::move(c)), n_(std::move(n)) {
  if (k_ < 1) throw InvalidInput("degree k must be >= 1");
  if (c_.empty()) throw InvalidInput("need at least one variable");
  if (c_.size() > 64) throw InvalidInput("at most 64 variables are supported");
  for (auto ci : c_)
    if (ci == 0) throw InvalidInput("coefficients must be nonzero");
  if (n_ == 0) throw InvalidInput("right-hand side n must be nonzero");
}

bool DiagonalForm::mixed_sign() const noexcept {
  bool pos = false, neg = false;
  for (auto ci : c_) (ci > 0 ? pos : neg) = true;
  return pos && neg;
}

BigInt diagonal_value(int k, std::span<const std::int64_t> c, std::span<const std::int64_t> y) {
  i128 acc = 0;
  bool ok = true;
  for (std::size_t i = 0; i < c.size() && ok; ++i) {
    auto p = checked_pow(y[i], static_cast<unsigned>(k));
    if (!p) { ok = false; break; }
    auto t = checked_mul(*p, c[i]);
    if (!t) { ok = false; break; }
    auto a = checked_add(acc, *t);
    if (!a) { ok = false; break; }
    acc = *a;
  }
  if (ok) return to_big(acc);
  BigInt big = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    big += BigInt(c[i]) * big_pow(BigInt(y[i]), static_cast<unsigned>(k));
  return big;
}

bool verify_base_point(const DiagonalForm& form, std::span<const std::int64_t> y) {
  if (static_cast<int>(y.size()) != form.s())
    throw InvalidInput("base point length " + std::to_string(y.size()) + " != s = " +
                       std::to_string(form.s()));
  for (auto yi : y)
    if (yi == 0) return false;
  return diagonal_value(form.k(), form.c(), y) == form.n();
}

LineSystem::LineSystem(int k, std::vector<std::int64_t> c, std::vector<std::int64_t> y,
                       std::optional<DiagonalForm> form)
    : k_(k), c_(std::move(c)), y_(std::move(y)), form_(std::move(form)) {
  if (k_ < 1) throw InvalidInput("degree k must be >= 1");
  if (c_.empty() || c_.size() != y_.size())
    throw InvalidInput("c and y must be nonempty and of equal length");
  if (c_.size() > 64) throw InvalidInput("at most 64 variables are supported");
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] == 0 || y_[i] == 0) throw InvalidInput("c_i and y_i must be nonzero");

  a_.assign(static_cast<std::size_t>(k_), std::vector<BigInt>(c_.size()));
  fits_i64_ = true;
  for (int j = 1; j <= k_; ++j)
    for (std::size_t i = 0; i < c_.size(); ++i) {
      BigInt v = BigInt(c_[i]) * big_pow(BigInt(y_[i]), static_cast<unsigned>(k_ - j));
      fits_i64_ = fits_i64_ && diagline::fits_i64(v);
      a_[static_cast<std::size_t>(j - 1)][i] = std::move(v);
    }
  if (fits_i64_) {
    a_i64_.assign(a_.size(), std::vector<std::int64_t>(c_.size()));
    for (std::size_t j = 0; j < a_.size(); ++j)
      for (std::size_t i = 0; i < c_.size(); ++i) a_i64_[j][i] = a_[j][i].convert_to<std::int64_t>();
  }
  c0_ = -diagonal_value(k_, c_, y_);
}

LineSystem LineSystem::build(const DiagonalForm& form, const BasePoint& y) {
  if (!verify_base_point(form, y.y))
    throw InvalidInput("base point does not satisfy the diagonal equation");
  return LineSystem(form.k(), form.c(), y.y, form);
}

LineSystem LineSystem::relaxed(int k, std::vector<std::int64_t> c, std::vector<std::int64_t> y) {
  return LineSystem(k, std::move(c), std::move(y), std::nullopt);
}

std::vector<BigInt> LineSystem::evaluate(std::span<const std::int64_t> z) const {
  if (static_cast<int>(z.size()) != s()) throw InvalidInput("z has wrong length");
  std::vector<BigInt> out(static_cast<std::size_t>(k_));
  for (int j = 1; j <= k_; ++j) {
    BigInt acc = 0;
    for (int i = 0; i < s(); ++i) acc += coeff(j, i) * big_pow(BigInt(z[static_cast<std::size_t>(i)]), static_cast<unsigned>(j));
    out[static_cast<std::size_t>(j - 1)] = std::move(acc);
  }
  return out;
}

bool LineSystem::solves(std::span<const std::int64_t> z) const {
  for (const auto& v : evaluate(z))
    if (v != 0) return false;
  return true;
}

std::string LineSystem::digest() const {
  std::ostringstream os;
  os << "k=" << k_ << ";c=";
  for (auto v : c_) os << v << ',';
  os << ";y=";
  for (auto v : y_) os << v << ',';
  return hex64(fnv1a64(os.str()));
}

LineSystem build_line_system(const DiagonalForm& form, const BasePoint& y) {
  return LineSystem::build(form, y);
}

std::vector<BigInt> line_polynomial(const DiagonalForm& form, const BasePoint& y,
                                    std::span<const std::int64_t> z) {
  const int s = form.s(), k = form.k();
  if (static_cast<int>(y.y.size()) != s || static_cast<int>(z.size()) != s)
    throw InvalidInput("y and z must have length s");
  std::vector<BigInt> total(static_cast<std::size_t>(k + 1), BigInt(0));
  for (int i = 0; i < s; ++i) {
    // (y_i + t z_i)^k by repeated multiplication, no binomial table.
    std::vector<BigInt> poly{BigInt(1)};
    for (int e = 0; e < k; ++e) {
      std::vector<BigInt> next(poly.size() + 1, BigInt(0));
      for (std::size_t d = 0; d < poly.size(); ++d) {
        next[d] += poly[d] * y.y[static_cast<std::size_t>(i)];
        next[d + 1] += poly[d] * z[static_cast<std::size_t>(i)];
      }
      poly = std::move(next);
    }
    for (std::size_t d = 0; d < poly.size(); ++d) total[d] += poly[d] * form.c()[static_cast<std::size_t>(i)];
  }
  total[0] -= form.n();
  return total;
}

bool line_identity_check(const DiagonalForm& form, const BasePoint& y,
                         std::span<const std::int64_t> z) {
  for (const auto& coef : line_polynomial(form, y, z))
    if (coef != 0) return false;
  return true;
}

namespace {

struct I128Hash {
  std::size_t operator()(i128 v) const noexcept {
    auto u = static_cast<u128>(v);
    return splitmix64(static_cast<std::uint64_t>(u) ^ splitmix64(static_cast<std::uint64_t>(u >> 64)));
  }
};

template <class Sum, class Table>
std::vector<IndexMask> join_subsets(const std::vector<Sum>& w, int half) {
  const int s = static_cast<int>(w.size());
  const int right = s - half;
  Table table;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << right); ++m) {
    Sum sum = 0;
    for (int b = 0; b < right; ++b)
      if (m >> b & 1) sum += w[static_cast<std::size_t>(half + b)];
    table[-sum].push_back(m << half);
  }
  std::vector<IndexMask> out;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << half); ++m) {
    Sum sum = 0;
    for (int b = 0; b < half; ++b)
      if (m >> b & 1) sum += w[static_cast<std::size_t>(b)];
    auto it = table.find(sum);
    if (it == table.end()) continue;
    for (auto rm : it->second)
      if ((m | rm) != 0) out.push_back(m | rm);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<IndexMask> zero_sum_subsets(std::span<const BigInt> weights, int max_s) {
  const int s = static_cast<int>(weights.size());
  if (s > max_s || s > 62)
    throw InvalidInput("subset scan over s = " + std::to_string(s) + " indices needs about 2^" +
                       std::to_string((s + 1) / 2) + " partial sums per half; limit is s <= " +
                       std::to_string(std::min(max_s, 62)));
  const int half = s / 2;
  BigInt total = 0;
  for (const auto& w : weights) total += abs(w);
  if (total < (BigInt(1) << 125)) {
    std::vector<i128> w;
    w.reserve(weights.size());
    for (const auto& v : weights) w.push_back(v.convert_to<i128>());
    return join_subsets<i128, std::unordered_map<i128, std::vector<IndexMask>, I128Hash>>(w, half);
  }
  std::vector<BigInt> w(weights.begin(), weights.end());
  return join_subsets<BigInt, std::map<BigInt, std::vector<IndexMask>>>(w, half);
}

std::vector<IndexMask> vanishing_subsum_scan(const DiagonalForm& form, const BasePoint& y, int max_s) {
  if (static_cast<int>(y.y.size()) != form.s()) throw InvalidInput("base point length != s");
  if (form.s() > max_s)
    throw InvalidInput("vanishing-subsum scan refused: s = " + std::to_string(form.s()) +
                       " exceeds max_s = " + std::to_string(max_s) + " (cost ~2^(s/2) per half)");
  std::vector<BigInt> w;
  for (int i = 0; i < form.s(); ++i) {
    std::int64_t ci = form.c()[static_cast<std::size_t>(i)];
    std::int64_t yi = y.y[static_cast<std::size_t>(i)];
    w.push_back(diagonal_value(form.k(), std::span<const std::int64_t>(&ci, 1),
                               std::span<const std::int64_t>(&yi, 1)));
  }
  return zero_sum_subsets(w, max_s);
}

std::vector<IndexMask> vanishing_subsum_scan(const LineSystem& ls, int max_s) {
  if (ls.s() > max_s)
    throw InvalidInput("vanishing-subsum scan refused: s = " + std::to_string(ls.s()) +
                       " exceeds max_s = " + std::to_string(max_s));
  std::vector<BigInt> w;
  for (int i = 0; i < ls.s(); ++i) w.push_back(ls.coeff(1, i) * ls.y()[static_cast<std::size_t>(i)]);
  return zero_sum_subsets(w, max_s);
}

std::vector<int> mask_indices(IndexMask m) {
  std::vector<int> out;
  for (int b = 0; b < 64; ++b)
    if (m >> b & 1) out.push_back(b);
  return out;
}

const std::vector<std::pair<int, int>>& reference_table() {
  static const std::vector<std::pair<int, int>> table = {
      {2, 4},   {3, 7},   {4, 12},  {5, 17},  {6, 24},  {7, 31},  {8, 39},
      {9, 47},  {10, 55}, {11, 63}, {12, 72}, {13, 81}, {14, 89}, {15, 97}};
  return table;
}

std::optional<int> reference_t0(int k) {
  for (const auto& [kk, t] : reference_table())
    if (kk == k) return t;
  return std::nullopt;
}

}  // namespace diagline
