#pragma once

// Exact integer helpers: a checked 128-bit fast path with an arbitrary
// precision fallback (boost::multiprecision::cpp_int).

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace diagline {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;
using i128 = __int128;
using u128 = unsigned __int128;

inline std::optional<i128> checked_add(i128 a, i128 b) {
  i128 r;
  if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
  return r;
}

inline std::optional<i128> checked_mul(i128 a, i128 b) {
  i128 r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

// base^e in 128 bits, nullopt on overflow.
inline std::optional<i128> checked_pow(i128 base, unsigned e) {
  i128 r = 1;
  for (unsigned i = 0; i < e; ++i) {
    auto next = checked_mul(r, base);
    if (!next) return std::nullopt;
    r = *next;
  }
  return r;
}

inline BigInt big_pow(const BigInt& base, unsigned e) {
  return boost::multiprecision::pow(base, e);
}

inline BigInt to_big(i128 v) { return BigInt(v); }

// Fits in a signed 64-bit integer.
inline bool fits_i64(const BigInt& v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

inline std::string to_string(const BigInt& v) { return v.str(); }

// Non-negative residue of v mod m (m > 0).
inline std::int64_t mod_floor(const BigInt& v, std::int64_t m) {
  BigInt r = v % m;
  if (r < 0) r += m;
  return r.convert_to<std::int64_t>();
}

inline std::int64_t mod_floor(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

// p-adic valuation of a nonzero integer.
inline unsigned valuation(BigInt v, std::int64_t p) {
  unsigned n = 0;
  if (v < 0) v = -v;
  while (v != 0 && v % p == 0) {
    v /= p;
    ++n;
  }
  return n;
}

}  // namespace diagline
