#pragma once

// Reference implementations used only by the tests. Each one follows the
// plain definition with no shared code from the library beyond BigInt types.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using i64 = std::int64_t;
using i128 = __int128;
using Rational = boost::multiprecision::cpp_rational;

inline i128 ipow(i128 b, int e) {
  i128 r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Row j (1..k), column i: c_i y_i^{k-j}.
inline std::vector<std::vector<i64>> rows(int k, const std::vector<i64>& c, const std::vector<i64>& y) {
  std::vector<std::vector<i64>> a(static_cast<std::size_t>(k), std::vector<i64>(c.size()));
  for (int j = 1; j <= k; ++j)
    for (std::size_t i = 0; i < c.size(); ++i) a[j - 1][i] = static_cast<i64>(c[i] * ipow(y[i], k - j));
  return a;
}

inline bool solves(int k, const std::vector<i64>& c, const std::vector<i64>& y, const std::vector<i64>& z) {
  const auto a = rows(k, c, y);
  for (int j = 1; j <= k; ++j) {
    i128 sum = 0;
    for (std::size_t i = 0; i < z.size(); ++i) sum += a[j - 1][i] * ipow(z[i], j);
    if (sum != 0) return false;
  }
  return true;
}

// Calls f on every point of [lo, hi]^s.
inline void for_box(int s, i64 lo, i64 hi, const std::function<void(const std::vector<i64>&)>& f) {
  std::vector<i64> z(static_cast<std::size_t>(s), lo);
  while (true) {
    f(z);
    int i = 0;
    while (i < s && z[i] == hi) z[i++] = lo;
    if (i == s) return;
    ++z[i];
  }
}

// Points of [-B, B]^s on the line system.
inline std::uint64_t count_lines(int k, const std::vector<i64>& c, const std::vector<i64>& y, i64 B) {
  std::uint64_t n = 0;
  for_box(static_cast<int>(c.size()), -B, B, [&](const std::vector<i64>& z) { n += solves(k, c, y, z); });
  return n;
}

// x in [lo, hi]^s with sum_i c_i x_i^j = 0 for j = 1..k.
inline std::uint64_t count_power_sums(int k, const std::vector<i64>& c, i64 lo, i64 hi) {
  std::uint64_t n = 0;
  for_box(static_cast<int>(c.size()), lo, hi, [&](const std::vector<i64>& x) {
    for (int j = 1; j <= k; ++j) {
      i128 sum = 0;
      for (std::size_t i = 0; i < x.size(); ++i) sum += c[i] * ipow(x[i], j);
      if (sum != 0) return;
    }
    ++n;
  });
  return n;
}

// z mod p^h solving the line system mod p^h, by walking all residues.
inline std::uint64_t count_mod(int k, const std::vector<i64>& c, const std::vector<i64>& y, i64 m) {
  const auto a = rows(k, c, y);
  std::uint64_t n = 0;
  for_box(static_cast<int>(c.size()), 0, m - 1, [&](const std::vector<i64>& z) {
    for (int j = 1; j <= k; ++j) {
      i128 sum = 0;
      for (std::size_t i = 0; i < z.size(); ++i) sum += a[j - 1][i] * ipow(z[i], j);
      if (sum % m != 0) return;
    }
    ++n;
  });
  return n;
}

inline std::complex<double> e(long double x) {
  const long double f = x - std::floor(x);
  return {static_cast<double>(std::cos(2 * M_PIl * f)), static_cast<double>(std::sin(2 * M_PIl * f))};
}

// sum_{|x| <= X} e(alpha_1 x + ... + alpha_k x^k).
inline std::complex<double> weyl(const std::vector<double>& alpha, i64 X) {
  std::complex<double> s = 0;
  for (i64 x = -X; x <= X; ++x) {
    long double ph = 0;
    for (std::size_t j = 0; j < alpha.size(); ++j) ph += alpha[j] * std::pow(static_cast<long double>(x), j + 1);
    s += e(ph);
  }
  return s;
}

// sum_{x = 1..q} e((a_1 x + ... + a_k x^k) / q).
inline std::complex<double> complete(i64 q, const std::vector<i64>& a) {
  std::complex<double> s = 0;
  for (i64 x = 1; x <= q; ++x) {
    i128 num = 0;
    for (std::size_t j = 0; j < a.size(); ++j) num += a[j] * ipow(x, static_cast<int>(j + 1));
    num %= q;
    s += e(static_cast<long double>(num) / q);
  }
  return s;
}

// A(q) = q^{-s} sum over a mod q, gcd(q, a) = 1, of sum over z mod q of
// e(sum_j a_j sum_i A[j][i] z_i^j / q). Factorised over i.
inline std::complex<double> A(int k, const std::vector<i64>& c, const std::vector<i64>& y, i64 q) {
  const auto rws = rows(k, c, y);
  std::complex<double> total = 0;
  for_box(k, 0, q - 1, [&](const std::vector<i64>& a) {
    i64 g = q;
    for (auto v : a) g = std::gcd(g, v);
    if (g != 1) return;
    std::complex<double> prod = 1;
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::complex<double> s = 0;
      for (i64 z = 0; z < q; ++z) {
        i128 num = 0;
        for (int j = 1; j <= k; ++j) num += static_cast<i128>(a[j - 1]) * rws[j - 1][i] % q * ipow(z, j) % q;
        num %= q;
        if (num < 0) num += q;
        s += e(static_cast<long double>(num) / q);
      }
      prod *= s / static_cast<double>(q);
    }
    total += prod;
  });
  return total;
}

// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
auto simpson(F f, double a, double b, long n) {
  const double h = (b - a) / n;
  auto s = f(a) + f(b);
  for (long i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * (h / 3);
}

// int_{-X}^{X} e(theta_1 g + ... + theta_k g^k) dg.
inline std::complex<double> oscillatory(const std::vector<double>& theta, double X, long n = 1'000'000) {
  return simpson(
      [&](double g) {
        long double ph = 0;
        for (std::size_t j = 0; j < theta.size(); ++j) ph += theta[j] * std::pow(static_cast<long double>(g), j + 1);
        return e(ph);
      },
      -X, X, n);
}

// Rank over Q by plain Gaussian elimination on rationals.
inline int rank(std::vector<std::vector<Rational>> m) {
  const std::size_t rows_n = m.size(), cols = rows_n ? m[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t col = 0; col < cols && r < rows_n; ++col) {
    std::size_t piv = r;
    while (piv < rows_n && m[piv][col] == 0) ++piv;
    if (piv == rows_n) continue;
    std::swap(m[r], m[piv]);
    for (std::size_t i = 0; i < rows_n; ++i) {
      if (i == r || m[i][col] == 0) continue;
      const Rational f = m[i][col] / m[r][col];
      for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return static_cast<int>(r);
}

// Jacobian of z -> (sum_i A[j][i] z_i^j)_j: entry (j, i) = j A[j][i] z_i^{j-1}.
inline int jacobian_rank(int k, const std::vector<i64>& c, const std::vector<i64>& y, const std::vector<i64>& z) {
  const auto a = rows(k, c, y);
  std::vector<std::vector<Rational>> m(static_cast<std::size_t>(k), std::vector<Rational>(c.size()));
  for (int j = 1; j <= k; ++j)
    for (std::size_t i = 0; i < c.size(); ++i)
      m[j - 1][i] = Rational(boost::multiprecision::cpp_int(j * a[j - 1][i]) *
                             boost::multiprecision::cpp_int(static_cast<long long>(ipow(z[i], j - 1))));
  return rank(m);
}

}  // namespace oracle
