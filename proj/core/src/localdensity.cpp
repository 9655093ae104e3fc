#include "diagline/localdensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>

#include "diagline/errors.hpp"
#include "diagline/singularity.hpp"
#include "diagline/util.hpp"

namespace diagline {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::string to_string(DensityRoute r) {
  switch (r) {
    case DensityRoute::residue_count: return "residue_count";
    case DensityRoute::series: return "series";
    case DensityRoute::slab: return "slab";
    case DensityRoute::singular_integral: return "singular_integral";
  }
  return "?";
}

namespace {

std::int64_t checked_modulus(std::int64_t p, int h) {
  if (!is_prime(p)) throw InvalidInput(std::to_string(p) + " is not prime");
  if (h < 0) throw InvalidInput("h must be >= 0");
  i128 m = 1;
  for (int e = 0; e < h; ++e) {
    m *= p;
    if (m > (i128{1} << 40)) throw InvalidInput("p^h exceeds 2^40");
  }
  return static_cast<std::int64_t>(m);
}

std::int64_t mulmod(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<i128>(a) * b % m);
}

std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m) {
  std::int64_t r = 1 % m;
  b = mod_floor(b, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

// Coefficient table A[j][i] mod m.
std::vector<std::vector<std::int64_t>> coeffs_mod(const LineSystem& ls, std::int64_t m) {
  std::vector<std::vector<std::int64_t>> a(static_cast<std::size_t>(ls.k()), std::vector<std::int64_t>(static_cast<std::size_t>(ls.s())));
  for (int j = 1; j <= ls.k(); ++j)
    for (int i = 0; i < ls.s(); ++i) a[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)] = mod_floor(ls.coeff(j, i), m);
  return a;
}

// F_j(z) mod m for all j.
std::vector<std::int64_t> residues(const std::vector<std::vector<std::int64_t>>& a, std::span<const std::int64_t> z,
                                   std::int64_t m) {
  const std::size_t k = a.size();
  std::vector<std::int64_t> f(k, 0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::int64_t pw = 1;
    for (std::size_t j = 0; j < k; ++j) {
      pw = mulmod(pw, mod_floor(z[i], m), m);
      f[j] = (f[j] + mulmod(a[j][i], pw, m)) % m;
    }
  }
  return f;
}

// Jacobian mod p: row j, column i = j A[j][i] z_i^{j-1}.
std::vector<std::vector<std::int64_t>> jacobian_mod(const std::vector<std::vector<std::int64_t>>& a,
                                                    std::span<const std::int64_t> z, std::int64_t p) {
  const std::size_t k = a.size();
  std::vector<std::vector<std::int64_t>> jm(k, std::vector<std::int64_t>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) {
    std::int64_t pw = 1;
    for (std::size_t j = 0; j < k; ++j) {
      jm[j][i] = mulmod(mulmod(static_cast<std::int64_t>(j + 1) % p, a[j][i] % p, p), pw, p);
      pw = mulmod(pw, mod_floor(z[i], p), p);
    }
  }
  return jm;
}

// Solution set of M t = rhs over F_p.
struct AffineSpace {
  bool consistent = false;
  int rank = 0;
  std::vector<std::int64_t> particular;
  std::vector<std::vector<std::int64_t>> basis;
};

AffineSpace solve_mod_p(std::vector<std::vector<std::int64_t>> m, std::vector<std::int64_t> rhs, std::int64_t p) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && m[piv][c] % p == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    std::swap(rhs[piv], rhs[r]);
    const std::int64_t inv = powmod(m[r][c], p - 2, p);
    for (auto& v : m[r]) v = mulmod(v, inv, p);
    rhs[r] = mulmod(rhs[r], inv, p);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const std::int64_t f = m[i][c];
      for (std::size_t j = 0; j < cols; ++j) m[i][j] = mod_floor(m[i][j] - mulmod(f, m[r][j], p), p);
      rhs[i] = mod_floor(rhs[i] - mulmod(f, rhs[r], p), p);
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  AffineSpace out;
  out.rank = static_cast<int>(r);
  for (std::size_t i = r; i < rows; ++i)
    if (rhs[i] % p != 0) return out;
  out.consistent = true;
  out.particular.assign(cols, 0);
  for (std::size_t i = 0; i < r; ++i) out.particular[static_cast<std::size_t>(pivot_col[i])] = rhs[i];
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[static_cast<std::size_t>(c)] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<std::int64_t> v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < r; ++i) v[static_cast<std::size_t>(pivot_col[i])] = mod_floor(-m[i][f], p);
    out.basis.push_back(std::move(v));
  }
  return out;
}

// Calls body(t) for every t in the affine space; stops when body returns false.
template <class Body>
bool for_each_point(const AffineSpace& sp, std::int64_t p, Body&& body) {
  const std::size_t dim = sp.basis.size();
  std::vector<std::int64_t> coef(dim, 0);
  std::vector<std::int64_t> t = sp.particular;
  while (true) {
    if (!body(t)) return false;
    std::size_t d = 0;
    while (d < dim) {
      ++coef[d];
      for (std::size_t c = 0; c < t.size(); ++c) t[c] = (t[c] + sp.basis[d][c]) % p;
      if (coef[d] < p) break;
      coef[d] = 0;  // wrapped: t is back to its value before this digit moved
      ++d;
    }
    if (d == dim) return true;
  }
}

// Walks [0, m)^s calling body(z) on every zero of the system mod m.
template <class Body>
void raw_zeros(const std::vector<std::vector<std::int64_t>>& a, std::int64_t m, int s, Body&& body) {
  const std::size_t k = a.size();
  std::vector<std::vector<std::int64_t>> cv(static_cast<std::size_t>(s), std::vector<std::int64_t>(static_cast<std::size_t>(m) * k));
  for (int i = 0; i < s; ++i)
    for (std::int64_t v = 0; v < m; ++v) {
      std::int64_t pw = 1;
      for (std::size_t j = 0; j < k; ++j) {
        pw = mulmod(pw, v, m);
        cv[static_cast<std::size_t>(i)][static_cast<std::size_t>(v) * k + j] = mulmod(a[j][static_cast<std::size_t>(i)], pw, m);
      }
    }
  std::vector<std::int64_t> z(static_cast<std::size_t>(s), 0), f(k, 0);
  while (true) {
    bool zero = true;
    for (auto v : f) zero = zero && v == 0;
    if (zero && !body(z)) return;
    int i = 0;
    for (; i < s; ++i) {
      auto& zi = z[static_cast<std::size_t>(i)];
      const auto* old = &cv[static_cast<std::size_t>(i)][static_cast<std::size_t>(zi) * k];
      zi = zi + 1 == m ? 0 : zi + 1;
      const auto* nw = &cv[static_cast<std::size_t>(i)][static_cast<std::size_t>(zi) * k];
      for (std::size_t j = 0; j < k; ++j) f[j] = mod_floor(f[j] + nw[j] - old[j], m);
      if (zi != 0) break;
    }
    if (i == s) return;
  }
}

BigInt count_raw(const LineSystem& ls, std::int64_t p, int h, const ModCountOptions& opt) {
  const std::int64_t m = checked_modulus(p, h);
  const double tuples = std::pow(static_cast<double>(m), ls.s());
  if (tuples > opt.raw_budget)
    throw BudgetExceeded("raw residue count needs " + format_double(tuples) + " tuples", tuples, opt.raw_budget);
  std::uint64_t n = 0;
  raw_zeros(coeffs_mod(ls, m), m, ls.s(), [&n](const std::vector<std::int64_t>&) {
    ++n;
    return true;
  });
  return BigInt(n);
}

template <class Count>
BigInt histogram_dp(const LineSystem& ls, std::int64_t m, std::size_t states) {
  const int k = ls.k(), s = ls.s();
  const auto a = coeffs_mod(ls, m);
  std::vector<Count> cur(states, Count(0)), next(states, Count(0));
  cur[0] = Count(1);
  std::map<std::vector<std::int64_t>, std::vector<std::pair<std::vector<std::int64_t>, std::uint64_t>>> cache;
  for (int i = 0; i < s; ++i) {
    std::vector<std::int64_t> col(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) col[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    auto it = cache.find(col);
    if (it == cache.end()) {
      std::map<std::vector<std::int64_t>, std::uint64_t> hist;
      for (std::int64_t v = 0; v < m; ++v) {
        std::vector<std::int64_t> w(static_cast<std::size_t>(k));
        std::int64_t pw = 1;
        for (int j = 0; j < k; ++j) {
          pw = mulmod(pw, v, m);
          w[static_cast<std::size_t>(j)] = mulmod(col[static_cast<std::size_t>(j)], pw, m);
        }
        ++hist[w];
      }
      it = cache.emplace(col, std::vector<std::pair<std::vector<std::int64_t>, std::uint64_t>>(hist.begin(), hist.end())).first;
    }
    const auto& dist = it->second;
    std::fill(next.begin(), next.end(), Count(0));
    std::vector<std::int64_t> d(static_cast<std::size_t>(k));
    for (std::size_t st = 0; st < states; ++st) {
      if (cur[st] == Count(0)) continue;
      std::size_t rest = st;
      for (int j = 0; j < k; ++j) {
        d[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(m));
        rest /= static_cast<std::size_t>(m);
      }
      for (const auto& [w, mult] : dist) {
        std::size_t target = 0;
        for (int j = k; j-- > 0;) {
          std::int64_t v = d[static_cast<std::size_t>(j)] + w[static_cast<std::size_t>(j)];
          if (v >= m) v -= m;
          target = target * static_cast<std::size_t>(m) + static_cast<std::size_t>(v);
        }
        next[target] += cur[st] * Count(mult);
      }
    }
    std::swap(cur, next);
  }
  if constexpr (std::is_same_v<Count, u128>) {
    BigInt r = static_cast<std::uint64_t>(cur[0] >> 64);
    r <<= 64;
    r += static_cast<std::uint64_t>(cur[0]);
    return r;
  } else {
    return cur[0];
  }
}

BigInt count_histogram(const LineSystem& ls, std::int64_t p, int h, const ModCountOptions& opt) {
  const std::int64_t m = checked_modulus(p, h);
  const double states = std::pow(static_cast<double>(m), ls.k());
  if (states > opt.state_budget)
    throw BudgetExceeded("residue histogram needs " + format_double(states) + " states", states, opt.state_budget);
  const double total = std::pow(static_cast<double>(m), ls.s());
  if (total < 1e37) return histogram_dp<u128>(ls, m, static_cast<std::size_t>(states));
  return histogram_dp<BigInt>(ls, m, static_cast<std::size_t>(states));
}

// Explicit solutions mod p^l are lifted digit by digit; the last level is
// counted as p^{s - rank} per consistent node.
BigInt count_lifting(const LineSystem& ls, std::int64_t p, int h, const ModCountOptions& opt) {
  const std::int64_t mh = checked_modulus(p, h);
  if (h == 1) return count_raw(ls, p, 1, {ModCountMethod::raw, opt.lifting_budget, 0, 0});
  const int s = ls.s();
  const auto a_h = coeffs_mod(ls, mh);
  double visited = 0;
  BigInt total = 0;
  std::vector<std::int64_t> rhs;
  std::function<void(std::vector<std::int64_t>&, int, std::int64_t)> descend =
      [&](std::vector<std::int64_t>& z, int level, std::int64_t pl) {
        if (++visited > opt.lifting_budget)
          throw BudgetExceeded("lifting enumerator exceeded its node budget", visited, opt.lifting_budget);
        const std::int64_t next_mod = pl * p;
        const auto f = residues(a_h, z, next_mod);
        rhs.assign(f.size(), 0);
        for (std::size_t j = 0; j < f.size(); ++j) rhs[j] = mod_floor(-(f[j] / pl), p);
        const auto space = solve_mod_p(jacobian_mod(a_h, z, p), rhs, p);
        if (!space.consistent) return;
        if (level + 1 == h) {
          total += big_pow(BigInt(p), static_cast<unsigned>(s - space.rank));
          return;
        }
        for_each_point(space, p, [&](const std::vector<std::int64_t>& t) {
          std::vector<std::int64_t> child(z);
          for (int i = 0; i < s; ++i) child[static_cast<std::size_t>(i)] += pl * t[static_cast<std::size_t>(i)];
          descend(child, level + 1, next_mod);
          return true;
        });
      };
  const double base = std::pow(static_cast<double>(p), s);
  if (base > opt.lifting_budget)
    throw BudgetExceeded("lifting enumerator base level needs " + format_double(base) + " tuples", base, opt.lifting_budget);
  raw_zeros(coeffs_mod(ls, p), p, s, [&](const std::vector<std::int64_t>& z) {
    std::vector<std::int64_t> copy(z);
    descend(copy, 1, p);
    return true;
  });
  return total;
}

// count * p^e as a double, exact until the final rounding.
double scaled_count(const BigInt& count, std::int64_t p, int e) {
  const BigInt scale = big_pow(BigInt(p), static_cast<unsigned>(std::abs(e)));
  BigRational d(count);
  if (e >= 0)
    d *= scale;
  else
    d /= scale;
  return d.convert_to<double>();
}

}  // namespace

BigInt count_mod(const LineSystem& ls, std::int64_t p, int h, const ModCountOptions& opt) {
  const std::int64_t m = checked_modulus(p, h);
  if (h == 0) return 1;
  switch (opt.method) {
    case ModCountMethod::raw: return count_raw(ls, p, h, opt);
    case ModCountMethod::lifting: return count_lifting(ls, p, h, opt);
    case ModCountMethod::histogram: return count_histogram(ls, p, h, opt);
    case ModCountMethod::automatic: break;
  }
  if (std::pow(static_cast<double>(m), ls.s()) <= 1e6) return count_raw(ls, p, h, opt);
  if (std::pow(static_cast<double>(m), ls.k()) <= opt.state_budget) return count_histogram(ls, p, h, opt);
  return count_lifting(ls, p, h, opt);
}

std::optional<HenselWitness> hensel_witness(const LineSystem& ls, std::int64_t p, int m, const HenselOptions& opt) {
  if (m < 1) throw InvalidInput("search depth m must be >= 1");
  const std::int64_t pm = checked_modulus(p, m);
  const int k = ls.k(), s = ls.s();
  const auto a_m = coeffs_mod(ls, pm);
  const auto a_p = coeffs_mod(ls, p);

  // Zeros mod p in order of growing support. A zero whose Jacobian has rank
  // k mod p certifies at depth 1; the others are kept as roots for lifting.
  struct Root {
    std::vector<std::int64_t> z;
    int rank;
  };
  std::vector<Root> roots;
  std::optional<HenselWitness> found;
  double walked = 0;
  const std::vector<std::int64_t> no_rhs(static_cast<std::size_t>(k), 0);
  for (int t = 0; t <= s && !found && walked <= opt.base_budget; ++t) {
    std::vector<int> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), 0);
    while (!found && walked <= opt.base_budget) {
      std::vector<std::int64_t> vals(static_cast<std::size_t>(t), 1), z(static_cast<std::size_t>(s), 0);
      while (true) {
        ++walked;
        for (int u = 0; u < t; ++u) z[static_cast<std::size_t>(idx[static_cast<std::size_t>(u)])] = vals[static_cast<std::size_t>(u)];
        const auto f = residues(a_p, z, p);
        if (std::all_of(f.begin(), f.end(), [](std::int64_t v) { return v == 0; })) {
          const int rank = solve_mod_p(jacobian_mod(a_p, z, p), no_rhs, p).rank;
          if (rank == k) {
            found = HenselWitness{p, 0, 0, 1, z, true};
            break;
          }
          roots.push_back({z, rank});
        }
        int u = 0;
        while (u < t && vals[static_cast<std::size_t>(u)] == p - 1) vals[static_cast<std::size_t>(u++)] = 1;
        if (u == t) break;
        ++vals[static_cast<std::size_t>(u)];
      }
      // Next t-subset of {0..s-1} in lexicographic order.
      int u = t - 1;
      while (u >= 0 && idx[static_cast<std::size_t>(u)] == s - t + u) --u;
      if (u < 0) break;
      ++idx[static_cast<std::size_t>(u)];
      for (int w = u + 1; w < t; ++w) idx[static_cast<std::size_t>(w)] = idx[static_cast<std::size_t>(w - 1)] + 1;
    }
  }
  if (found) return found;
  if (roots.empty()) return std::nullopt;

  // Best-first lifting by minor valuation. Every lift of z mod p^d keeps
  // the minors mod p^d, so a valuation below the depth is final.
  // The key min(v, depth) bounds the valuation of every lift from below.
  struct Node {
    unsigned v;
    int depth;
    std::vector<std::int64_t> z;
    unsigned key() const { return std::min(v, static_cast<unsigned>(depth)); }
  };
  auto worse = [](const Node& x, const Node& y) {
    return x.key() != y.key() ? x.key() > y.key() : x.depth < y.depth;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(worse)> open(worse);
  auto valuation_of = [&](const std::vector<std::int64_t>& z) {
    const auto v = min_minor_valuation(jacobian_matrix(ls, z), p);
    return v ? *v : std::numeric_limits<unsigned>::max();
  };
  std::stable_sort(roots.begin(), roots.end(), [](const Root& x, const Root& y) { return x.rank > y.rank; });
  if (roots.size() > static_cast<std::size_t>(opt.max_roots)) roots.resize(static_cast<std::size_t>(opt.max_roots));
  for (auto& r : roots) open.push({valuation_of(r.z), 1, std::move(r.z)});

  std::optional<HenselWitness> best;
  double visited = 0;
  while (!open.empty() && visited < opt.node_budget) {
    Node node = open.top();
    open.pop();
    ++visited;
    if (node.v != std::numeric_limits<unsigned>::max() && 2 * node.v + 1 <= static_cast<unsigned>(node.depth)) {
      HenselWitness w{p, 2 * node.v, node.v, static_cast<int>(2 * node.v + 1), node.z, true};
      // Report the residue class mod p^{nu+1}, which is what certifies.
      const std::int64_t keep = checked_modulus(p, w.depth);
      for (auto& zi : w.z) zi = mod_floor(zi, keep);
      return w;
    }
    if (node.depth == m) {
      const unsigned val = std::min(node.v, static_cast<unsigned>(m));
      if (!best || val < best->minor_valuation) best = HenselWitness{p, 2 * val, val, m, node.z, false};
      continue;
    }
    const std::int64_t pd = checked_modulus(p, node.depth), next_mod = pd * p;
    const auto f = residues(a_m, node.z, next_mod);
    std::vector<std::int64_t> rhs(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) rhs[j] = mod_floor(-(f[j] / pd), p);
    const auto space = solve_mod_p(jacobian_mod(a_m, node.z, p), rhs, p);
    if (!space.consistent) continue;
    int children = 0;
    for_each_point(space, p, [&](const std::vector<std::int64_t>& t) {
      std::vector<std::int64_t> child(node.z);
      for (int i = 0; i < s; ++i) child[static_cast<std::size_t>(i)] += pd * t[static_cast<std::size_t>(i)];
      const unsigned v = valuation_of(child);
      open.push({v, node.depth + 1, std::move(child)});
      return ++children < opt.max_children;
    });
  }
  return best;
}

DensityEstimate sigma_p_estimate(const LineSystem& ls, std::int64_t p, int h_max, const ModCountOptions& opt) {
  if (h_max < 1) throw InvalidInput("h_max must be >= 1");
  DensityEstimate est;
  est.route = DensityRoute::residue_count;
  est.instance_digest = ls.digest();
  est.p = p;
  est.h = h_max;
  const int k = ls.k(), s = ls.s();
  for (int h = 1; h <= h_max; ++h) {
    BigInt mcount = count_mod(ls, p, h, opt);
    est.sequence.push_back(scaled_count(mcount, p, h * (k - s)));
    est.counts.push_back(std::move(mcount));
  }
  est.value = est.sequence.back();
  est.witness = hensel_witness(ls, p, h_max);
  if (est.sequence.size() >= 2) {
    const double a = est.sequence[est.sequence.size() - 2], b = est.sequence.back();
    est.error_indicator = std::fabs(a - b);
    const bool agree = std::fabs(a - b) <= 1e-9 * std::max(std::fabs(a), std::fabs(b));
    est.stabilized = agree && est.witness && est.witness->certified &&
                     static_cast<int>(est.witness->nu) + 1 <= h_max;
  }
  return est;
}

std::complex<double> a_of_q(const LineSystem& ls, std::int64_t q, const SeriesOptions& opt) {
  if (q < 1) throw InvalidInput("q must be >= 1");
  const int k = ls.k(), s = ls.s();
  const double tuples = std::pow(static_cast<double>(q), k);
  if (tuples > opt.tuple_budget)
    throw BudgetExceeded("A(q) needs " + format_double(tuples) + " residue tuples", tuples, opt.tuple_budget);
  if (q == 1) return {1.0, 0.0};

  // Columns with equal coefficients mod q share their complete sum.
  std::map<std::vector<std::int64_t>, int> groups;
  for (int i = 0; i < s; ++i) {
    std::vector<std::int64_t> col(static_cast<std::size_t>(k));
    for (int j = 1; j <= k; ++j) col[static_cast<std::size_t>(j - 1)] = mod_floor(ls.coeff(j, i), q);
    ++groups[col];
  }
  std::vector<std::pair<std::vector<std::int64_t>, int>> cols(groups.begin(), groups.end());

  std::vector<std::complex<long double>> unit(static_cast<std::size_t>(q));
  for (std::int64_t t = 0; t < q; ++t) {
    const long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(t) / static_cast<long double>(q);
    unit[static_cast<std::size_t>(t)] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<std::vector<std::int64_t>> rpow(static_cast<std::size_t>(q), std::vector<std::int64_t>(static_cast<std::size_t>(k)));
  for (std::int64_t r = 0; r < q; ++r) {
    std::int64_t pw = 1;
    for (int j = 0; j < k; ++j) {
      pw = mulmod(pw, r, q);
      rpow[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] = pw;
    }
  }

  const auto n = static_cast<std::uint64_t>(tuples);
  const std::size_t blocks = static_cast<std::size_t>(std::min<std::uint64_t>(64, n));
  std::vector<std::complex<long double>> parts(blocks);
  parallel_blocks(blocks, opt.threads, [&](std::size_t b) {
    const std::uint64_t begin = n * b / blocks, end = n * (b + 1) / blocks;
    std::vector<std::int64_t> a(static_cast<std::size_t>(k)), tw(static_cast<std::size_t>(k));
    std::complex<long double> acc = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      std::uint64_t rest = t;
      std::int64_t g = q;
      for (int j = 0; j < k; ++j) {
        a[static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rest % static_cast<std::uint64_t>(q));
        rest /= static_cast<std::uint64_t>(q);
        g = std::gcd(g, a[static_cast<std::size_t>(j)]);
      }
      if (g != 1) continue;
      std::complex<long double> prod = 1;
      for (const auto& [col, mult] : cols) {
        for (int j = 0; j < k; ++j) tw[static_cast<std::size_t>(j)] = mulmod(col[static_cast<std::size_t>(j)], a[static_cast<std::size_t>(j)], q);
        std::complex<long double> sum = 0;
        for (std::int64_t r = 1; r <= q; ++r) {
          const auto& rp = rpow[static_cast<std::size_t>(r % q)];
          std::int64_t ph = 0;
          for (int j = 0; j < k; ++j) ph = (ph + mulmod(tw[static_cast<std::size_t>(j)], rp[static_cast<std::size_t>(j)], q)) % q;
          sum += unit[static_cast<std::size_t>(ph)];
        }
        sum /= static_cast<long double>(q);
        for (int e = 0; e < mult; ++e) prod *= sum;
      }
      acc += prod;
    }
    parts[b] = acc;
  });
  const auto total = tree_sum(parts);
  return {static_cast<double>(total.real()), static_cast<double>(total.imag())};
}

DensityEstimate truncated_singular_series(const LineSystem& ls, std::int64_t D, const SeriesOptions& opt) {
  if (D < 1) throw InvalidInput("D must be >= 1");
  DensityEstimate est;
  est.route = DensityRoute::series;
  est.instance_digest = ls.digest();
  est.D = static_cast<double>(D);
  std::complex<double> sum = 0;
  for (std::int64_t q = 1; q <= D; ++q) {
    sum += a_of_q(ls, q, opt);
    est.sequence.push_back(sum.real());
  }
  est.value = sum.real();
  est.imag = sum.imag();
  est.error_indicator = std::fabs(sum.imag());
  return est;
}

DensityEstimate sigma_p_via_series(const LineSystem& ls, std::int64_t p, int H, const SeriesOptions& opt,
                                   const ModCountOptions& mod) {
  if (H < 0) throw InvalidInput("H must be >= 0");
  DensityEstimate est;
  est.route = DensityRoute::series;
  est.instance_digest = ls.digest();
  est.p = p;
  est.h = H;
  std::complex<double> sum = 0;
  std::int64_t q = 1;
  for (int h = 0; h <= H; ++h) {
    sum += a_of_q(ls, q, opt);
    est.sequence.push_back(sum.real());
    if (h < H) q *= p;
  }
  est.value = sum.real();
  est.imag = sum.imag();
  const BigInt mcount = count_mod(ls, p, H, mod);
  est.comparison = scaled_count(mcount, p, H * (ls.k() - ls.s()));
  est.counts.push_back(mcount);
  est.error_indicator = std::abs(sum - std::complex<double>(est.comparison, 0.0));
  if (est.error_indicator > 1e-6)
    throw ConsistencyError("sum of A(p^h) disagrees with p^{H(k-s)} M_p(H): " + format_double(est.value) + " vs " +
                           format_double(est.comparison));
  return est;
}

}  // namespace diagline
