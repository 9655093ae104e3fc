#include "diagline/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <numeric>

#include "diagline/errors.hpp"
#include "diagline/util.hpp"

namespace diagline {

namespace {

constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;

long double frac(long double v) { return v - std::floor(v); }

// Kahan-compensated complex accumulator.
struct ComplexSum {
  double re = 0, im = 0, cre = 0, cim = 0;
  void add(double x, double y) {
    double t = x - cre, s = re + t;
    cre = (s - re) - t;
    re = s;
    t = y - cim;
    s = im + t;
    cim = (s - im) - t;
    im = s;
  }
  Complex value() const { return {re, im}; }
};

std::int64_t mod_i64(const BigInt& v, std::int64_t q) {
  return mod_floor(v, q);
}

// Closed arcs; the relative slack absorbs rounding in the floating inputs.
bool within(long double dist, long double radius) { return dist <= radius * (1.0L + 1e-12L); }

Complex weyl_sum_impl(std::span<const long double> alpha, std::int64_t X) {
  if (X < 0) throw InvalidInput("X must be >= 0");
  ComplexSum acc;
  const std::size_t k = alpha.size();
  for (std::int64_t x = -X; x <= X; ++x) {
    long double p = 0;
    for (std::size_t j = k; j-- > 0;) p = frac((p + alpha[j]) * static_cast<long double>(x));
    const long double ang = kTwoPi * p;
    acc.add(static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang)));
  }
  return acc.value();
}

Complex integral_impl(std::span<const long double> theta, double X, const QuadratureConfig& cfg) {
  if (!(X > 0)) throw InvalidInput("X must be > 0");
  long double variation = 0, xj = 1;
  for (auto t : theta) {
    xj *= X;
    variation += std::fabs(t) * xj;
  }
  const int initial = static_cast<int>(std::max<long double>(4.0L, std::ceil(2.0L * cfg.panels_per_cycle * variation)));
  std::vector<long double> th(theta.begin(), theta.end());
  auto f = [&th](double g) {
    long double p = 0;
    for (std::size_t j = th.size(); j-- > 0;) p = (p + th[j]) * g;
    p = frac(p);
    const long double ang = kTwoPi * p;
    return Complex(static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang)));
  };
  return integrate_gk15(f, -X, X, initial, cfg).value;
}

// V_i evaluated at alpha = a/q + delta.
Complex major_arc_offset(const LineSystem& ls, int i, std::span<const long double> delta, std::int64_t q,
                         std::span<const std::int64_t> a, std::int64_t X, const QuadratureConfig& cfg) {
  const int k = ls.k();
  const auto ci = ls.c()[static_cast<std::size_t>(i)];
  const auto yi = ls.y()[static_cast<std::size_t>(i)];
  const Complex s = complete_sum(q, twist_integers(a, yi, ci));
  std::vector<long double> theta(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j)
    theta[static_cast<std::size_t>(j - 1)] = ls.coeff(j, i).convert_to<long double>() * delta[static_cast<std::size_t>(j - 1)];
  return s / static_cast<double>(q) * integral_impl(theta, static_cast<double>(X), cfg);
}

void check_index(const LineSystem& ls, int i, std::size_t alen) {
  if (i < 0 || i >= ls.s()) throw InvalidInput("variable index out of range");
  if (static_cast<int>(alen) != ls.k()) throw InvalidInput("argument must have k components");
}

struct GaussRule {
  std::vector<double> x, w;
};

GaussRule legendre_rule(int n) {
  GaussRule r;
  r.x.resize(static_cast<std::size_t>(n));
  r.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1) * z * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    {
      double p0 = 1, p1 = z;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1) * z * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
    }
    const double w = 2.0 / ((1 - z * z) * dp * dp);
    r.x[static_cast<std::size_t>(i)] = -z;
    r.x[static_cast<std::size_t>(n - 1 - i)] = z;
    r.w[static_cast<std::size_t>(i)] = r.w[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return r;
}

const GaussRule& cached_rule(int n) {
  thread_local std::map<int, GaussRule> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, legendre_rule(n)).first;
  return it->second;
}

}  // namespace

Complex oscillatory_integral_gl(std::span<const double> theta, double X) {
  if (!(X > 0)) throw InvalidInput("X must be > 0");
  // Largest |phi'| in cycles per unit length, times the half-width.
  double slope = 0, xj = 1;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    slope += static_cast<double>(j + 1) * std::fabs(theta[j]) * xj;
    xj *= X;
  }
  const double omega = 2.0 * std::numbers::pi * slope * X;
  int n = 24 + static_cast<int>(std::ceil(0.65 * omega));
  n = (n + 7) / 8 * 8;
  if (n > 4096) return oscillatory_integral(theta, X);
  const auto& rule = cached_rule(n);
  double re = 0, im = 0;
  for (std::size_t m = 0; m < rule.x.size(); ++m) {
    const double g = X * rule.x[m];
    double p = 0;
    for (std::size_t j = theta.size(); j-- > 0;) p = (p + theta[j]) * g;
    p -= std::floor(p);
    const double ang = 2.0 * std::numbers::pi * p;
    re += rule.w[m] * std::cos(ang);
    im += rule.w[m] * std::sin(ang);
  }
  return {re * X, im * X};
}

TwistedArgument::TwistedArgument(std::vector<double> a, std::int64_t y_, std::int64_t c_)
    : alpha(std::move(a)), y(y_), c(c_) {
  if (y == 0 || c == 0) throw InvalidInput("twist needs nonzero y and c");
}

std::vector<double> TwistedArgument::unreduced() const {
  std::vector<double> out;
  const int kk = k();
  for (int j = 1; j <= kk; ++j) {
    const BigInt m = BigInt(c) * big_pow(BigInt(y), static_cast<unsigned>(kk - j));
    out.push_back(static_cast<double>(m.convert_to<long double>() * alpha[static_cast<std::size_t>(j - 1)]));
  }
  return out;
}

std::vector<double> TwistedArgument::beta() const {
  std::vector<double> out;
  const int kk = k();
  for (int j = 1; j <= kk; ++j) {
    const BigInt m = BigInt(c) * big_pow(BigInt(y), static_cast<unsigned>(kk - j));
    out.push_back(static_cast<double>(frac(m.convert_to<long double>() * alpha[static_cast<std::size_t>(j - 1)])));
  }
  return out;
}

std::vector<BigInt> twist_integers(std::span<const std::int64_t> a, std::int64_t y, std::int64_t c) {
  const int k = static_cast<int>(a.size());
  std::vector<BigInt> out;
  for (int j = 1; j <= k; ++j)
    out.push_back(BigInt(c) * big_pow(BigInt(y), static_cast<unsigned>(k - j)) * a[static_cast<std::size_t>(j - 1)]);
  return out;
}

Complex weyl_sum(std::span<const double> alpha, std::int64_t X) {
  std::vector<long double> a;
  for (double v : alpha) a.push_back(frac(static_cast<long double>(v)));
  return weyl_sum_impl(a, X);
}

Complex complete_sum(std::int64_t q, std::span<const BigInt> a) {
  if (q < 1) throw InvalidInput("q must be >= 1");
  std::vector<i128> ar;
  for (const auto& v : a) ar.push_back(mod_i64(v, q));
  ComplexSum acc;
  for (std::int64_t r = 1; r <= q; ++r) {
    i128 p = 0;
    for (std::size_t j = ar.size(); j-- > 0;) p = (p + ar[j]) * r % q;
    const long double ang = kTwoPi * static_cast<long double>(p) / static_cast<long double>(q);
    acc.add(static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang)));
  }
  return acc.value();
}

Complex complete_sum(std::int64_t q, std::span<const std::int64_t> a) {
  std::vector<BigInt> b(a.begin(), a.end());
  return complete_sum(q, std::span<const BigInt>(b));
}

Complex oscillatory_integral(std::span<const double> theta, double X, const QuadratureConfig& cfg) {
  std::vector<long double> t(theta.begin(), theta.end());
  return integral_impl(t, X, cfg);
}

Complex twisted_weyl_sum(const LineSystem& ls, int i, std::span<const double> alpha, std::int64_t X) {
  check_index(ls, i, alpha.size());
  std::vector<long double> beta;
  for (int j = 1; j <= ls.k(); ++j)
    beta.push_back(frac(ls.coeff(j, i).convert_to<long double>() * static_cast<long double>(alpha[static_cast<std::size_t>(j - 1)])));
  return weyl_sum_impl(beta, X);
}

Complex major_arc_approx(const LineSystem& ls, int i, std::span<const double> alpha, std::int64_t q,
                         std::span<const std::int64_t> a, std::int64_t X, const QuadratureConfig& cfg) {
  check_index(ls, i, alpha.size());
  if (q < 1) throw InvalidInput("q must be >= 1");
  if (a.size() != alpha.size()) throw InvalidInput("a must have k components");
  std::vector<long double> delta;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    delta.push_back(static_cast<long double>(alpha[j]) - static_cast<long double>(a[j]) / static_cast<long double>(q));
  return major_arc_offset(ls, i, delta, q, a, X, cfg);
}

ApproxErrorReport approx_error_scan(const LineSystem& ls, int i, std::int64_t q, std::span<const std::int64_t> a,
                                    std::int64_t X, double L, int samples, std::uint64_t seed,
                                    const QuadratureConfig& cfg) {
  check_index(ls, i, a.size());
  if (q < 1 || samples < 1 || X < 1 || !(L > 0)) throw InvalidInput("approx_error_scan needs q, samples, X >= 1 and L > 0");
  const int k = ls.k();
  std::vector<double> err(static_cast<std::size_t>(samples)), bound(err.size());
  parallel_blocks(err.size(), 0, [&](std::size_t n) {
    std::vector<long double> delta(static_cast<std::size_t>(k)), alpha(delta.size());
    long double b = static_cast<long double>(q), xj = 1;
    for (int j = 1; j <= k; ++j) {
      xj *= static_cast<long double>(X);
      const long double u = n == 0 ? 0.0L : 2.0L * counter_uniform(seed, n, static_cast<std::uint64_t>(j)) - 1.0L;
      const long double d = u * static_cast<long double>(L) / xj;
      delta[static_cast<std::size_t>(j - 1)] = d;
      b += xj * std::fabs(static_cast<long double>(q) * d);
      const long double aj = static_cast<long double>(a[static_cast<std::size_t>(j - 1)]) / static_cast<long double>(q) + d;
      alpha[static_cast<std::size_t>(j - 1)] = frac(ls.coeff(j, i).convert_to<long double>() * aj);
    }
    const Complex f = weyl_sum_impl(alpha, X);
    const Complex v = major_arc_offset(ls, i, delta, q, a, X, cfg);
    err[n] = std::abs(f - v);
    bound[n] = static_cast<double>(b);
  });
  ApproxErrorReport rep;
  rep.samples = samples;
  for (std::size_t n = 0; n < err.size(); ++n) {
    rep.max_abs_error = std::max(rep.max_abs_error, err[n]);
    rep.bound_value = std::max(rep.bound_value, bound[n]);
    rep.max_ratio = std::max(rep.max_ratio, err[n] / bound[n]);
  }
  return rep;
}

std::string to_string(ArcClass c) {
  switch (c) {
    case ArcClass::W1: return "W1";
    case ArcClass::W2: return "W2";
    case ArcClass::W3: return "W3";
    case ArcClass::W4: return "W4";
  }
  return "?";
}

ArcParameters default_arc_parameters(int k, double X) {
  if (k < 1 || !(X >= 1)) throw InvalidInput("default arc parameters need k >= 1 and X >= 1");
  ArcParameters p;
  p.X = X;
  p.L = std::pow(X, 1.0 / (8.0 * k * k));
  p.Q = std::pow(p.L, k);
  if (p.L < 2) p.warning = "L = " + format_double(p.L) + " < 2: only q = 1 arcs exist at this X";
  return p;
}

std::optional<ArcWitness> joint_major_arc(std::span<const double> alpha, double X, double Z) {
  const int k = static_cast<int>(alpha.size());
  if (k < 1) throw InvalidInput("alpha must be nonempty");
  std::vector<long double> al;
  for (double v : alpha) al.push_back(frac(static_cast<long double>(v)));
  const auto qmax = static_cast<std::int64_t>(std::floor(Z + 1e-9));
  for (std::int64_t q = 1; q <= qmax; ++q) {
    std::vector<std::vector<std::int64_t>> cands(static_cast<std::size_t>(k));
    bool empty = false;
    long double xj = 1;
    for (int j = 0; j < k && !empty; ++j) {
      xj *= static_cast<long double>(X);
      const long double w = static_cast<long double>(q) * static_cast<long double>(Z) / xj * (1.0L + 1e-12L);
      const long double centre = static_cast<long double>(q) * al[static_cast<std::size_t>(j)];
      const auto lo = static_cast<std::int64_t>(std::ceil(centre - w));
      const auto hi = static_cast<std::int64_t>(std::floor(centre + w));
      auto& c = cands[static_cast<std::size_t>(j)];
      if (hi < lo) {
        empty = true;
      } else if (hi - lo + 1 >= q) {
        // Every residue is available; one congruent to 1 makes gcd(q, a) = 1.
        c.push_back(lo + mod_floor(1 - lo, q));
      } else {
        for (auto v = lo; v <= hi; ++v) c.push_back(v);
      }
    }
    if (empty) continue;
    // Odometer over candidate tuples until a coprime one appears.
    std::vector<std::size_t> pos(static_cast<std::size_t>(k), 0);
    for (long steps = 0; steps < 100000; ++steps) {
      std::int64_t g = q;
      for (int j = 0; j < k; ++j) g = std::gcd(g, cands[static_cast<std::size_t>(j)][pos[static_cast<std::size_t>(j)]]);
      if (g == 1) {
        ArcWitness w;
        w.q = q;
        for (int j = 0; j < k; ++j) w.a.push_back(mod_floor(cands[static_cast<std::size_t>(j)][pos[static_cast<std::size_t>(j)]], q));
        return w;
      }
      std::size_t j = 0;
      while (j < pos.size() && ++pos[j] == cands[j].size()) pos[j++] = 0;
      if (j == pos.size()) break;
    }
  }
  return std::nullopt;
}

std::optional<ArcWitness> one_dim_major_arc(double alpha, int k, double X, double Q, bool exhaustive) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  const long double a = frac(static_cast<long double>(alpha));
  const long double radius = static_cast<long double>(Q) * std::pow(static_cast<long double>(X), -static_cast<long double>(k));
  const auto qmax = static_cast<std::int64_t>(std::floor(Q + 1e-9));
  auto test = [&](std::int64_t q) -> std::optional<ArcWitness> {
    const long double qa = static_cast<long double>(q) * a;
    const auto r = static_cast<std::int64_t>(std::llround(qa));
    if (within(std::fabs(qa - static_cast<long double>(r)), radius)) return ArcWitness{q, {mod_floor(r, q)}};
    return std::nullopt;
  };
  if (exhaustive) {
    for (std::int64_t q = 1; q <= qmax; ++q)
      if (auto w = test(q)) return w;
    return std::nullopt;
  }
  // min_{q <= Q} ||q a|| is attained at a convergent denominator, so testing
  // the convergents decides membership.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  long double x = a;
  for (int it = 0; it < 64; ++it) {
    const auto c = static_cast<std::int64_t>(std::floor(x));
    const std::int64_t h2 = c * h1 + h0, k2 = c * k1 + k0;
    if (k2 > qmax) break;
    if (k2 >= 1)
      if (auto w = test(k2)) return w;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const long double f = x - static_cast<long double>(c);
    if (f < 1e-18L) break;
    x = 1.0L / f;
  }
  return std::nullopt;
}

ArcLabel classify_arc(std::span<const double> alpha, const ArcParameters& params) {
  const int k = static_cast<int>(alpha.size());
  if (k < 1) throw InvalidInput("alpha must be nonempty");
  if (!(params.L >= 1 && params.L <= params.X && params.Q >= 1 && params.Q <= params.X))
    throw InvalidInput("arc parameters need 1 <= L, Q <= X");
  ArcLabel label;
  label.params = params;
  label.one_dim = one_dim_major_arc(alpha[static_cast<std::size_t>(k - 1)], k, params.X, params.Q);
  if (auto w = joint_major_arc(alpha, params.X, params.L)) {
    label.cls = ArcClass::W4;
    label.witness = w;
    return label;
  }
  if (!label.one_dim) {
    label.cls = ArcClass::W1;
    return label;
  }
  if (auto w = joint_major_arc(alpha, params.X, params.Q * params.Q)) {
    label.cls = ArcClass::W3;
    label.witness = w;
  } else {
    label.cls = ArcClass::W2;
  }
  return label;
}

}  // namespace diagline
