#include "diagline/realdensity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "diagline/errors.hpp"
#include "diagline/expsum.hpp"
#include "diagline/util.hpp"

namespace diagline {

namespace {

constexpr std::size_t kSlabBlocks = 256;

struct Interval {
  double lo, hi;
};

double signed_root(double v, int j) {
  return v < 0 ? -std::pow(-v, 1.0 / j) : std::pow(v, 1.0 / j);
}

void intersect(std::vector<Interval>& cur, const std::vector<Interval>& with) {
  std::vector<Interval> out;
  for (const auto& a : cur)
    for (const auto& b : with) {
      const double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
      if (lo < hi) out.push_back({lo, hi});
    }
  cur.swap(out);
}

// Pivot coordinate integrated exactly; b holds the other coordinates' sums.
struct SlabGeometry {
  int k = 0, s = 0, pivot = 0;
  std::vector<int> others;
  std::vector<std::vector<double>> a;  // a[j][i] as doubles

  explicit SlabGeometry(const LineSystem& ls) : k(ls.k()), s(ls.s()) {
    a.assign(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(s)));
    double best = -1;
    for (int i = 0; i < s; ++i) {
      double w = 0;
      for (int j = 1; j <= k; ++j) {
        a[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)] = ls.coeff(j, i).convert_to<double>();
        w += std::fabs(a[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i)]);
      }
      if (w > best) {
        best = w;
        pivot = i;
      }
    }
    for (int i = 0; i < s; ++i)
      if (i != pivot) others.push_back(i);
  }

  void partial_sums(const std::vector<double>& z, std::vector<double>& b) const {
    b.assign(static_cast<std::size_t>(k), 0.0);
    for (std::size_t o = 0; o < others.size(); ++o) {
      const double v = z[o];
      double pw = 1;
      for (int j = 0; j < k; ++j) {
        pw *= v;
        b[static_cast<std::size_t>(j)] += a[static_cast<std::size_t>(j)][static_cast<std::size_t>(others[o])] * pw;
      }
    }
  }

  // Length of {x in [-1, 1] : |a_j x^j + b_j| < eta for all j}.
  double length(const std::vector<double>& b, double eta) const {
    std::vector<Interval> cur{{-1.0, 1.0}}, piece;
    for (int j = 1; j <= k && !cur.empty(); ++j) {
      const double aj = a[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(pivot)];
      double lo = (-eta - b[static_cast<std::size_t>(j - 1)]) / aj, hi = (eta - b[static_cast<std::size_t>(j - 1)]) / aj;
      if (lo > hi) std::swap(lo, hi);
      piece.clear();
      if (j % 2 == 1) {
        piece.push_back({signed_root(lo, j), signed_root(hi, j)});
      } else if (hi > 0) {
        const double r0 = lo > 0 ? std::pow(lo, 1.0 / j) : 0.0, r1 = std::pow(hi, 1.0 / j);
        if (r0 == 0.0) {
          piece.push_back({-r1, r1});
        } else {
          piece.push_back({-r1, -r0});
          piece.push_back({r0, r1});
        }
      }
      intersect(cur, piece);
    }
    double len = 0;
    for (const auto& iv : cur) len += iv.hi - iv.lo;
    return len;
  }
};

struct Moments {
  std::vector<long double> sum, sq;
};

std::vector<SlabVolume> grid_volumes(const SlabGeometry& g, const std::vector<double>& etas, int nodes,
                                     unsigned threads) {
  const std::size_t dims = g.others.size();
  const double cell = 2.0 / nodes;
  std::uint64_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= static_cast<std::uint64_t>(nodes);
  const std::size_t blocks = static_cast<std::size_t>(std::min<std::uint64_t>(kSlabBlocks, total));
  std::vector<std::vector<long double>> parts(blocks, std::vector<long double>(etas.size(), 0.0L));
  parallel_blocks(blocks, threads, [&](std::size_t blk) {
    const std::uint64_t begin = total * blk / blocks, end = total * (blk + 1) / blocks;
    std::vector<double> z(dims), b;
    for (std::uint64_t t = begin; t < end; ++t) {
      std::uint64_t rest = t;
      for (std::size_t d = 0; d < dims; ++d) {
        z[d] = -1.0 + cell * (static_cast<double>(rest % static_cast<std::uint64_t>(nodes)) + 0.5);
        rest /= static_cast<std::uint64_t>(nodes);
      }
      g.partial_sums(z, b);
      for (std::size_t e = 0; e < etas.size(); ++e) parts[blk][e] += g.length(b, etas[e]);
    }
  });
  std::vector<SlabVolume> out;
  const long double w = std::pow(static_cast<long double>(cell), static_cast<long double>(dims));
  for (std::size_t e = 0; e < etas.size(); ++e) {
    std::vector<long double> col;
    for (const auto& p : parts) col.push_back(p[e]);
    out.push_back({etas[e], static_cast<double>(tree_sum(col) * w), 0.0});
  }
  return out;
}

void check_etas(const std::vector<double>& etas) {
  if (etas.empty()) throw InvalidInput("need at least one eta");
  for (double e : etas)
    if (!(e > 0)) throw InvalidInput("eta must be > 0");
}

}  // namespace

std::vector<SlabVolume> slab_volumes(const LineSystem& ls, const std::vector<double>& etas, const SlabSampler& sampler) {
  check_etas(etas);
  const SlabGeometry g(ls);
  const std::size_t dims = g.others.size();
  if (sampler.kind == SlabSampler::Kind::grid) {
    if (sampler.nodes < 2) throw InvalidInput("grid needs >= 2 nodes per axis");
    const double points = std::pow(static_cast<double>(sampler.nodes), static_cast<double>(dims));
    if (points > sampler.grid_budget)
      throw BudgetExceeded("slab grid needs " + format_double(points) + " points", points, sampler.grid_budget);
    auto fine = grid_volumes(g, etas, sampler.nodes, sampler.threads);
    auto coarse = grid_volumes(g, etas, sampler.nodes / 2, sampler.threads);
    for (std::size_t e = 0; e < fine.size(); ++e) fine[e].error = std::fabs(fine[e].value - coarse[e].value);
    return fine;
  }
  if (sampler.samples < 10'000) throw InvalidInput("Monte Carlo needs at least 10^4 samples");
  const std::uint64_t n = sampler.samples;
  const std::size_t blocks = kSlabBlocks;
  std::vector<Moments> parts(blocks);
  parallel_blocks(blocks, sampler.threads, [&](std::size_t blk) {
    const std::uint64_t begin = n * blk / blocks, end = n * (blk + 1) / blocks;
    Moments m{std::vector<long double>(etas.size(), 0.0L), std::vector<long double>(etas.size(), 0.0L)};
    std::vector<double> z(dims), b;
    for (std::uint64_t t = begin; t < end; ++t) {
      for (std::size_t d = 0; d < dims; ++d)
        z[d] = 2.0 * counter_uniform(sampler.seed, t, static_cast<std::uint64_t>(g.others[d])) - 1.0;
      g.partial_sums(z, b);
      for (std::size_t e = 0; e < etas.size(); ++e) {
        const long double len = g.length(b, etas[e]);
        m.sum[e] += len;
        m.sq[e] += len * len;
      }
    }
    parts[blk] = std::move(m);
  });
  std::vector<SlabVolume> out;
  const long double cube = std::pow(2.0L, static_cast<long double>(dims));
  for (std::size_t e = 0; e < etas.size(); ++e) {
    std::vector<long double> s1, s2;
    for (const auto& p : parts) {
      s1.push_back(p.sum[e]);
      s2.push_back(p.sq[e]);
    }
    const long double mean = tree_sum(s1) / static_cast<long double>(n);
    const long double var = std::max(0.0L, tree_sum(s2) / static_cast<long double>(n) - mean * mean);
    out.push_back({etas[e], static_cast<double>(cube * mean),
                   static_cast<double>(cube * std::sqrt(var / static_cast<long double>(n)))});
  }
  return out;
}

SlabVolume slab_volume(const LineSystem& ls, double eta, const SlabSampler& sampler) {
  return slab_volumes(ls, {eta}, sampler).front();
}

SlabFit sigma_infinity_slab(const LineSystem& ls, const std::vector<double>& etas, const SlabSampler& sampler,
                            double max_residual) {
  if (etas.size() < 3) throw InvalidInput("slab extrapolation needs at least 3 eta values");
  for (std::size_t i = 1; i < etas.size(); ++i)
    if (!(etas[i] < etas[i - 1])) throw InvalidInput("eta sequence must be strictly decreasing");
  const auto vols = slab_volumes(ls, etas, sampler);
  SlabFit fit;
  fit.etas = etas;
  const int k = ls.k();
  const double cube = std::pow(2.0, ls.s());
  bool saturated = false;
  for (const auto& v : vols) {
    const double scale = std::pow(2.0 * v.eta, -k);
    fit.g.push_back(v.value * scale);
    fit.g_error.push_back(v.error * scale);
    saturated = saturated || v.value >= cube * (1 - 1e-12);
  }
  const double n = static_cast<double>(etas.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    mx += etas[i] / n;
    my += fit.g[i] / n;
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    sxx += (etas[i] - mx) * (etas[i] - mx);
    sxy += (etas[i] - mx) * (fit.g[i] - my);
  }
  if (sxx == 0) throw InvalidInput("degenerate eta sequence");
  fit.slope = sxy / sxx;
  const double intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double r = fit.g[i] - (intercept + fit.slope * etas[i]);
    ss += r * r;
  }
  auto& est = fit.estimate;
  est.route = DensityRoute::slab;
  est.instance_digest = ls.digest();
  est.value = intercept;
  est.error_indicator = std::sqrt(ss / n);
  est.sequence = fit.g;
  if (saturated) {
    fit.rejected = true;
    est.note = "slab covers the whole cube: eta is outside the small-eta regime";
  } else if (!(intercept > 0) || est.error_indicator > max_residual * std::fabs(intercept)) {
    fit.rejected = true;
    est.note = "linear fit in eta rejected: relative residual " + format_double(est.error_indicator / std::fabs(intercept));
  }
  est.stabilized = !fit.rejected;
  return fit;
}

namespace {

// Breakpoints 0, +-1/8, +-1/4, ..., +-D: dense near the origin where the
// integrand is concentrated.
std::vector<double> graded_breaks(double D, bool symmetric) {
  std::vector<double> pos;
  for (double b = 0.125; b < D; b *= 2) pos.push_back(b);
  pos.push_back(D);
  std::vector<double> out;
  if (symmetric)
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
  out.push_back(0.0);
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

}  // namespace

SingularIntegral truncated_singular_integral(const LineSystem& ls, double D, const IntegralConfig& cfg) {
  if (!(D >= 1)) throw InvalidInput("truncation D must be >= 1");
  const int k = ls.k();
  if (k > 4) throw InvalidInput("singular integral quadrature supports k <= 4");

  // Distinct columns up to sign; a negated column contributes the conjugate.
  std::map<std::vector<BigInt>, std::pair<int, int>> groups;
  for (int i = 0; i < ls.s(); ++i) {
    std::vector<BigInt> col, neg;
    for (int j = 1; j <= k; ++j) {
      col.push_back(ls.coeff(j, i));
      neg.push_back(-ls.coeff(j, i));
    }
    if (groups.count(neg) && !groups.count(col))
      ++groups[neg].second;
    else
      ++groups[col].first;
  }
  struct Column {
    std::vector<double> a;
    int plus, minus;
  };
  std::vector<Column> cols;
  for (const auto& [col, mult] : groups) {
    Column c;
    for (const auto& v : col) c.a.push_back(v.convert_to<double>());
    c.plus = mult.first;
    c.minus = mult.second;
    cols.push_back(std::move(c));
  }

  auto integrand = [&](const std::vector<double>& theta) {
    Complex prod = 1;
    std::vector<double> t(static_cast<std::size_t>(k));
    for (const auto& c : cols) {
      for (int j = 0; j < k; ++j) t[static_cast<std::size_t>(j)] = c.a[static_cast<std::size_t>(j)] * theta[static_cast<std::size_t>(j)];
      const Complex v = cfg.adaptive_factors ? oscillatory_integral(t, 1.0, cfg.inner) : oscillatory_integral_gl(t, 1.0);
      for (int e = 0; e < c.plus; ++e) prod *= v;
      for (int e = 0; e < c.minus; ++e) prod *= std::conj(v);
    }
    return prod;
  };

  // With the symmetry, theta_k runs over [0, D] and the result is 2 Re(...),
  // by J(-theta) = conj J(theta).
  const bool sym = cfg.use_symmetry;
  std::vector<double> theta(static_cast<std::size_t>(k), 0.0);
  double err_total = 0;
  std::function<Complex(int)> level = [&](int axis) -> Complex {
    const bool outermost = axis == k - 1;
    const bool half_axis = outermost && sym;
    QuadratureConfig qc;
    qc.max_panels = cfg.max_panels;
    // Tolerance for this axis, split evenly across axes and scaled by the
    // measure of the axes outside it.
    double outside = 1;
    for (int a = axis + 1; a < k; ++a) outside *= (a == k - 1 && sym) ? D : 2.0 * D;
    qc.abs_tol = cfg.abs_tol / (k * outside);
    auto f = [&, axis](double x) {
      theta[static_cast<std::size_t>(axis)] = x;
      return axis == 0 ? integrand(theta) : level(axis - 1);
    };
    auto res = integrate_gk15(f, graded_breaks(D, !half_axis), qc);
    if (outermost) err_total += res.error;
    return res.value;
  };
  const Complex v = level(k - 1);
  SingularIntegral out;
  out.D = D;
  out.value = sym ? 2.0 * v.real() : v.real();
  out.imag = sym ? 0.0 : v.imag();
  out.error_indicator = (sym ? 2.0 : 1.0) * err_total + cfg.abs_tol;
  return out;
}

IntegralExtrapolation extrapolate_table(int k, std::vector<SingularIntegral> table, const std::string& digest) {
  if (table.empty()) throw InvalidInput("need at least one truncation D");
  std::sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.D < b.D; });
  IntegralExtrapolation ex;
  ex.table = table;
  auto& est = ex.estimate;
  est.route = DensityRoute::singular_integral;
  est.instance_digest = digest;
  for (const auto& t : table) est.sequence.push_back(t.value);
  est.D = table.back().D;
  if (table.size() == 1) {
    est.value = table.back().value;
    est.error_indicator = table.back().error_indicator;
    est.note = "single truncation: no tail extrapolation";
    return ex;
  }
  const auto& t1 = table[table.size() - 2];
  const auto& t2 = table.back();
  const double a = 1.0 / k;
  const double u1 = std::pow(t1.D, -a), u2 = std::pow(t2.D, -a);
  if (u1 == u2) throw InvalidInput("truncations must be distinct");
  const double c = (t1.value - t2.value) / (u1 - u2);
  est.value = t2.value - c * u2;
  est.error_indicator = std::fabs(c * u2) + t1.error_indicator + t2.error_indicator;
  est.stabilized = true;
  return ex;
}

IntegralExtrapolation extrapolate_singular_integral(const LineSystem& ls, const std::vector<double>& Ds,
                                                    const IntegralConfig& cfg) {
  std::vector<SingularIntegral> table;
  for (double D : Ds) table.push_back(truncated_singular_integral(ls, D, cfg));
  return extrapolate_table(ls.k(), std::move(table), ls.digest());
}

RealDensityCheck cross_check_real_density(const DensityEstimate& slab, const DensityEstimate& integral,
                                          double threshold) {
  if (slab.instance_digest.empty() || slab.instance_digest != integral.instance_digest)
    throw InvalidInput("real-density cross-check needs both estimates from the same instance");
  RealDensityCheck chk;
  chk.sigma_slab = slab.value;
  chk.I_extrapolated = integral.value;
  chk.threshold = threshold;
  const double denom = std::max(std::fabs(slab.value), std::fabs(integral.value));
  chk.rel_diff = denom == 0 ? 0.0 : std::fabs(slab.value - integral.value) / denom;
  chk.pass = chk.rel_diff <= threshold;
  return chk;
}

}  // namespace diagline
