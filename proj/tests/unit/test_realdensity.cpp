#include <doctest.h>

#include <cmath>

#include "diagline/errors.hpp"
#include "diagline/instance.hpp"
#include "diagline/realdensity.hpp"
#include "oracles.hpp"

using namespace diagline;

namespace {

const LineSystem chain = LineSystem::relaxed(1, {1, -1}, {1, 1});

SlabSampler grid(int nodes) {
  SlabSampler s;
  s.kind = SlabSampler::Kind::grid;
  s.nodes = nodes;
  return s;
}

SlabSampler mc(std::uint64_t n, std::uint64_t seed = 1) {
  SlabSampler s;
  s.samples = n;
  s.seed = seed;
  return s;
}

// int_{-D}^{D} (sin(2 pi t) / (pi t))^2 dt.
double sinc2(double D) {
  return oracle::simpson(
      [](double t) {
        if (t == 0) return 4.0;
        const double v = std::sin(2 * M_PI * t) / (M_PI * t);
        return v * v;
      },
      -D, D, 4'000'000);
}

}  // namespace

TEST_CASE("chain slab areas") {
  // Area of |z1 - z2| < eta in the square is 4 eta - eta^2.
  CHECK(slab_volume(chain, 0.5, grid(64)).value == doctest::Approx(1.75).epsilon(1e-12));
  for (double eta : {0.4, 0.2, 0.1, 0.05}) {
    CHECK(std::abs(slab_volume(chain, eta, grid(256)).value - (4 * eta - eta * eta)) < 1e-3 * eta);
    const auto m = slab_volume(chain, eta, mc(200000));
    CHECK(std::abs(m.value - (4 * eta - eta * eta)) <= 3 * m.error + 1e-12);
  }
}

TEST_CASE("full cube and scaling") {
  const auto q6 = preset_instance("quadratic6")->line_system();
  CHECK(slab_volume(q6, 1000, mc(10000)).value == doctest::Approx(64.0));
  CHECK(slab_volume(chain, 3, grid(16)).value == doctest::Approx(4.0));
  // Small eta: volume ~ eta^k, so halving eta divides it by about 2^k.
  const auto v = slab_volumes(q6, {0.02, 0.01}, mc(400000));
  CHECK(v[1].value / v[0].value == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("property: slab volumes are monotone in eta under common samples") {
  const auto fl = flagship_instance().line_system();
  const std::vector<double> etas = {0.4, 0.3, 0.2, 0.1, 0.05, 0.025};
  const auto vols = slab_volumes(fl, etas, mc(100000, 3));
  for (std::size_t i = 1; i < vols.size(); ++i) CHECK(vols[i].value <= vols[i - 1].value);
}

TEST_CASE("grid and Monte Carlo agree") {
  const auto ls = LineSystem::relaxed(2, {1, 2, -3}, {1, 1, 1});
  for (double eta : {0.3, 0.1}) {
    const auto g = slab_volume(ls, eta, grid(512));
    const auto m = slab_volume(ls, eta, mc(1000000, 5));
    CHECK(std::abs(g.value - m.value) <= 3 * (g.error + m.error) + 1e-9);
  }
}

TEST_CASE("property: permuting coordinates leaves the slab estimate unchanged") {
  const auto a = LineSystem::relaxed(2, {1, 1, 1, -1, -1, -1}, {1, 1, 1, 1, 1, 2});
  const auto b = LineSystem::relaxed(2, {-1, 1, -1, 1, -1, 1}, {2, 1, 1, 1, 1, 1});
  const auto fa = sigma_infinity_slab(a, {0.2, 0.1, 0.05}, mc(1000000, 9));
  const auto fb = sigma_infinity_slab(b, {0.2, 0.1, 0.05}, mc(1000000, 10));
  const double err = fa.g_error.back() + fb.g_error.back();
  CHECK(std::abs(fa.estimate.value - fb.estimate.value) <= 6 * err + 0.02 * fa.estimate.value);
}

TEST_CASE("chain intercept and wrong-regime rejection") {
  auto fit = sigma_infinity_slab(chain, {0.4, 0.2, 0.1}, grid(1000));
  CHECK(std::abs(fit.estimate.value - 2.0) < 1e-3);
  for (std::size_t i = 0; i < fit.g.size(); ++i) CHECK(std::abs(fit.g[i] - (2 - fit.etas[i] / 2)) < 1e-3);
  CHECK_FALSE(fit.rejected);
  auto mcfit = sigma_infinity_slab(chain, {0.4, 0.2, 0.1}, mc(1000000, 2));
  CHECK(std::abs(mcfit.estimate.value - 2.0) < 1e-3);

  auto cube = sigma_infinity_slab(chain, {40, 20, 10}, grid(64));
  CHECK(cube.rejected);

  // Doubling every eta keeps the intercept within the fit residual.
  const auto q6 = preset_instance("quadratic6")->line_system();
  auto f1 = sigma_infinity_slab(q6, {0.1, 0.05, 0.025}, mc(2000000, 4));
  auto f2 = sigma_infinity_slab(q6, {0.2, 0.1, 0.05}, mc(2000000, 4));
  CHECK(std::abs(f1.estimate.value - f2.estimate.value) <=
        0.05 * f1.estimate.value + 3 * (f1.g_error.back() + f2.g_error.back()));
  CHECK_THROWS_AS(sigma_infinity_slab(chain, {0.1, 0.2, 0.05}, grid(64)), InvalidInput);
  CHECK_THROWS_AS(sigma_infinity_slab(chain, {0.2, 0.1}, grid(64)), InvalidInput);
}

TEST_CASE("chain singular integral") {
  IntegralConfig cfg;
  cfg.abs_tol = 1e-6;
  const auto i20 = truncated_singular_integral(chain, 20, cfg);
  CHECK(std::abs(i20.value - sinc2(20)) < 1e-5);
  CHECK(std::abs(i20.imag) < 1e-8);
  cfg.use_symmetry = false;
  const auto full = truncated_singular_integral(chain, 20, cfg);
  CHECK(std::abs(full.value - i20.value) < 1e-5);
  CHECK(std::abs(full.imag) < 1e-8);

  const auto ext = extrapolate_singular_integral(chain, {16, 32}, IntegralConfig{});
  CHECK(std::abs(ext.estimate.value - 2.0) < 1e-3);
  CHECK(ext.table.size() == 2);
  CHECK_THROWS_AS(truncated_singular_integral(chain, 0.5, cfg), InvalidInput);
}

TEST_CASE("quadratic singular integral: symmetric and full domain agree") {
  const auto q6 = preset_instance("quadratic6")->line_system();
  IntegralConfig cfg;
  cfg.abs_tol = 1e-4;
  const auto half = truncated_singular_integral(q6, 2, cfg);
  cfg.use_symmetry = false;
  const auto full = truncated_singular_integral(q6, 2, cfg);
  CHECK(std::abs(half.value - full.value) < 5e-4);
  CHECK(std::abs(full.imag) < 1e-8 + 5e-4);
  cfg.adaptive_factors = true;
  cfg.use_symmetry = true;
  const auto adaptive = truncated_singular_integral(q6, 2, cfg);
  CHECK(std::abs(adaptive.value - half.value) < 5e-4);
}

TEST_CASE("Richardson step") {
  // I(D) = 5 - 3 D^{-1/2} is extrapolated exactly for k = 2.
  std::vector<SingularIntegral> t = {{4, 5 - 3 / 2.0, 0, 0}, {16, 5 - 3 / 4.0, 0, 0}};
  CHECK(extrapolate_table(2, t, "d").estimate.value == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("cross-check plumbing") {
  DensityEstimate a, b;
  a.value = 2.0;
  b.value = 2.001;
  a.instance_digest = b.instance_digest = "x";
  auto chk = cross_check_real_density(a, b, 1e-3);
  CHECK(chk.pass);
  CHECK(chk.rel_diff == doctest::Approx(0.001 / 2.001));
  b.instance_digest = "y";
  CHECK_THROWS_AS(cross_check_real_density(a, b), InvalidInput);
}
