#include <doctest.h>

#include <cmath>
#include <random>

#include "diagline/expsum.hpp"
#include "diagline/errors.hpp"
#include "oracles.hpp"

using namespace diagline;

namespace {

double dist(Complex a, Complex b) { return std::abs(a - b); }

double mod1_distance(double x) {
  const double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

}  // namespace

TEST_CASE("Weyl sum examples") {
  CHECK(dist(weyl_sum(std::vector<double>{0.0, 0.0}, 7), Complex(15, 0)) < 1e-12);
  CHECK(dist(weyl_sum(std::vector<double>{0.25}, 1), Complex(1, 0)) < 1e-12);
  CHECK(dist(weyl_sum(std::vector<double>{0.0, 0.5}, 2), Complex(1, 0)) < 1e-12);
}

TEST_CASE("property: Weyl sums match direct summation, conjugate symmetry and the trivial bound") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const int k = 1 + static_cast<int>(rng() % 4);
    const std::int64_t X = 1 + static_cast<std::int64_t>(rng() % 300);
    std::vector<double> a(k), neg(k);
    for (int j = 0; j < k; ++j) {
      a[j] = u(rng);
      neg[j] = 1.0 - a[j];
    }
    const Complex f = weyl_sum(a, X);
    CHECK(dist(f, oracle::weyl(a, X)) < 1e-9 * (2 * X + 1));
    // 1 - a_j carries a rounding error of order 1e-16, amplified by x^k.
    CHECK(dist(f, std::conj(weyl_sum(neg, X))) < (1e-9 + 1e-14 * std::pow(X, k)) * (2 * X + 1));
    CHECK(std::abs(f) <= 2 * X + 1 + 1e-9);
  }
}

TEST_CASE("complete sums") {
  CHECK(dist(complete_sum(1, std::vector<std::int64_t>{5, 7}), Complex(1, 0)) < 1e-15);
  CHECK(dist(complete_sum(2, std::vector<std::int64_t>{1}), Complex(0, 0)) < 1e-15);
  CHECK(dist(complete_sum(3, std::vector<std::int64_t>{0, 1}), Complex(0, std::sqrt(3.0))) < 1e-12);

  std::mt19937_64 rng(4);
  for (int t = 0; t < 300; ++t) {
    const std::int64_t q = 1 + static_cast<std::int64_t>(rng() % 60);
    const int k = 1 + static_cast<int>(rng() % 4);
    std::vector<std::int64_t> a(k);
    for (auto& x : a) x = static_cast<std::int64_t>(rng() % 1000) - 500;
    const Complex s = complete_sum(q, a);
    CHECK(dist(s, oracle::complete(q, a)) < 1e-10 * q);
    CHECK(std::abs(s) <= q + 1e-9);
    std::vector<std::int64_t> multiple(k);
    for (int j = 0; j < k; ++j) multiple[j] = q * (a[j] % 7);
    CHECK(dist(complete_sum(q, multiple), Complex(static_cast<double>(q), 0)) < 1e-9);
  }
  // Large twists stay exact.
  std::vector<BigInt> big = {BigInt("123456789012345678901234567890"), BigInt(1)};
  std::vector<std::int64_t> reduced = {static_cast<std::int64_t>(big[0] % 97), 1};
  CHECK(dist(complete_sum(97, big), complete_sum(97, reduced)) < 1e-12);
}

TEST_CASE("twisted arguments") {
  TwistedArgument t({0.25, 0.5, 0.75}, 2, -3);
  const auto raw = t.unreduced();
  CHECK(raw[0] == doctest::Approx(-3 * 4 * 0.25));
  CHECK(raw[1] == doctest::Approx(-3 * 2 * 0.5));
  CHECK(raw[2] == doctest::Approx(-3 * 0.75));
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(t.beta()[j] >= 0.0);
    CHECK(t.beta()[j] < 1.0);
    CHECK(mod1_distance(t.beta()[j] - raw[j]) < 1e-12);
  }
  const auto ints = twist_integers(std::vector<std::int64_t>{1, 2, 3}, 2, -3);
  CHECK(ints[0] == -12);
  CHECK(ints[1] == -12);
  CHECK(ints[2] == -9);
}

TEST_CASE("oscillatory integral") {
  const QuadratureConfig cfg;
  CHECK(dist(oscillatory_integral(std::vector<double>{0.0, 0.0}, 3, cfg), Complex(6, 0)) < 1e-10);
  CHECK(std::abs(oscillatory_integral(std::vector<double>{1.0}, 1, cfg)) < 1e-10);
  const std::vector<double> fres = {0.0, 1.0};
  CHECK(dist(oscillatory_integral(fres, 1, cfg), oracle::oscillatory(fres, 1)) < 1e-8);

  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (int t = 0; t < 40; ++t) {
    const int k = 1 + static_cast<int>(rng() % 3);
    std::vector<double> th(k), neg(k);
    for (int j = 0; j < k; ++j) neg[j] = -(th[j] = u(rng));
    const Complex v = oscillatory_integral(th, 1, cfg);
    CHECK(dist(v, oracle::oscillatory(th, 1, 200'000)) < 1e-8);
    CHECK(dist(v, std::conj(oscillatory_integral(neg, 1, cfg))) < 1e-9);
    CHECK(dist(v, oscillatory_integral_gl(th, 1)) < 1e-12);
    CHECK(std::abs(v) <= 2 + 1e-9);
  }
}

TEST_CASE("oscillatory integral decay on a fixed grid") {
  for (int k = 1; k <= 3; ++k) {
    for (double r : {0.5, 2.0, 8.0, 32.0, 128.0}) {
      for (int dir = 0; dir < 4; ++dir) {
        std::vector<double> th(k);
        for (int j = 0; j < k; ++j) th[j] = r * std::cos(dir + 1.7 * j) / k;
        double l1 = 0;
        for (double x : th) l1 += std::abs(x);
        CHECK(std::abs(oscillatory_integral(th, 1)) <= 5 * std::pow(1 + l1, -1.0 / k));
      }
    }
  }
}

TEST_CASE("major arc approximant") {
  const auto ls = LineSystem::relaxed(2, {1, -1}, {1, 1});
  const std::vector<double> zero = {0.0, 0.0};
  CHECK(dist(major_arc_approx(ls, 0, zero, 1, std::vector<std::int64_t>{0, 0}, 50), Complex(100, 0)) < 1e-9);
  const std::vector<double> alpha = {0.0, 1.0 / 3.0};
  const Complex v = major_arc_approx(ls, 0, alpha, 3, std::vector<std::int64_t>{0, 1}, 10);
  CHECK(dist(v, Complex(0, std::sqrt(3.0) / 3 * 20)) < 1e-9);
  const std::vector<double> a = {0.01, -0.002};
  CHECK(dist(major_arc_approx(ls, 0, a, 1, std::vector<std::int64_t>{0, 0}, 40), oscillatory_integral(a, 40)) < 1e-9);
  CHECK(dist(twisted_weyl_sum(ls, 0, a, 40), weyl_sum(std::vector<double>{0.01, 1 - 0.002}, 40)) < 1e-9);
}

TEST_CASE("approximation error scan") {
  const auto ls = LineSystem::relaxed(3, {1, -1}, {1, 1});
  auto centre = approx_error_scan(ls, 0, 1, std::vector<std::int64_t>{0, 0, 0}, 100, 4, 1, 1);
  CHECK(centre.max_abs_error == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(centre.max_ratio == doctest::Approx(1.0).epsilon(1e-9));
  auto off = approx_error_scan(ls, 0, 2, std::vector<std::int64_t>{0, 0, 1}, 50, 4, 1, 1);
  CHECK(std::isfinite(off.max_ratio));
  CHECK(off.samples == 1);
}

TEST_CASE("arc classifier") {
  ArcParameters p{1e4, 5, 125, ""};
  auto lab = classify_arc(std::vector<double>{0, 0, 0}, p);
  CHECK(lab.cls == ArcClass::W4);
  REQUIRE(lab.witness);
  CHECK(lab.witness->q == 1);

  lab = classify_arc(std::vector<double>{0, 0, 0.5}, p);
  CHECK(lab.cls == ArcClass::W4);
  REQUIRE(lab.witness);
  CHECK(lab.witness->q == 2);
  CHECK(lab.witness->a == std::vector<std::int64_t>{0, 0, 1});
  REQUIRE(lab.one_dim);
  CHECK(lab.one_dim->q == 2);

  const double phi = (1 + std::sqrt(5.0)) / 2;
  lab = classify_arc(std::vector<double>{0, 0, phi - 1}, p);
  CHECK(lab.cls == ArcClass::W1);
  CHECK_FALSE(one_dim_major_arc(phi - 1, 3, 1e4, 125, true));
  CHECK_FALSE(one_dim_major_arc(phi - 1, 3, 1e4, 125, false));

  auto defaults = default_arc_parameters(3, 1e4);
  CHECK(defaults.L == doctest::Approx(std::pow(1e4, 1.0 / 72)));
  CHECK_FALSE(defaults.warning.empty());
  CHECK_THROWS_AS(classify_arc(std::vector<double>{0, 0}, ArcParameters{10, 20, 1, ""}), InvalidInput);
}

TEST_CASE("property: arc labels are consistent with their witnesses") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 400; ++t) {
    const int k = 2 + static_cast<int>(rng() % 2);
    const double X = k == 2 ? 400 : 60;
    ArcParameters p{X, 3, std::pow(3.0, k), ""};
    std::vector<double> a(k);
    // Half of the points sit near a rational with small denominator.
    if (t % 2) {
      const std::int64_t q = 1 + static_cast<std::int64_t>(rng() % 4);
      for (int j = 0; j < k; ++j)
        a[j] = std::fmod(static_cast<double>(rng() % q) / q + (u(rng) - 0.5) * 2 * std::pow(X, -(j + 1)) + 1, 1.0);
    } else {
      for (auto& x : a) x = u(rng);
    }
    const auto lab = classify_arc(a, p);
    if (lab.cls == ArcClass::W4) {
      REQUIRE(lab.witness);
      const auto& w = *lab.witness;
      CHECK(w.q <= p.L);
      for (int j = 0; j < k; ++j)
        CHECK(mod1_distance(a[j] - static_cast<double>(w.a[j]) / w.q) <= p.L * std::pow(X, -(j + 1)) * (1 + 1e-9));
      // P is inside K(Q^2).
      CHECK(joint_major_arc(a, X, p.Q * p.Q));
    }
    if (lab.cls == ArcClass::W3) CHECK(joint_major_arc(a, X, p.Q * p.Q));
    if (lab.cls == ArcClass::W1) CHECK_FALSE(one_dim_major_arc(a[k - 1], k, X, p.Q, true));
    if (lab.cls != ArcClass::W1) CHECK(one_dim_major_arc(a[k - 1], k, X, p.Q, true));
  }
}
