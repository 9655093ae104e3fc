#include <doctest.h>

#include <cmath>

#include "diagline/errors.hpp"
#include "diagline/quadrature.hpp"

using namespace diagline;

TEST_CASE("polynomials and smooth functions") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-13;
  auto r = integrate_gk15([](double x) { return Complex(x * x * x * x, 0); }, -1, 2, 1, cfg);
  CHECK(std::abs(r.value - Complex(33.0 / 5, 0)) < 1e-13);
  r = integrate_gk15([](double x) { return Complex(std::cos(x), std::sin(x)); }, 0, M_PI, 1, cfg);
  CHECK(std::abs(r.value - Complex(0, 2)) < 1e-13);
  r = integrate_gk15([](double x) { return Complex(std::exp(-x * x), 0); }, std::vector<double>{-8, -1, 0, 1, 8}, cfg);
  CHECK(std::abs(r.value.real() - std::sqrt(M_PI)) < 1e-12);
}

TEST_CASE("adaptive refinement on a peaked integrand") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-10;
  auto r = integrate_gk15([](double x) { return Complex(1e-4 / (x * x + 1e-8), 0); }, -1, 1, 1, cfg);
  CHECK(std::abs(r.value.real() - 2 * 1e-4 / 1e-4 * std::atan(1e4)) < 1e-8);
  CHECK(r.panels > 10);
}

TEST_CASE("budget exhaustion reports the partial estimate") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-14;
  cfg.max_panels = 4;
  try {
    integrate_gk15([](double x) { return Complex(std::sin(200 * x), 0); }, 0, 10, 1, cfg);
    FAIL("expected QuadratureError");
  } catch (const QuadratureError& e) {
    CHECK(e.error_bound() > 1e-14);
  }
}
