#pragma once

// Adaptive 15-point Gauss-Kronrod quadrature for smooth complex integrands.

#include <complex>
#include <functional>
#include <vector>

namespace diagline {

using Complex = std::complex<double>;

struct QuadratureConfig {
  double abs_tol = 1e-10;
  int max_panels = 200000;
  // Initial panels per unit of phase variation (oscillations).
  double panels_per_cycle = 2.0;
};

struct QuadratureResult {
  Complex value;
  double error = 0.0;  // sum of |K15 - G7| over the final panels
  int panels = 0;
};

// Integrates f over [a, b], starting from `initial` equal panels and
// bisecting the worst panel until the summed error estimate is <= abs_tol.
// Throws QuadratureError when max_panels is reached first.
QuadratureResult integrate_gk15(const std::function<Complex(double)>& f, double a, double b, int initial,
                                const QuadratureConfig& cfg);

// Same, starting from the panels between consecutive sorted breakpoints.
QuadratureResult integrate_gk15(const std::function<Complex(double)>& f, const std::vector<double>& breaks,
                                const QuadratureConfig& cfg);

}  // namespace diagline
