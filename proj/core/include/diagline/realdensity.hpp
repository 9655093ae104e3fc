#pragma once

// The real density: slab volumes M_inf(eta) extrapolated to eta -> 0, and the
// truncated singular integral I(D) over [-D, D]^k in theta.

#include <cstdint>
#include <string>
#include <vector>

#include "diagline/core.hpp"
#include "diagline/localdensity.hpp"
#include "diagline/quadrature.hpp"

namespace diagline {

struct SlabSampler {
  enum class Kind { montecarlo, grid } kind = Kind::montecarlo;
  std::uint64_t samples = 1'000'000;  // montecarlo
  std::uint64_t seed = 1;
  int nodes = 64;                     // grid nodes per axis (s - 1 axes)
  double grid_budget = 5e7;
  unsigned threads = 0;
};

struct SlabVolume {
  double eta = 0.0;
  double value = 0.0;
  double error = 0.0;  // standard error (montecarlo) or refinement delta (grid)
};

// Volume of {z in [-1, 1]^s : |sum_i A[j][i] z_i^j| < eta for all j}. One
// coordinate is integrated exactly; the other s - 1 are sampled.
SlabVolume slab_volume(const LineSystem& ls, double eta, const SlabSampler& sampler = {});
// Same samples for every eta (common random numbers).
std::vector<SlabVolume> slab_volumes(const LineSystem& ls, const std::vector<double>& etas,
                                     const SlabSampler& sampler = {});

struct SlabFit {
  DensityEstimate estimate;  // value = intercept, error_indicator = RMS residual
  std::vector<double> etas, g, g_error;
  double slope = 0.0;
  bool rejected = false;
};

// Fits g(eta) = (2 eta)^{-k} M_inf(eta) ~ sigma + c eta. Rejects full-cube
// saturation and fits whose relative RMS residual exceeds `max_residual`.
SlabFit sigma_infinity_slab(const LineSystem& ls, const std::vector<double>& etas, const SlabSampler& sampler = {},
                            double max_residual = 0.05);

struct SingularIntegral {
  double D = 0.0;
  double value = 0.0;
  double imag = 0.0;
  double error_indicator = 0.0;
};

struct IntegralConfig {
  double abs_tol = 1e-6;      // global; split evenly across the k axes
  QuadratureConfig inner{};   // for each factor I(theta; 1)
  int max_panels = 20000;     // per axis
  bool use_symmetry = true;   // integrate theta_k >= 0 only; imag is then 0
  bool adaptive_factors = false;  // factors by adaptive GK instead of Gauss-Legendre
};

// I(D) = int_{[-D, D]^k} prod_i I(c_i beta(theta; y_i); 1) d theta. k <= 4.
SingularIntegral truncated_singular_integral(const LineSystem& ls, double D, const IntegralConfig& cfg = {});

struct IntegralExtrapolation {
  DensityEstimate estimate;  // value = extrapolated I_inf
  std::vector<SingularIntegral> table;
};

// Richardson step on the last two D values with tail c D^{-1/k}.
IntegralExtrapolation extrapolate_singular_integral(const LineSystem& ls, const std::vector<double>& Ds,
                                                    const IntegralConfig& cfg = {});
IntegralExtrapolation extrapolate_table(int k, std::vector<SingularIntegral> table, const std::string& digest);

struct RealDensityCheck {
  double sigma_slab = 0.0;
  double I_extrapolated = 0.0;
  double rel_diff = 0.0;
  double threshold = 0.05;
  bool pass = false;
};

// Refuses estimates computed on different instances.
RealDensityCheck cross_check_real_density(const DensityEstimate& slab, const DensityEstimate& integral,
                                          double threshold = 0.05);

}  // namespace diagline
