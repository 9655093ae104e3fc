#pragma once

// Weyl sums, complete rational sums, the oscillatory integral I(theta; X),
// the major-arc approximant and the four-way arc classifier.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diagline/core.hpp"
#include "diagline/quadrature.hpp"

namespace diagline {

// beta_j = c * y^(k-j) * alpha_j, reduced mod 1.
struct TwistedArgument {
  std::vector<double> alpha;
  std::int64_t y = 1;
  std::int64_t c = 1;

  TwistedArgument(std::vector<double> alpha, std::int64_t y, std::int64_t c);
  int k() const noexcept { return static_cast<int>(alpha.size()); }
  std::vector<double> beta() const;
  // Same products without the mod-1 reduction (for integrals).
  std::vector<double> unreduced() const;
};

// Integer twist c * y^(k-j) * a_j, exactly.
std::vector<BigInt> twist_integers(std::span<const std::int64_t> a, std::int64_t y, std::int64_t c);

// sum_{|x| <= X} e(alpha_1 x + ... + alpha_k x^k).
Complex weyl_sum(std::span<const double> alpha, std::int64_t X);

// sum_{r=1..q} e((a_1 r + ... + a_k r^k) / q), phases reduced exactly mod q.
Complex complete_sum(std::int64_t q, std::span<const BigInt> a);
Complex complete_sum(std::int64_t q, std::span<const std::int64_t> a);

// I(theta; X) = int_{-X}^{X} e(theta_1 g + ... + theta_k g^k) dg.
Complex oscillatory_integral(std::span<const double> theta, double X, const QuadratureConfig& cfg = {});

// Same integral by one fixed Gauss-Legendre rule whose size follows the
// largest phase derivative. Much cheaper than the adaptive route for
// moderate |theta|; used inside the singular integral.
Complex oscillatory_integral_gl(std::span<const double> theta, double X);

// V_i = q^{-1} S(q, c_i beta(a; y_i)) I(c_i beta(alpha - a/q; y_i); X).
Complex major_arc_approx(const LineSystem& ls, int i, std::span<const double> alpha, std::int64_t q,
                         std::span<const std::int64_t> a, std::int64_t X, const QuadratureConfig& cfg = {});

// f(c_i beta(alpha; y_i); X), the generating function of variable i.
Complex twisted_weyl_sum(const LineSystem& ls, int i, std::span<const double> alpha, std::int64_t X);

struct ApproxErrorReport {
  double max_abs_error = 0.0;
  double bound_value = 0.0;  // max of q + sum_j X^j |q alpha_j - a_j|
  double max_ratio = 0.0;    // max of error / bound over the samples
  int samples = 0;
};

// Samples alpha uniformly in P(q, a) (half-width L X^{-j}); sample 0 is the
// centre a/q.
ApproxErrorReport approx_error_scan(const LineSystem& ls, int i, std::int64_t q, std::span<const std::int64_t> a,
                                    std::int64_t X, double L, int samples, std::uint64_t seed,
                                    const QuadratureConfig& cfg = {});

enum class ArcClass { W1, W2, W3, W4 };
std::string to_string(ArcClass c);

struct ArcWitness {
  std::int64_t q = 1;
  std::vector<std::int64_t> a;  // reduced mod q
};

struct ArcParameters {
  double X = 1, L = 1, Q = 1;
  std::string warning;
};

// L = X^{1/(8k^2)}, Q = L^k; warns when L < 2.
ArcParameters default_arc_parameters(int k, double X);

struct ArcLabel {
  ArcClass cls = ArcClass::W1;
  std::optional<ArcWitness> witness;      // P witness (W4) or K(Q^2) witness (W3)
  std::optional<ArcWitness> one_dim;      // M(Q) witness on alpha_k
  ArcParameters params;
};

// Smallest q <= Z with a coprime a such that |alpha_j - a_j/q| <= Z X^{-j} for all j.
std::optional<ArcWitness> joint_major_arc(std::span<const double> alpha, double X, double Z);

// Some q <= Q with |q alpha - a| <= Q X^{-k}. Convergent search unless
// `exhaustive`, which scans q = 1..Q.
std::optional<ArcWitness> one_dim_major_arc(double alpha, int k, double X, double Q, bool exhaustive = false);

ArcLabel classify_arc(std::span<const double> alpha, const ArcParameters& params);

}  // namespace diagline
