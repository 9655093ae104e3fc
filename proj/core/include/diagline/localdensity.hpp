#pragma once

// p-adic densities: residue counts M_p(h), the sequence p^{h(k-s)} M_p(h),
// the complete-sum route A(q), truncated singular series and Hensel witnesses.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diagline/bigint.hpp"
#include "diagline/core.hpp"

namespace diagline {

bool is_prime(std::int64_t n);

enum class ModCountMethod {
  automatic,  // raw for tiny boxes, then the residue histogram, then lifting
  raw,        // walk all of (Z/p^h)^s
  lifting,    // depth-first lifting of solutions mod p^l to p^{l+1}
  histogram   // dynamic programme over coordinates on the key space (Z/p^h)^k
};

struct ModCountOptions {
  ModCountMethod method = ModCountMethod::automatic;
  double raw_budget = 1e8;        // residue tuples
  double lifting_budget = 5e7;    // explicitly visited solutions
  double state_budget = 4e6;      // histogram key space p^{hk}
};

// M_p(h); M_p(0) = 1.
BigInt count_mod(const LineSystem& ls, std::int64_t p, int h, const ModCountOptions& opt = {});

struct HenselWitness {
  std::int64_t p = 0;
  unsigned nu = 0;                 // 2 v, v = min valuation of the k x k minors
  unsigned minor_valuation = 0;
  int depth = 0;                   // z solves the system mod p^depth
  std::vector<std::int64_t> z;     // residues mod p^depth
  bool certified = false;          // depth >= 2 v + 1
};

struct HenselOptions {
  double base_budget = 5e7;  // residue tuples mod p, scanned by growing support
  int max_roots = 256;       // singular zeros mod p that are lifted further
  int max_children = 64;     // lifts kept per expanded node
  double node_budget = 2e4;  // expanded nodes
};

// Scans zeros mod p by growing support; one with a full-rank Jacobian mod p
// is certified at once. Otherwise lifts the best-ranked zeros towards
// p^m, always expanding the node of smallest minor valuation. Returns the first certified witness, else the depth-m solution with
// the smallest minor valuation (uncertified), else nullopt.
std::optional<HenselWitness> hensel_witness(const LineSystem& ls, std::int64_t p, int m,
                                            const HenselOptions& opt = {});

enum class DensityRoute { residue_count, series, slab, singular_integral };
std::string to_string(DensityRoute r);

struct DensityEstimate {
  double value = 0.0;
  DensityRoute route = DensityRoute::residue_count;
  std::int64_t p = 0;
  int h = 0;
  double D = 0.0;
  bool stabilized = false;
  double error_indicator = 0.0;
  double imag = 0.0;                 // series route: imaginary residue
  std::vector<double> sequence;      // d_h for h = 1..h_max, or partial sums
  std::vector<BigInt> counts;        // M_p(h) for h = 1..h_max
  std::optional<HenselWitness> witness;
  double comparison = 0.0;           // series route: p^{H(k-s)} M_p(H)
  std::string instance_digest;
  std::string note;
};

// d_h = p^{h(k-s)} M_p(h) for h <= h_max. Stabilized iff the last two agree
// to relative 1e-9 and a certified witness with nu + 1 <= h_max exists.
DensityEstimate sigma_p_estimate(const LineSystem& ls, std::int64_t p, int h_max, const ModCountOptions& opt = {});

struct SeriesOptions {
  double tuple_budget = 2e7;  // a-tuples per A(q)
  unsigned threads = 0;
};

// A(q) = sum over a mod q with gcd(q, a) = 1 of q^{-s} prod_i S(q, c_i beta(a; y_i)).
std::complex<double> a_of_q(const LineSystem& ls, std::int64_t q, const SeriesOptions& opt = {});

// S(D) = sum_{q <= D} A(q). sequence holds the partial sums.
DensityEstimate truncated_singular_series(const LineSystem& ls, std::int64_t D, const SeriesOptions& opt = {});

// sum_{h=0..H} A(p^h), checked against p^{H(k-s)} M_p(H); throws
// ConsistencyError if they differ by more than 1e-6.
DensityEstimate sigma_p_via_series(const LineSystem& ls, std::int64_t p, int H, const SeriesOptions& opt = {},
                                   const ModCountOptions& mod = {});

}  // namespace diagline
