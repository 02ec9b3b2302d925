// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// Exact distributions of partial sums S_n for centered finite-support
// integer-lattice laws: PMFs by convolution doubling, return probabilities
// by characteristic-function quadrature, exact two-sided tails, the exact
// two-sided Kolmogorov distance to the normal, and a Monte Carlo fallback.

#ifndef ASYMPTOTICA_DIST_HPP
#define ASYMPTOTICA_DIST_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "asymptotica/certified.hpp"

namespace asymptotica::dist {

/// Thrown when an exact computation would exceed the convolution ceiling.
class resource_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Atom {
  std::int64_t offset = 0;
  double prob = 0.0;
};

constexpr std::uint64_t kConvolutionCeiling = 1u << 17;

/// A law on a scaled integer lattice: X = scale * offset. Offsets are kept
/// both as given and in reduced form (divided by their gcd, with the gcd
/// absorbed into the effective scale) so that probability computations are
/// identical for rescaled copies of the same walk.
class LatticeDistribution {
 public:
  /// atoms: distinct offsets, probabilities > 0 summing to 1 within 1e-9
  /// (renormalized exactly). scale > 0.
  static LatticeDistribution create(std::vector<Atom> atoms,
                                    double scale = 1.0);
  static LatticeDistribution rademacher();  // -1, +1 each 1/2
  static LatticeDistribution uniform3();    // -1, 0, +1 each 1/3

  const std::vector<Atom>& atoms() const { return atoms_; }
  double scale() const { return scale_; }

  // reduced lattice (offset gcd divided out)
  const std::vector<Atom>& reduced_atoms() const { return reduced_; }
  double reduced_scale() const { return reduced_scale_; }

  double mean() const { return mean_; }          // physical units
  double variance() const { return variance_; }  // physical units
  double sigma() const { return sigma_; }
  double third_abs_moment() const { return third_abs_; }
  double sigma_reduced() const { return sigma_red_; }

  /// span of the reduced lattice: gcd of pairwise offset differences
  std::int64_t span() const { return span_; }
  /// common residue of offsets mod span
  std::int64_t residue() const { return residue_; }
  /// true when P(S_n = 0) can be nonzero (span divides n * residue)
  bool return_feasible(std::uint64_t n) const;
  /// step of the feasible-n progression (smallest q >= 1 with q*r = 0 mod d)
  std::uint64_t feasible_step() const;

  bool is_centered(double tol = 1e-12) const;
  bool is_two_point() const { return reduced_.size() == 2; }

  /// characteristic function of the reduced law
  std::complex<double> cf_reduced(double t) const;

  /// parseable description, e.g. "lattice:-1:0.5,1:0.5;scale=2"
  std::string repr() const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Atom> reduced_;
  double scale_ = 1.0, reduced_scale_ = 1.0;
  double mean_ = 0.0, variance_ = 0.0, sigma_ = 0.0, third_abs_ = 0.0;
  double sigma_red_ = 0.0;
  std::int64_t span_ = 1, residue_ = 0;
};

/// Exact PMF of S_n on the reduced lattice.
struct ExactSumDistribution {
  std::uint64_t n = 0;
  std::int64_t min_offset = 0;     // reduced units
  std::vector<double> pmf;         // pmf[i] = P(S_n = (min_offset + i))
  double scale = 1.0;              // physical value = scale * offset

  double mass() const;
  double at_offset(std::int64_t offset) const;
  /// P(|S_n| >= t) with t in physical units
  double tail_two_sided(double t) const;
};

/// Exact PMF of S_n by binary doubling of convolutions.
/// n must not exceed the ceiling (memory grows with n * offset range).
ExactSumDistribution convolve_power(const LatticeDistribution& d,
                                    std::uint64_t n,
                                    std::uint64_t ceiling = kConvolutionCeiling);

/// P(S_n = 0) by characteristic-function quadrature on the reduced lattice
/// (Gauss-Legendre panels, panel count scaled with sqrt(n)); exact zero for
/// infeasible n.
double pmf_at_zero(const LatticeDistribution& d, std::uint64_t n);

/// Exact P(|S_n| >= t), t in physical units. Closed binomial form for
/// two-point laws (any n); otherwise sums the exact PMF, so n must be
/// within the ceiling.
double tail_two_sided(const LatticeDistribution& d, std::uint64_t n, double t,
                      std::uint64_t ceiling = kConvolutionCeiling);

/// Exact two-sided Kolmogorov distance
///   sup_x | P(|S_n| >= sigma sqrt(n) x) - P(|N| >= x) |
/// by scanning both one-sided limits at every jump of |S_n|/(sigma sqrt n).
double kolmogorov_two_sided(const LatticeDistribution& d, std::uint64_t n,
                            std::uint64_t ceiling = kConvolutionCeiling);

/// Lambda_n for every n in [1, n_max] (one forward PMF sweep).
std::vector<double> kolmogorov_profile(const LatticeDistribution& d,
                                       std::uint64_t n_max);

/// The nonuniform Berry-Esseen shape C E|X|^3 / (sqrt(n) (1 + |x|^3)).
double nagaev_bound(std::uint64_t n, double x, double third_abs_moment,
                    double C);

/// Partial sum of the weighted Kolmogorov-distance series
///   sum_{n<=N} n^{delta/2 - 1} Lambda_n,  0 <= delta < 1.
double heyde_series_partial(const LatticeDistribution& d, double delta,
                            std::uint64_t N);

/// Monte Carlo estimate of P(|S_n| >= t) with standard error; deterministic
/// for a fixed seed.
CertifiedValue mc_tail(const LatticeDistribution& d, std::uint64_t n, double t,
                       std::uint64_t reps, std::uint64_t seed);

/// Distribution mini-language:
///   rademacher | uniform3 | lattice:o1:p1,o2:p2,...   [;scale=<real>]
LatticeDistribution parse_distribution(const std::string& spec);

}  // namespace asymptotica::dist

#endif  // ASYMPTOTICA_DIST_HPP
