// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// Self-contained special functions used throughout the library: the
// complementary error function, log-gamma, regularized incomplete gamma
// and beta functions, absolute moments of the standard normal, exact
// binomial tails, and the floored-log weight convention.
//
// Everything here is pure, deterministic and reentrant.

#ifndef ASYMPTOTICA_SPECFN_HPP
#define ASYMPTOTICA_SPECFN_HPP

#include <cstdint>

namespace asymptotica::specfn {

/// Which logarithm the series weights use.
///  - paper:   log n = ln(max(n, e)), so log 1 = log 2 = 1.
///  - pure_ln: log n = ln n, with the convention (log 1)^d = 0 for d > 0
///             and 1 for d = 0 where a weight (log n)^d is formed.
enum class LogConvention { paper, pure_ln };

/// Floored logarithm: ln(max(x, e)). Domain error for x <= 0.
double floored_log(double x);

/// ln(x) under the requested convention (floored or plain).
double log_conv(double x, LogConvention conv);

/// Weight factor (log n)^delta under the requested convention, including
/// the 0^0 = 1 rule for pure_ln at n = 1, delta = 0.
double log_pow_weight(double n, double delta, LogConvention conv);

/// Complementary error function, relative accuracy ~1e-15 on [0, 26],
/// underflowing smoothly to 0 past the double range (x ~ 26.6).
/// Rational minimax approximations on three ranges with switchovers at
/// x = 0.46875 and x = 4 (series-free; safe for negative x too).
double erfc(double x);

/// P(|N| >= x) for a standard normal N; equals erfc(x / sqrt(2)).
/// Domain error for x < 0.
double normal_tail_two_sided(double x);

/// ln Gamma(x) for x > 0 (Lanczos, ~1e-14 relative).
double log_gamma(double x);

/// E|N|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi) for p >= 0.
/// Evaluated through log_gamma so p up to a few hundred cannot overflow
/// intermediates.
double abs_normal_moment(double p);

/// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x)/Gamma(s),
/// s > 0, x >= 0. Series for x < s + 1, continued fraction otherwise.
double upper_incomplete_gamma_reg(double s, double x);

/// Regularized lower incomplete gamma P(s, x) = 1 - Q(s, x), computed
/// directly (not as a complement) so it is accurate when small.
double lower_incomplete_gamma_reg(double s, double x);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta_reg(double a, double b, double x);

/// P(Bin(n, p) >= k). Accepts any integer k (k <= 0 gives 1, k > n gives
/// 0); exact to ~1e-14 relative via the incomplete beta identity.
double binomial_tail_geq(std::uint64_t n, double p, std::int64_t k);

/// P(Bin(n, p) = k) through log-gamma, safe for large n.
double binomial_pmf(std::uint64_t n, double p, std::int64_t k);

}  // namespace asymptotica::specfn

#endif  // ASYMPTOTICA_SPECFN_HPP
