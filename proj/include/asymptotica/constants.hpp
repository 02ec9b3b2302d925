// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// The two limit constants of the weighted-series analysis, each with a
// certified absolute error bound:
//
//   gamma_delta = lim_n [ sum_{j<=n} (log j)^delta / j
//                          - (log n)^{delta+1} / (delta+1) ]
//   eta_delta   = sum_{n>=1} (log n)^delta / n * P(S_n = 0)
//
// gamma uses direct summation plus the first Euler-Maclaurin endpoint
// correction and a monotonicity remainder bound. eta sums an exact head
// and closes the tail analytically: for two-point laws through a rigorous
// Stirling sandwich of the binomial return probability (tight, reaches
// 1e-8 and beyond), otherwise through a characteristic-function envelope
// (rigorous but coarse, typically ~1e-2 at the default head size).

#ifndef ASYMPTOTICA_CONSTANTS_HPP
#define ASYMPTOTICA_CONSTANTS_HPP

#include "asymptotica/certified.hpp"
#include "asymptotica/dist.hpp"
#include "asymptotica/specfn.hpp"

namespace asymptotica::constants {

using specfn::LogConvention;

/// Partial constant: sum_{j<=n} (log j)^delta / j - (log n)^{delta+1}/(delta+1).
double gamma_n_delta(std::uint64_t n, double delta,
                     LogConvention conv = LogConvention::paper);

/// Certified limit of gamma_n_delta. Throws tolerance_error when the
/// required summation length exceeds the ceiling.
CertifiedValue gamma_delta(double delta, double tol,
                           LogConvention conv = LogConvention::paper,
                           std::uint64_t n_ceiling = (1ull << 31));

/// Certified eta_delta for a centered lattice law.
CertifiedValue eta_delta(const dist::LatticeDistribution& d, double delta,
                         double tol,
                         LogConvention conv = LogConvention::paper,
                         std::uint64_t head_ceiling = (1ull << 22));

/// Closed-form helper shared with the series tails:
///   integral_N^inf (ln x)^delta x^(-s) dx,  s > 1, N >= 3.
double log_power_integral(double N, double delta, double s);

}  // namespace asymptotica::constants

#endif  // ASYMPTOTICA_CONSTANTS_HPP
