// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// Bulk arithmetic kernels behind the series and distribution code.
//
// Every kernel exists in a scalar reference form and (on x86-64) an AVX2
// variant; the active variant is chosen once at startup from CPU features
// and can be forced with the ASYMPTOTICA_ISA environment variable
// ("scalar" or "avx2"). Variants are equivalence-tested against each
// other; they agree to ~1e-13 relative, not bitwise.
//
// Summation kernels are deterministic for a fixed variant: the index range
// is cut into fixed-size blocks, each block is accumulated with Kahan
// compensation, and block results are combined in index order no matter
// how many threads ran. ASYMPTOTICA_THREADS caps the worker count.

#ifndef ASYMPTOTICA_KERNELS_HPP
#define ASYMPTOTICA_KERNELS_HPP

#include <cstddef>
#include <cstdint>

#include "asymptotica/specfn.hpp"

namespace asymptotica::kernels {

enum class Isa { scalar, avx2 };

/// Variant selected for this process (honors ASYMPTOTICA_ISA).
Isa active_isa();
bool isa_available(Isa isa);
const char* isa_name(Isa isa);

/// Worker count for blocked sums (>= 1; honors ASYMPTOTICA_THREADS).
unsigned thread_count();

// --- weighted series sums (all ranges are [begin, end), 1-based n) ---

/// sum of (log j)^delta / j
double log_weight_sum(std::uint64_t begin, std::uint64_t end, double delta,
                      specfn::LogConvention conv, Isa isa);

/// sum of (log n)^delta / n * P(|N| >= eps * sqrt(log n))
double normal_series_sum(std::uint64_t begin, std::uint64_t end, double delta,
                         double eps, specfn::LogConvention conv, Isa isa);

/// sum of P(|N| >= c * sqrt(n))
double sqrt_arg_tail_sum(std::uint64_t begin, std::uint64_t end, double c,
                         Isa isa);

/// sum of (ln(q m))^delta * (q m)^(-s) over m in [begin, end); requires
/// q * begin >= 3 so the plain logarithm is the weight.
double log_power_sum(std::uint64_t begin, std::uint64_t end, double q,
                     double delta, double s, Isa isa);

// --- elementwise batches (used by scans and by the equivalence tests) ---

void erfc_batch(const double* x, double* out, std::size_t n, Isa isa);
void exp_batch(const double* x, double* out, std::size_t n, Isa isa);
/// inputs must be positive normal doubles
void log_batch(const double* x, double* out, std::size_t n, Isa isa);

// --- array plumbing ---

/// dst[i] += a * src[i]
void axpy(double* dst, const double* src, std::size_t n, double a, Isa isa);

/// dst[0 .. na+nb-2] = full convolution of a and b (dst must be zeroed).
void convolve_accumulate(const double* a, std::size_t na, const double* b,
                         std::size_t nb, double* dst, Isa isa);

// Convenience overloads using the active variant.
inline double log_weight_sum(std::uint64_t b, std::uint64_t e, double d,
                             specfn::LogConvention c) {
  return log_weight_sum(b, e, d, c, active_isa());
}
inline double normal_series_sum(std::uint64_t b, std::uint64_t e, double d,
                                double eps, specfn::LogConvention c) {
  return normal_series_sum(b, e, d, eps, c, active_isa());
}
inline double sqrt_arg_tail_sum(std::uint64_t b, std::uint64_t e, double c) {
  return sqrt_arg_tail_sum(b, e, c, active_isa());
}
inline double log_power_sum(std::uint64_t b, std::uint64_t e, double q,
                            double d, double s) {
  return log_power_sum(b, e, q, d, s, active_isa());
}
inline void axpy(double* dst, const double* src, std::size_t n, double a) {
  axpy(dst, src, n, a, active_isa());
}
inline void convolve_accumulate(const double* a, std::size_t na,
                                const double* b, std::size_t nb, double* dst) {
  convolve_accumulate(a, na, b, nb, dst, active_isa());
}

}  // namespace asymptotica::kernels

#endif  // ASYMPTOTICA_KERNELS_HPP
