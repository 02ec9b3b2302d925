// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0

#include "asymptotica/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "kernels_internal.hpp"

namespace asymptotica::kernels {

namespace avx2 {
// Implemented in kernels_avx2.cpp when built; declarations here so the
// dispatcher links either way.
double log_weight_sum(std::uint64_t, std::uint64_t, double,
                      specfn::LogConvention);
double normal_series_sum(std::uint64_t, std::uint64_t, double, double,
                         specfn::LogConvention);
double sqrt_arg_tail_sum(std::uint64_t, std::uint64_t, double);
double log_power_sum(std::uint64_t, std::uint64_t, double, double, double);
void erfc_batch(const double*, double*, std::size_t);
void exp_batch(const double*, double*, std::size_t);
void log_batch(const double*, double*, std::size_t);
void axpy(double*, const double*, std::size_t, double);
void convolve_accumulate(const double*, std::size_t, const double*,
                         std::size_t, double*);
}  // namespace avx2

namespace {

bool avx2_supported() {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa pick_isa() {
  if (const char* env = std::getenv("ASYMPTOTICA_ISA")) {
    std::string s(env);
    if (s == "scalar") return Isa::scalar;
    if (s == "avx2") {
      if (!avx2_supported())
        throw std::runtime_error("ASYMPTOTICA_ISA=avx2 but AVX2 unavailable");
      return Isa::avx2;
    }
  }
  return avx2_supported() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = pick_isa();
  return isa;
}

bool isa_available(Isa isa) {
  return isa == Isa::scalar || avx2_supported();
}

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

unsigned thread_count() {
  static const unsigned n = [] {
    unsigned hw = std::thread::hardware_concurrency();
    unsigned def = hw == 0 ? 1u : (hw > 8 ? 8u : hw);
    if (const char* env = std::getenv("ASYMPTOTICA_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 1 && static_cast<unsigned>(v) < def)
        def = static_cast<unsigned>(v);
    }
    return def;
  }();
  return n;
}

namespace {

using detail::blocked_sum;
using detail::scalar_block;

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

double log_weight_sum(std::uint64_t begin, std::uint64_t end, double delta,
                      specfn::LogConvention conv, Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::log_weight_sum(begin, end, delta, conv);
#endif
  (void)isa;
  return blocked_sum(begin, end, [&](std::uint64_t b0, std::uint64_t b1) {
    return scalar_block(b0, b1, [&](std::uint64_t j) {
      double n = static_cast<double>(j);
      return specfn::log_pow_weight(n, delta, conv) / n;
    });
  });
}

double normal_series_sum(std::uint64_t begin, std::uint64_t end, double delta,
                         double eps, specfn::LogConvention conv, Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2)
    return avx2::normal_series_sum(begin, end, delta, eps, conv);
#endif
  (void)isa;
  return blocked_sum(begin, end, [&](std::uint64_t b0, std::uint64_t b1) {
    return scalar_block(b0, b1, [&](std::uint64_t j) {
      double n = static_cast<double>(j);
      double l = specfn::log_conv(n, conv);
      double w = specfn::log_pow_weight(n, delta, conv) / n;
      // pure_ln, n = 1: threshold 0, P(|N| >= 0) = 1
      double tail = l <= 0.0 ? 1.0 : specfn::erfc(eps * std::sqrt(l) * kInvSqrt2);
      return w * tail;
    });
  });
}

double sqrt_arg_tail_sum(std::uint64_t begin, std::uint64_t end, double c,
                         Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::sqrt_arg_tail_sum(begin, end, c);
#endif
  (void)isa;
  return blocked_sum(begin, end, [&](std::uint64_t b0, std::uint64_t b1) {
    return scalar_block(b0, b1, [&](std::uint64_t j) {
      return specfn::erfc(c * std::sqrt(static_cast<double>(j)) * kInvSqrt2);
    });
  });
}

double log_power_sum(std::uint64_t begin, std::uint64_t end, double q,
                     double delta, double s, Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::log_power_sum(begin, end, q, delta, s);
#endif
  (void)isa;
  return blocked_sum(begin, end, [&](std::uint64_t b0, std::uint64_t b1) {
    return scalar_block(b0, b1, [&](std::uint64_t j) {
      double x = q * static_cast<double>(j);
      double lx = std::log(x);
      double w = delta == 0.0 ? 1.0 : (delta == 1.0 ? lx : std::pow(lx, delta));
      return w * std::pow(x, -s);
    });
  });
}

void erfc_batch(const double* x, double* out, std::size_t n, Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::erfc_batch(x, out, n);
#endif
  (void)isa;
  for (std::size_t i = 0; i < n; ++i) out[i] = specfn::erfc(x[i]);
}

void exp_batch(const double* x, double* out, std::size_t n, Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::exp_batch(x, out, n);
#endif
  (void)isa;
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

void log_batch(const double* x, double* out, std::size_t n, Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::log_batch(x, out, n);
#endif
  (void)isa;
  for (std::size_t i = 0; i < n; ++i) out[i] = std::log(x[i]);
}

void axpy(double* dst, const double* src, std::size_t n, double a, Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::axpy(dst, src, n, a);
#endif
  (void)isa;
  for (std::size_t i = 0; i < n; ++i) dst[i] += a * src[i];
}

void convolve_accumulate(const double* a, std::size_t na, const double* b,
                         std::size_t nb, double* dst, Isa isa) {
#if defined(ASYMPTOTICA_HAVE_AVX2)
  if (isa == Isa::avx2) return avx2::convolve_accumulate(a, na, b, nb, dst);
#endif
  (void)isa;
  for (std::size_t i = 0; i < na; ++i) {
    double ai = a[i];
    if (ai == 0.0) continue;
    double* d = dst + i;
    for (std::size_t j = 0; j < nb; ++j) d[j] += ai * b[j];
  }
}

}  // namespace asymptotica::kernels
