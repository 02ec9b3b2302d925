// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// AVX2 variants of the bulk kernels. The vector exp/log/erfc mirror the
// scalar formulas (same polynomial coefficients and the same split-argument
// exp trick), so the variants agree with the scalar reference to a few ulp
// per element. Four-lane Kahan accumulation inside each block; lanes are
// folded in a fixed order, leftover elements run through the scalar path.

#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "asymptotica/kernels.hpp"
#include "kernels_internal.hpp"

namespace asymptotica::kernels::avx2 {

namespace {

using specfn::LogConvention;

inline __m256d vset1(double x) { return _mm256_set1_pd(x); }

// --- exp: round-to-nearest power-of-two reduction + degree-13 Taylor ---

const __m256d kLog2E = vset1(1.4426950408889634074);
const __m256d kLn2Hi = vset1(6.93147180369123816490e-1);
const __m256d kLn2Lo = vset1(1.90821492927058770002e-10);

inline __m256d v_exp(__m256d x) {
  // clamp: below -708 the result is 0 (we never need overflow upward,
  // but saturate at 709 to keep the scale build defined)
  __m256d zero_mask = _mm256_cmp_pd(x, vset1(-708.0), _CMP_LT_OQ);
  x = _mm256_min_pd(x, vset1(709.0));
  __m256d k = _mm256_round_pd(_mm256_mul_pd(x, kLog2E),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, kLn2Hi, x);
  r = _mm256_fnmadd_pd(k, kLn2Lo, r);
  // Taylor series 1 + r + ... + r^13/13!
  __m256d p = vset1(1.0 / 6227020800.0);  // 1/13!
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, vset1(0.5));
  p = _mm256_fmadd_pd(p, r, vset1(1.0));
  p = _mm256_fmadd_pd(p, r, vset1(1.0));
  // scale by 2^k
  __m128i ki = _mm256_cvtpd_epi32(k);
  __m256i ki64 = _mm256_cvtepi32_epi64(ki);
  __m256i bits =
      _mm256_slli_epi64(_mm256_add_epi64(ki64, _mm256_set1_epi64x(1023)), 52);
  __m256d scale = _mm256_castsi256_pd(bits);
  __m256d res = _mm256_mul_pd(p, scale);
  return _mm256_blendv_pd(res, _mm256_setzero_pd(), zero_mask);
}

// --- log: mantissa/exponent split + atanh series ---

inline __m256d v_log(__m256d x) {
  const __m256i kMantMask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
  const __m256i kOneBits = _mm256_set1_epi64x(0x3FF0000000000000ll);
  __m256i bits = _mm256_castpd_si256(x);
  // exponent
  __m256i expo = _mm256_srli_epi64(bits, 52);
  expo = _mm256_sub_epi64(expo, _mm256_set1_epi64x(1023));
  // mantissa in [1, 2)
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, kMantMask), kOneBits));
  // fold to [sqrt(1/2), sqrt(2))
  __m256d big = _mm256_cmp_pd(m, vset1(1.4142135623730950488), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, vset1(0.5)), big);
  // e as double, +1 where we folded
  alignas(32) std::int64_t tmp[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(tmp), expo);
  __m256d e = _mm256_setr_pd(
      static_cast<double>(tmp[0]), static_cast<double>(tmp[1]),
      static_cast<double>(tmp[2]), static_cast<double>(tmp[3]));
  e = _mm256_add_pd(e, _mm256_and_pd(big, vset1(1.0)));
  // atanh series: ln m = 2t (1 + t2/3 + t2^2/5 + ...), t = (m-1)/(m+1)
  __m256d t = _mm256_div_pd(_mm256_sub_pd(m, vset1(1.0)),
                            _mm256_add_pd(m, vset1(1.0)));
  __m256d t2 = _mm256_mul_pd(t, t);
  __m256d p = vset1(1.0 / 19.0);
  p = _mm256_fmadd_pd(p, t2, vset1(1.0 / 17.0));
  p = _mm256_fmadd_pd(p, t2, vset1(1.0 / 15.0));
  p = _mm256_fmadd_pd(p, t2, vset1(1.0 / 13.0));
  p = _mm256_fmadd_pd(p, t2, vset1(1.0 / 11.0));
  p = _mm256_fmadd_pd(p, t2, vset1(1.0 / 9.0));
  p = _mm256_fmadd_pd(p, t2, vset1(1.0 / 7.0));
  p = _mm256_fmadd_pd(p, t2, vset1(1.0 / 5.0));
  p = _mm256_fmadd_pd(p, t2, vset1(1.0 / 3.0));
  p = _mm256_fmadd_pd(p, t2, vset1(1.0));
  __m256d lnm = _mm256_mul_pd(_mm256_add_pd(t, t), p);
  // e*ln2_hi + (e*ln2_lo + ln m)
  __m256d r = _mm256_fmadd_pd(e, kLn2Lo, lnm);
  return _mm256_fmadd_pd(e, kLn2Hi, r);
}

inline __m256d v_pow(__m256d x, double expnt) {
  return v_exp(_mm256_mul_pd(v_log(x), vset1(expnt)));
}

// --- erfc for x >= 0, same three-range rational approximations ---

inline __m256d v_erfc_nonneg(__m256d y) {
  // range A: y <= 0.46875, via erf
  __m256d z = _mm256_mul_pd(y, y);
  __m256d xnumA = _mm256_fmadd_pd(vset1(1.85777706184603153e-1), z,
                                  vset1(3.16112374387056560e0));
  __m256d xdenA = _mm256_add_pd(z, vset1(2.36012909523441209e1));
  xnumA = _mm256_fmadd_pd(xnumA, z, vset1(1.13864154151050156e2));
  xdenA = _mm256_fmadd_pd(xdenA, z, vset1(2.44024637934444173e2));
  xnumA = _mm256_fmadd_pd(xnumA, z, vset1(3.77485237685302021e2));
  xdenA = _mm256_fmadd_pd(xdenA, z, vset1(1.28261652607737228e3));
  xnumA = _mm256_fmadd_pd(xnumA, z, vset1(3.20937758913846947e3));
  xdenA = _mm256_fmadd_pd(xdenA, z, vset1(2.84423683343917062e3));
  __m256d erfA = _mm256_div_pd(_mm256_mul_pd(y, xnumA), xdenA);
  __m256d resA = _mm256_sub_pd(vset1(1.0), erfA);

  // range B: 0.46875 < y <= 4
  __m256d xnumB = _mm256_fmadd_pd(vset1(2.15311535474403846e-8), y,
                                  vset1(5.64188496988670089e-1));
  __m256d xdenB = _mm256_add_pd(y, vset1(1.57449261107098347e1));
  const double cB[6] = {8.88314979438837594e0, 6.61191906371416295e1,
                        2.98635138197400131e2, 8.81952221241769090e2,
                        1.71204761263407058e3, 2.05107837782607147e3};
  const double dB[6] = {1.17693950891312499e2, 5.37181101862009858e2,
                        1.62138957456669019e3, 3.29079923573345963e3,
                        4.36261909014324716e3, 3.43936767414372164e3};
  for (int i = 0; i < 6; ++i) {
    xnumB = _mm256_fmadd_pd(xnumB, y, vset1(cB[i]));
    xdenB = _mm256_fmadd_pd(xdenB, y, vset1(dB[i]));
  }
  xnumB = _mm256_fmadd_pd(xnumB, y, vset1(1.23033935479799725e3));
  xdenB = _mm256_fmadd_pd(xdenB, y, vset1(1.23033935480374942e3));
  __m256d ratioB = _mm256_div_pd(xnumB, xdenB);

  // range C: y > 4
  __m256d yinv2 = _mm256_div_pd(vset1(1.0), _mm256_mul_pd(y, y));
  __m256d xnumC = _mm256_fmadd_pd(vset1(1.63153871373020978e-2), yinv2,
                                  vset1(3.05326634961232344e-1));
  __m256d xdenC = _mm256_add_pd(yinv2, vset1(2.56852019228982242e0));
  const double pC[3] = {3.60344899949804439e-1, 1.25781726111229246e-1,
                        1.60837851487422766e-2};
  const double qC[3] = {1.87295284992346047e0, 5.27905102951428412e-1,
                        6.05183413124413191e-2};
  for (int i = 0; i < 3; ++i) {
    xnumC = _mm256_fmadd_pd(xnumC, yinv2, vset1(pC[i]));
    xdenC = _mm256_fmadd_pd(xdenC, yinv2, vset1(qC[i]));
  }
  xnumC = _mm256_fmadd_pd(xnumC, yinv2, vset1(6.58749161529837803e-4));
  xdenC = _mm256_fmadd_pd(xdenC, yinv2, vset1(2.33520497626869185e-3));
  __m256d rC = _mm256_mul_pd(yinv2, _mm256_div_pd(xnumC, xdenC));
  __m256d ratioC = _mm256_div_pd(
      _mm256_sub_pd(vset1(0.56418958354775628695), rC), y);

  // split-argument exp(-y^2) shared by ranges B and C
  __m256d ysq16 = _mm256_round_pd(_mm256_mul_pd(y, vset1(16.0)),
                                  _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
  ysq16 = _mm256_mul_pd(ysq16, vset1(0.0625));
  __m256d del = _mm256_mul_pd(_mm256_sub_pd(y, ysq16), _mm256_add_pd(y, ysq16));
  __m256d efac = _mm256_mul_pd(
      v_exp(_mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(ysq16, ysq16))),
      v_exp(_mm256_sub_pd(_mm256_setzero_pd(), del)));

  __m256d maskA = _mm256_cmp_pd(y, vset1(0.46875), _CMP_LE_OQ);
  __m256d maskC = _mm256_cmp_pd(y, vset1(4.0), _CMP_GT_OQ);
  __m256d ratioBC = _mm256_blendv_pd(ratioB, ratioC, maskC);
  __m256d resBC = _mm256_mul_pd(efac, ratioBC);
  __m256d res = _mm256_blendv_pd(resBC, resA, maskA);
  // y >= 28: hard zero, matching the scalar cut
  __m256d big = _mm256_cmp_pd(y, vset1(28.0), _CMP_GE_OQ);
  return _mm256_blendv_pd(res, _mm256_setzero_pd(), big);
}

// 4-lane Kahan accumulator
struct VKahan {
  __m256d sum = _mm256_setzero_pd();
  __m256d comp = _mm256_setzero_pd();
  inline void add(__m256d v) {
    __m256d y = _mm256_sub_pd(v, comp);
    __m256d t = _mm256_add_pd(sum, y);
    comp = _mm256_sub_pd(_mm256_sub_pd(t, sum), y);
    sum = t;
  }
  double fold() const {
    alignas(32) double s[4], c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, comp);
    // fixed fold order: lanes 0..3, compensations subtracted
    double r = ((s[0] + s[1]) + (s[2] + s[3]));
    double rc = ((c[0] + c[1]) + (c[2] + c[3]));
    return r - rc;
  }
};

const __m256d kInvSqrt2 = vset1(0.70710678118654752440);

// Lg(n) under the convention; n lanes hold integer values >= 1
inline __m256d v_log_conv(__m256d n, LogConvention conv) {
  __m256d l = v_log(n);
  if (conv == LogConvention::paper) l = _mm256_max_pd(l, vset1(1.0));
  return l;
}

// (log n)^delta with the 0^0 rule; l is the convention log
inline __m256d v_weight_pow(__m256d l, double delta) {
  if (delta == 0.0) return vset1(1.0);
  __m256d w;
  if (delta == 1.0) {
    w = l;
  } else if (delta == 0.5) {
    w = _mm256_sqrt_pd(l);
  } else {
    w = v_pow(l, delta);
  }
  // l == 0 (pure_ln at n = 1, delta > 0): weight 0
  __m256d zero = _mm256_cmp_pd(l, _mm256_setzero_pd(), _CMP_LE_OQ);
  return _mm256_blendv_pd(w, _mm256_setzero_pd(), zero);
}

template <class VecBlock, class ScalTerm>
double run_sum(std::uint64_t begin, std::uint64_t end, VecBlock vec,
               ScalTerm scal) {
  return detail::blocked_sum(begin, end,
                             [&](std::uint64_t b0, std::uint64_t b1) {
    VKahan acc;
    std::uint64_t j = b0;
    for (; j + 4 <= b1; j += 4) {
      __m256d n = _mm256_setr_pd(
          static_cast<double>(j), static_cast<double>(j + 1),
          static_cast<double>(j + 2), static_cast<double>(j + 3));
      acc.add(vec(n));
    }
    double s = acc.fold();
    double comp = 0.0;
    for (; j < b1; ++j) {
      double y = scal(j) - comp;
      double t = s + y;
      comp = (t - s) - y;
      s = t;
    }
    return s;
  });
}

}  // namespace

double log_weight_sum(std::uint64_t begin, std::uint64_t end, double delta,
                      LogConvention conv) {
  return run_sum(
      begin, end,
      [&](__m256d n) {
        __m256d l = v_log_conv(n, conv);
        return _mm256_div_pd(v_weight_pow(l, delta), n);
      },
      [&](std::uint64_t j) {
        double n = static_cast<double>(j);
        return specfn::log_pow_weight(n, delta, conv) / n;
      });
}

double normal_series_sum(std::uint64_t begin, std::uint64_t end, double delta,
                         double eps, LogConvention conv) {
  return run_sum(
      begin, end,
      [&](__m256d n) {
        __m256d l = v_log_conv(n, conv);
        __m256d w = _mm256_div_pd(v_weight_pow(l, delta), n);
        __m256d arg = _mm256_mul_pd(
            _mm256_mul_pd(vset1(eps), _mm256_sqrt_pd(l)), kInvSqrt2);
        __m256d tail = v_erfc_nonneg(arg);
        // pure_ln at n = 1: l = 0 -> erfc(0) = 1 already, nothing special
        return _mm256_mul_pd(w, tail);
      },
      [&](std::uint64_t j) {
        double n = static_cast<double>(j);
        double l = specfn::log_conv(n, conv);
        double w = specfn::log_pow_weight(n, delta, conv) / n;
        double tail =
            l <= 0.0 ? 1.0 : specfn::erfc(eps * std::sqrt(l) * 0.70710678118654752440);
        return w * tail;
      });
}

double sqrt_arg_tail_sum(std::uint64_t begin, std::uint64_t end, double c) {
  return run_sum(
      begin, end,
      [&](__m256d n) {
        __m256d arg = _mm256_mul_pd(_mm256_mul_pd(vset1(c), _mm256_sqrt_pd(n)),
                                    kInvSqrt2);
        return v_erfc_nonneg(arg);
      },
      [&](std::uint64_t j) {
        return specfn::erfc(c * std::sqrt(static_cast<double>(j)) *
                            0.70710678118654752440);
      });
}

double log_power_sum(std::uint64_t begin, std::uint64_t end, double q,
                     double delta, double s) {
  return run_sum(
      begin, end,
      [&](__m256d m) {
        __m256d x = _mm256_mul_pd(vset1(q), m);
        __m256d lx = v_log(x);
        __m256d w = delta == 0.0 ? vset1(1.0)
                    : delta == 1.0
                        ? lx
                        : v_exp(_mm256_mul_pd(v_log(lx), vset1(delta)));
        return _mm256_mul_pd(w, v_exp(_mm256_mul_pd(lx, vset1(-s))));
      },
      [&](std::uint64_t j) {
        double x = q * static_cast<double>(j);
        double lx = std::log(x);
        double w =
            delta == 0.0 ? 1.0 : (delta == 1.0 ? lx : std::pow(lx, delta));
        return w * std::exp(lx * -s);
      });
}

void erfc_batch(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d neg = _mm256_cmp_pd(v, _mm256_setzero_pd(), _CMP_LT_OQ);
    __m256d y = _mm256_andnot_pd(vset1(-0.0), v);  // |x|
    __m256d r = v_erfc_nonneg(y);
    r = _mm256_blendv_pd(r, _mm256_sub_pd(vset1(2.0), r), neg);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = specfn::erfc(x[i]);
}

void exp_batch(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, v_exp(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = std::exp(x[i]);
}

void log_batch(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, v_log(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = std::log(x[i]);
}

void axpy(double* dst, const double* src, std::size_t n, double a) {
  __m256d va = vset1(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_loadu_pd(dst + i);
    d = _mm256_fmadd_pd(va, _mm256_loadu_pd(src + i), d);
    _mm256_storeu_pd(dst + i, d);
  }
  for (; i < n; ++i) dst[i] += a * src[i];
}

void convolve_accumulate(const double* a, std::size_t na, const double* b,
                         std::size_t nb, double* dst) {
  for (std::size_t i = 0; i < na; ++i) {
    double ai = a[i];
    if (ai == 0.0) continue;
    axpy(dst + i, b, nb, ai);
  }
}

}  // namespace asymptotica::kernels::avx2
