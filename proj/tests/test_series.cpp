// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "asymptotica/series.hpp"
#include "asymptotica/specfn.hpp"
#include "oracles.hpp"

using namespace asymptotica;
using series::EvalPlan;
using series::ExactNormal;
using specfn::LogConvention;

namespace {

double lg_paper(double x) {
  double l = std::log(x);
  return l < 1.0 ? 1.0 : l;
}

// brute-force oracle for the normal series: plain termwise summation plus
// a Simpson tail over u = ln x with a monotonicity bracket
struct BruteResult {
  double value, bracket;
};

BruteResult brute_normal_series(double eps, double delta,
                                std::uint64_t N = 2000000) {
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    double x = static_cast<double>(n);
    double l = lg_paper(x);
    double term = std::pow(l, delta) / x * std::erfc(eps * std::sqrt(l) *
                                                     M_SQRT1_2);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  auto f = [&](double u) {
    return std::pow(u, delta) * std::erfc(eps * std::sqrt(u) * M_SQRT1_2);
  };
  double lo = std::log(static_cast<double>(N));
  double hi = lo;
  while (eps * std::sqrt(hi) < 14.0) hi += 1.0;
  double integral = oracles::adaptive_simpson(f, lo, hi, 1e-12);
  double fN = f(lo) / static_cast<double>(N);
  // sum_{n>N} term in [integral - fN, integral + fN] comfortably
  return {sum + integral, fN};
}

}  // namespace

TEST_CASE("plan validation") {
  EvalPlan p;
  p.n_exact = 100;
  p.n_normal = 50;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK(EvalPlan::defaults_for(0.0).n_exact == 10000);
  CHECK(EvalPlan::defaults_for(1.0).n_exact == 30000);
}

TEST_CASE("divergence guard") {
  EvalPlan p;
  CHECK_THROWS_AS(series::normal_series(0.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(series::normal_series(-1.0, 0.0, p), std::domain_error);
  auto rad = dist::LatticeDistribution::rademacher();
  CHECK_THROWS_AS(series::davis_series(rad, 0.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(series::heyde_klesov_series(ExactNormal{}, 0.0, p),
                  std::domain_error);
}

TEST_CASE("tail integral identity at lower limit zero") {
  // integral_0^inf u^d P(|N| >= eps sqrt u) du = E|N|^{2d+2}/((d+1) eps^{2d+2})
  CHECK(series::weighted_normal_tail_integral(0.0, 1.0, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(series::weighted_normal_tail_integral(0.0, 0.5, 0.0) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(series::weighted_normal_tail_integral(0.0, 1.0, 1.0) ==
        doctest::Approx(1.5).epsilon(1e-12));
  for (double eps : {0.8, 0.3, 0.1}) {
    for (double delta : {0.0, 0.5, 1.0}) {
      double lead = specfn::abs_normal_moment(2.0 * delta + 2.0) /
                    ((delta + 1.0) * std::pow(eps, 2.0 * delta + 2.0));
      // closed-form route through the incomplete gamma at a tiny lower limit
      CHECK(series::weighted_normal_tail_integral(1e-280, eps, delta) ==
            doctest::Approx(lead).epsilon(1e-10));
      CHECK(series::weighted_normal_tail_integral(0.0, eps, delta) ==
            doctest::Approx(lead).epsilon(1e-12));
    }
  }
}

TEST_CASE("tail integral against Simpson quadrature") {
  for (double L : {1.0, 5.0, 13.8}) {
    for (double eps : {0.5, 0.1}) {
      for (double delta : {0.0, 1.0}) {
        auto f = [&](double u) {
          return std::pow(u, delta) *
                 std::erfc(eps * std::sqrt(u) * M_SQRT1_2);
        };
        double hi = L;
        while (eps * std::sqrt(hi) < 14.0) hi += 1.0;
        double q = oracles::adaptive_simpson(f, L, hi, 1e-12);
        CHECK(series::weighted_normal_tail_integral(L, eps, delta) ==
              doctest::Approx(q).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("normal series: monotonicity and certified containment") {
  EvalPlan p;
  CHECK(series::normal_series(0.3, 0.0, p).value <
        series::normal_series(0.2, 0.0, p).value);
  for (double eps : {0.5, 0.2, 0.1}) {
    for (double delta : {0.0, 0.5, 1.0}) {
      auto v = series::normal_series(eps, delta, p);
      BruteResult b = brute_normal_series(eps, delta);
      CHECK(std::fabs(v.value - b.value) <= v.error_bound + b.bracket);
    }
  }
  // magnitude anchor at eps = 0.1: lead + gamma0 + bias, all order 100.5
  auto v = series::normal_series(0.1, 0.0, p);
  CHECK(v.value == doctest::Approx(100.5046).epsilon(1e-4));
}

TEST_CASE("bound_only tail method brackets the integral_em value") {
  EvalPlan em, bo;
  bo.tail_method = series::TailMethod::bound_only;
  auto a = series::normal_series(0.2, 0.5, em);
  auto b = series::normal_series(0.2, 0.5, bo);
  CHECK(b.value <= a.value);  // head only
  CHECK(std::fabs(a.value - b.value) <= b.error_bound);
}

TEST_CASE("normal series remainder is the stable form of value - lead") {
  EvalPlan p;
  for (double delta : {0.0, 1.0}) {
    for (double eps : {0.4, 0.1}) {
      auto r = series::normal_series_remainder(eps, delta, p);
      double lead = series::davis_leading_term(1.0, eps, delta);
      auto v = series::normal_series(eps, delta, p);
      CHECK(r.value ==
            doctest::Approx(v.value - lead).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("prop21 remainder is Cauchy along the eps ladder") {
  EvalPlan p;
  double prev_gap = 1e9;
  double prev = series::normal_series_remainder(0.4, 0.0, p).value;
  for (double eps : {0.2, 0.1, 0.05}) {
    double cur = series::normal_series_remainder(eps, 0.0, p).value;
    double gap = std::fabs(cur - prev);
    CHECK(gap < prev_gap);
    prev_gap = gap;
    prev = cur;
  }
}

TEST_CASE("difference series: first term and small-plan equality") {
  auto rad = dist::LatticeDistribution::rademacher();
  EvalPlan p;
  p.n_exact = 1;
  p.n_normal = 8;
  auto d = series::difference_series(rad, 0.5, 0.0, p);
  // n = 1 term: P(|X| >= 0.5) - P(|N| >= 0.5) = 1 - 0.617075...
  CHECK(d.value == doctest::Approx(0.3829249225480262).epsilon(1e-12));
}

TEST_CASE("difference series head equals the direct per-term oracle") {
  auto rad = dist::LatticeDistribution::rademacher();
  EvalPlan p;
  p.n_exact = 3000;
  p.n_normal = 10000;
  for (double eps : {0.5, 0.1, 0.02}) {
    auto d = series::difference_series(rad, eps, 0.0, p);
    double sum = 0.0;
    for (std::uint64_t n = 1; n <= p.n_exact; ++n) {
      double x = static_cast<double>(n);
      double l = lg_paper(x);
      double tau = eps * std::sqrt(x * l);
      std::int64_t k = static_cast<std::int64_t>(std::ceil((x + tau) / 2.0));
      double pw = 2.0 * specfn::binomial_tail_geq(n, 0.5, k);
      if (pw > 1.0) pw = 1.0;
      sum += (pw - std::erfc(eps * std::sqrt(l) * M_SQRT1_2)) / x;
    }
    CHECK(d.value == doctest::Approx(sum).epsilon(5e-12).scale(1.0));
  }
}

TEST_CASE("difference series for a general (non-two-point) law") {
  auto u3 = dist::LatticeDistribution::uniform3();
  EvalPlan p;
  p.n_exact = 300;
  p.n_normal = 1000;
  double eps = 0.3;
  auto d = series::difference_series(u3, eps, 0.0, p);
  // direct oracle through naive convolution stepping
  double sigma_red = u3.sigma_reduced();
  oracles::NaivePmf acc{-1, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  double sum = 0.0;
  for (std::uint64_t n = 1; n <= p.n_exact; ++n) {
    if (n > 1) acc = oracles::naive_convolve(acc, {-1, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
    double x = static_cast<double>(n);
    double l = lg_paper(x);
    double tau = eps * sigma_red * std::sqrt(x * l);
    long double pw = 0.0L;
    for (std::size_t i = 0; i < acc.p.size(); ++i) {
      double off = static_cast<double>(acc.min_offset +
                                       static_cast<std::int64_t>(i));
      if (std::fabs(off) >= tau) pw += acc.p[i];
    }
    sum += (static_cast<double>(pw) -
            std::erfc(eps * std::sqrt(l) * M_SQRT1_2)) /
           x;
  }
  CHECK(d.value == doctest::Approx(sum).epsilon(1e-10).scale(1.0));
  CHECK(d.error_bound > 0.0);
}

TEST_CASE("difference series requires a centered law") {
  auto off = dist::LatticeDistribution::create({{-1, 0.4}, {1, 0.6}});
  EvalPlan p;
  CHECK_THROWS_AS(series::difference_series(off, 0.1, 0.0, p),
                  std::invalid_argument);
}

TEST_CASE("davis decomposition consistency (heads only)") {
  // with bound_only tails both sides are pure head sums, so the identity
  // davis = normal + difference is exact algebra up to roundoff
  auto rad = dist::LatticeDistribution::rademacher();
  for (double delta : {0.0, 1.0}) {
    for (double eps : {0.5, 0.2}) {
      EvalPlan p;
      p.n_exact = 1000;
      p.n_normal = 1000;
      p.tail_method = series::TailMethod::bound_only;
      auto davis = series::davis_series(rad, eps, delta, p);
      auto normal = series::normal_series(eps, delta, p);
      auto diff = series::difference_series(rad, eps, delta, p);
      CHECK(davis.value ==
            doctest::Approx(normal.value + diff.value).epsilon(1e-12));
    }
  }
}

TEST_CASE("davis certified intervals contain the brute-force oracle") {
  auto rad = dist::LatticeDistribution::rademacher();
  EvalPlan p;
  for (double eps : {0.5, 0.2, 0.1}) {
    for (double delta : {0.0, 0.5, 1.0}) {
      auto v = series::davis_series(rad, eps, delta, p);
      // oracle: exact walk head to 2^17 plus the normal tail beyond, with
      // a Berry-Esseen-sized bracket for the neglected walk-normal gap
      const std::uint64_t N = 1u << 17;
      double sum = 0.0, comp = 0.0;
      for (std::uint64_t n = 1; n <= N; ++n) {
        double x = static_cast<double>(n);
        double l = lg_paper(x);
        double tau = eps * std::sqrt(x * l);
        std::int64_t k = static_cast<std::int64_t>(std::ceil((x + tau) / 2.0));
        double pw = 2.0 * specfn::binomial_tail_geq(n, 0.5, k);
        if (pw > 1.0) pw = 1.0;
        double y = std::pow(l, delta) / x * pw - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
      }
      BruteResult nb = brute_normal_series(eps, delta);
      // normal tail beyond N via the same brute integral minus its head
      double head_n = 0.0;
      for (std::uint64_t n = 1; n <= N; ++n) {
        double x = static_cast<double>(n);
        double l = lg_paper(x);
        head_n += std::pow(l, delta) / x *
                  std::erfc(eps * std::sqrt(l) * M_SQRT1_2);
      }
      double oracle = sum + (nb.value - head_n);
      double bracket = nb.bracket +
                       1.6 * 2.0 * std::pow(std::log(static_cast<double>(N)),
                                            delta) /
                           std::sqrt(static_cast<double>(N));
      CHECK(std::fabs(v.value - oracle) <= v.error_bound + bracket);
    }
  }
}

TEST_CASE("davis with huge eps is numerically zero") {
  // the true value is below 1e-100 (the walk is bounded); the computed
  // value only has to be at the cancellation noise floor of the two heads
  auto rad = dist::LatticeDistribution::rademacher();
  EvalPlan p;
  auto v = series::davis_series(rad, 10.0, 0.0, p);
  CHECK(std::fabs(v.value) < 1e-20);
  CHECK(v.error_bound < 0.25);
}

TEST_CASE("davis on the exact-normal law is the normal series") {
  EvalPlan p;
  auto a = series::davis_series(ExactNormal{1.0}, 0.17, 0.5, p);
  auto b = series::normal_series(0.17, 0.5, p);
  CHECK(a.value == b.value);
  // sigma rescaling routes through eps/sigma
  auto c = series::davis_series(ExactNormal{2.0}, 0.34, 0.5, p);
  CHECK(c.value == a.value);
}

TEST_CASE("scale invariance of the davis remainder, termwise") {
  auto rad = dist::LatticeDistribution::rademacher();
  auto pm2 = dist::LatticeDistribution::create({{-2, 0.5}, {2, 0.5}});
  EvalPlan p;
  p.n_exact = 2000;
  p.n_normal = 100000;
  auto a = series::davis_remainder(pm2, 0.2, 0.0, p);
  auto b = series::davis_remainder(rad, 0.1, 0.0, p);
  CHECK(a.value == b.value);
  CHECK(a.error_bound == b.error_bound);
}

TEST_CASE("heyde series: monotone in eps, normal values") {
  EvalPlan p;
  auto a = series::heyde_klesov_series(ExactNormal{}, 0.2, p);
  auto b = series::heyde_klesov_series(ExactNormal{}, 0.1, p);
  CHECK(a.value < b.value);
  // klesov anchor: value ~ 1/eps^2 - 0.4834 at eps = 0.1
  CHECK(b.value == doctest::Approx(99.51658).epsilon(1e-5));
  // spec-level sanity: within 0.05 of 99.5
  CHECK(std::fabs(b.value - 99.5) < 0.05);
  // eps^2 * value -> sigma^2 with the Klesov correction at eps = 0.05
  auto c = series::heyde_klesov_series(ExactNormal{}, 0.05, p);
  CHECK(0.0025 * c.value > 0.99);
  CHECK(0.0025 * c.value < 1.01);
}

TEST_CASE("klesov remainder approaches -1/2 with shrinking gaps") {
  EvalPlan p;
  auto r = series::klesov_remainder(ExactNormal{}, 0.1, p);
  CHECK(std::fabs(r.value - (-0.5)) < 0.05);
  CHECK(r.value == doctest::Approx(-0.4834165).epsilon(1e-5));
  double prev = series::klesov_remainder(ExactNormal{}, 0.4, p).value;
  double prev_gap = 1e9;
  for (double eps : {0.2, 0.1}) {
    double cur = series::klesov_remainder(ExactNormal{}, eps, p).value;
    CHECK(std::fabs(cur - (-0.5)) < std::fabs(prev - (-0.5)));
    double gap = std::fabs(cur - prev);
    CHECK(gap < prev_gap);
    prev_gap = gap;
    prev = cur;
  }
}

TEST_CASE("lattice heyde series against the direct oracle") {
  auto rad = dist::LatticeDistribution::rademacher();
  EvalPlan p;
  auto v = series::heyde_klesov_series(rad, 0.1, p);
  // eps^2 * value ~ sigma^2 = 1 (spec-level anchor: 1 +- 0.05)
  CHECK(std::fabs(0.01 * v.value - 1.0) < 0.05);
  // direct check of the exact head against long-double rows for small n
  double head = 0.0;
  for (std::uint64_t n = 1; n <= 60; ++n)
    head += oracles::pm1_tail_direct(n, 0.1 * static_cast<double>(n)) -
            std::erfc(0.1 * std::sqrt(static_cast<double>(n)) * M_SQRT1_2);
  EvalPlan tiny;
  tiny.n_exact = 60;
  tiny.n_normal = 1000000;
  auto w = series::heyde_klesov_series(rad, 0.1, tiny);
  // same normal part, so the difference of values equals the head gap
  auto nrm = series::heyde_klesov_series(ExactNormal{}, 0.1, tiny);
  CHECK(w.value - nrm.value == doctest::Approx(head).epsilon(1e-10));
}

TEST_CASE("envelope fit reports sane constants") {
  auto rad = dist::LatticeDistribution::rademacher();
  auto env = series::fit_envelope(rad);
  CHECK(env.c_fit > 0.5);
  CHECK(env.c_fit < 1.2);
  CHECK(env.c_safe == 2.0 * env.c_fit);
  CHECK(env.fit_n_max == 1024);
}
