// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "asymptotica/dist.hpp"
#include "asymptotica/specfn.hpp"
#include "oracles.hpp"

using namespace asymptotica;
using dist::LatticeDistribution;

namespace {

LatticeDistribution asym2() {
  return LatticeDistribution::create({{-1, 2.0 / 3.0}, {2, 1.0 / 3.0}});
}

LatticeDistribution five_atom() {
  return LatticeDistribution::create(
      {{-2, 0.2}, {-1, 0.25}, {0, 0.15}, {1, 0.25}, {2, 0.15}});
}

oracles::NaivePmf base_pmf(const LatticeDistribution& d) {
  const auto& at = d.reduced_atoms();
  oracles::NaivePmf out;
  out.min_offset = at.front().offset;
  out.p.assign(static_cast<std::size_t>(at.back().offset -
                                        at.front().offset + 1),
               0.0);
  for (const auto& a : at)
    out.p[static_cast<std::size_t>(a.offset - out.min_offset)] = a.prob;
  return out;
}

}  // namespace

TEST_CASE("construction and invariants") {
  auto rad = LatticeDistribution::rademacher();
  CHECK(rad.mean() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rad.variance() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rad.third_abs_moment() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rad.span() == 2);
  CHECK(rad.feasible_step() == 2);
  CHECK(rad.is_two_point());
  CHECK(rad.is_centered());

  auto u3 = LatticeDistribution::uniform3();
  CHECK(u3.span() == 1);
  CHECK(u3.feasible_step() == 1);
  CHECK(u3.variance() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

  // scaled copy of the +-1 walk reduces to it
  auto pm2 = LatticeDistribution::create({{-2, 0.5}, {2, 0.5}});
  CHECK(pm2.reduced_atoms().front().offset == -1);
  CHECK(pm2.reduced_scale() == 2.0);
  CHECK(pm2.sigma() == doctest::Approx(2.0).epsilon(1e-15));

  CHECK(asym2().is_centered());
  CHECK(asym2().span() == 3);
  CHECK(asym2().feasible_step() == 3);

  CHECK_THROWS_AS(LatticeDistribution::create({{1, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(LatticeDistribution::create({{-1, 0.5}, {1, 0.4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(LatticeDistribution::create({{-1, 0.5}, {-1, 0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(LatticeDistribution::create({{-1, 0.5}, {1, 0.5}}, -1.0),
                  std::invalid_argument);
}

TEST_CASE("convolve_power basics") {
  auto rad = LatticeDistribution::rademacher();
  auto s1 = dist::convolve_power(rad, 1);
  CHECK(s1.at_offset(-1) == 0.5);
  CHECK(s1.at_offset(1) == 0.5);
  auto s2 = dist::convolve_power(rad, 2);
  CHECK(s2.at_offset(-2) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(s2.at_offset(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(s2.at_offset(2) == doctest::Approx(0.25).epsilon(1e-15));
  auto s4 = dist::convolve_power(rad, 4);
  CHECK(s4.at_offset(0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK_THROWS_AS(dist::convolve_power(rad, 0), std::invalid_argument);
  CHECK_THROWS_AS(dist::convolve_power(rad, 1u << 18), dist::resource_error);
}

TEST_CASE("convolve_power equals naive repeated convolution up to 64") {
  for (const auto& d : {LatticeDistribution::rademacher(),
                        LatticeDistribution::uniform3(), asym2(),
                        five_atom()}) {
    oracles::NaivePmf acc = base_pmf(d);
    for (std::uint64_t n = 2; n <= 64; ++n) {
      acc = oracles::naive_convolve(acc, base_pmf(d));
      auto lib = dist::convolve_power(d, n);
      REQUIRE(lib.min_offset == acc.min_offset);
      REQUIRE(lib.pmf.size() == acc.p.size());
      for (std::size_t i = 0; i < acc.p.size(); ++i)
        CHECK(lib.pmf[i] == doctest::Approx(acc.p[i]).epsilon(1e-13));
      CHECK(std::fabs(lib.mass() - 1.0) <
            static_cast<double>(n) * 1e-14);
    }
  }
}

TEST_CASE("additivity of convolution powers") {
  auto u3 = LatticeDistribution::uniform3();
  for (auto [a, b] : {std::pair<int, int>{3, 5}, {7, 9}, {20, 44}}) {
    auto sa = dist::convolve_power(u3, a);
    auto sb = dist::convolve_power(u3, b);
    auto sab = dist::convolve_power(u3, a + b);
    oracles::NaivePmf na{sa.min_offset, sa.pmf};
    oracles::NaivePmf nb{sb.min_offset, sb.pmf};
    auto conv = oracles::naive_convolve(na, nb);
    REQUIRE(conv.min_offset == sab.min_offset);
    for (std::size_t i = 0; i < conv.p.size(); ++i)
      CHECK(sab.pmf[i] == doctest::Approx(conv.p[i]).epsilon(1e-13));
  }
}

TEST_CASE("pmf_at_zero: parity, small cases, closed form") {
  auto rad = LatticeDistribution::rademacher();
  CHECK(dist::pmf_at_zero(rad, 3) == 0.0);
  CHECK(dist::pmf_at_zero(rad, 2) == doctest::Approx(0.5).epsilon(1e-13));
  // C(100,50) 2^-100 via the long-double row oracle
  auto row = oracles::binom_row(100, 0.5L);
  CHECK(dist::pmf_at_zero(rad, 100) ==
        doctest::Approx(static_cast<double>(row[50])).epsilon(1e-12));
  // asymmetric law: only multiples of 3 return
  CHECK(dist::pmf_at_zero(asym2(), 4) == 0.0);
  CHECK(dist::pmf_at_zero(asym2(), 3) ==
        doctest::Approx(3.0 * (2.0 / 3.0) * (2.0 / 3.0) * (1.0 / 3.0))
            .epsilon(1e-12));
}

TEST_CASE("pmf_at_zero agrees with stepping convolution through n = 1024") {
  for (const auto& d :
       {LatticeDistribution::rademacher(), LatticeDistribution::uniform3(),
        asym2()}) {
    oracles::NaivePmf acc = base_pmf(d);
    for (std::uint64_t n = 1; n <= 1024; ++n) {
      if (n > 1) acc = oracles::naive_convolve(acc, base_pmf(d));
      double zero = 0.0;
      std::int64_t idx = -acc.min_offset;
      if (idx >= 0 && idx < static_cast<std::int64_t>(acc.p.size()))
        zero = acc.p[static_cast<std::size_t>(idx)];
      CHECK(std::fabs(dist::pmf_at_zero(d, n) - zero) < 1e-12);
    }
  }
}

TEST_CASE("local limit scaling for the +-1 walk") {
  auto rad = LatticeDistribution::rademacher();
  double v = std::sqrt(1e4) * dist::pmf_at_zero(rad, 10000);
  CHECK(v == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-4 / 0.79));
}

TEST_CASE("tail_two_sided") {
  auto rad = LatticeDistribution::rademacher();
  CHECK(dist::tail_two_sided(rad, 7, 0.0) == 1.0);
  CHECK(dist::tail_two_sided(rad, 2, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dist::tail_two_sided(rad, 100, 20.0) ==
        doctest::Approx(oracles::pm1_tail_direct(100, 20.0)).epsilon(1e-13));
  CHECK(dist::tail_two_sided(rad, 100, 20.0) ==
        doctest::Approx(0.056887933640980784).epsilon(1e-12));
  // general path vs oracle
  auto u3 = LatticeDistribution::uniform3();
  oracles::NaivePmf acc = base_pmf(u3);
  for (std::uint64_t n = 2; n <= 40; ++n)
    acc = oracles::naive_convolve(acc, base_pmf(u3));
  for (double t : {0.5, 1.0, 3.0, 7.5}) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < acc.p.size(); ++i) {
      double off = static_cast<double>(acc.min_offset +
                                       static_cast<std::int64_t>(i));
      if (std::fabs(off) >= t) s += acc.p[i];
    }
    CHECK(dist::tail_two_sided(u3, 40, t) ==
          doctest::Approx(static_cast<double>(s)).epsilon(1e-13));
  }
  // scale invariance through physical thresholds
  auto pm2 = LatticeDistribution::create({{-1, 0.5}, {1, 0.5}}, 2.0);
  CHECK(dist::tail_two_sided(pm2, 100, 40.0) ==
        dist::tail_two_sided(rad, 100, 20.0));
}

TEST_CASE("kolmogorov distance: hand values and scaling") {
  auto rad = LatticeDistribution::rademacher();
  CHECK(dist::kolmogorov_two_sided(rad, 1) ==
        doctest::Approx(1.0 - 0.31731050786291404).epsilon(1e-11));
  CHECK(dist::kolmogorov_two_sided(rad, 2) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // Berry-Esseen n^{-1/2} decay: Lambda_{4n} ~ Lambda_n / 2 within 20%
  for (std::uint64_t n : {25ull, 100ull}) {
    double l1 = dist::kolmogorov_two_sided(rad, n);
    double l4 = dist::kolmogorov_two_sided(rad, 4 * n);
    CHECK(l4 == doctest::Approx(0.5 * l1).epsilon(0.2));
  }
}

TEST_CASE("kolmogorov profile matches single-n evaluation") {
  for (const auto& d :
       {LatticeDistribution::rademacher(), LatticeDistribution::uniform3()}) {
    auto prof = dist::kolmogorov_profile(d, 64);
    for (std::uint64_t n : {1ull, 2ull, 3ull, 17ull, 64ull}) {
      CHECK(prof[n] ==
            doctest::Approx(dist::kolmogorov_two_sided(d, n)).epsilon(1e-11));
    }
  }
}

TEST_CASE("nagaev bound shape") {
  CHECK(dist::nagaev_bound(1, 0.0, 1.0, 1.0) == 1.0);
  CHECK(dist::nagaev_bound(1, 1.0, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(dist::nagaev_bound(4, 0.0, 1.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("fitted envelope dominates held-out Kolmogorov distances") {
  auto rad = LatticeDistribution::rademacher();
  auto prof = dist::kolmogorov_profile(rad, 1024);
  double c_fit = 0.0;
  for (std::uint64_t n = 1; n <= 1024; ++n)
    c_fit = std::max(c_fit, prof[n] * std::sqrt(static_cast<double>(n)));
  double c_safe = 2.0 * c_fit;
  for (std::uint64_t n : {2048ull, 4096ull, 10000ull}) {
    double lam = dist::kolmogorov_two_sided(rad, n);
    CHECK(lam <= c_safe / std::sqrt(static_cast<double>(n)));
    // nagaev_bound form with the fitted constant at x = 0
    CHECK(lam <= dist::nagaev_bound(n, 0.0, rad.third_abs_moment(), c_safe));
  }
}

TEST_CASE("heyde partial sums") {
  auto rad = LatticeDistribution::rademacher();
  CHECK(dist::heyde_series_partial(rad, 0.0, 1) ==
        doctest::Approx(0.6826894921370859).epsilon(1e-10));
  CHECK(dist::heyde_series_partial(rad, 0.0, 2) ==
        doctest::Approx(0.9326894921370859).epsilon(1e-10));
  CHECK(dist::heyde_series_partial(rad, 0.0, 50) <=
        dist::heyde_series_partial(rad, 0.0, 100));
  CHECK_THROWS_AS(dist::heyde_series_partial(rad, 1.0, 10),
                  std::domain_error);
}

TEST_CASE("monte carlo tail") {
  auto rad = LatticeDistribution::rademacher();
  auto full = dist::mc_tail(rad, 13, 0.0, 1000, 99);
  CHECK(full.value == 1.0);
  CHECK(full.error_bound == 0.0);
  auto a = dist::mc_tail(rad, 100, 20.0, 200000, 12345);
  auto b = dist::mc_tail(rad, 100, 20.0, 200000, 12345);
  CHECK(a.value == b.value);  // seed determinism
  CHECK(a.kind == asymptotica::BoundKind::standard_error);
  double exact = oracles::pm1_tail_direct(100, 20.0);
  CHECK(std::fabs(a.value - exact) <= 4.0 * a.error_bound);
  CHECK_THROWS_AS(dist::mc_tail(rad, 5, 1.0, 10, 1), std::invalid_argument);
}

TEST_CASE("mini-language parsing") {
  auto r = dist::parse_distribution("rademacher");
  CHECK(r.is_two_point());
  auto u = dist::parse_distribution("uniform3");
  CHECK(u.atoms().size() == 3);
  auto l = dist::parse_distribution("lattice:-1:0.25,0:0.5,1:0.25");
  CHECK(l.atoms().size() == 3);
  CHECK(l.variance() == doctest::Approx(0.5).epsilon(1e-14));
  auto s = dist::parse_distribution("rademacher;scale=2");
  CHECK(s.sigma() == doctest::Approx(2.0).epsilon(1e-15));
  auto s2 = dist::parse_distribution("lattice:-1:0.5,1:0.5;scale=0.5");
  CHECK(s2.sigma() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(dist::parse_distribution("gauss"), std::invalid_argument);
  CHECK_THROWS_AS(dist::parse_distribution("lattice:"), std::invalid_argument);
  CHECK_THROWS_AS(dist::parse_distribution("lattice:-1:0.7,1:0.7"),
                  std::invalid_argument);
  // round-trip through repr
  auto rt = dist::parse_distribution(s2.repr());
  CHECK(rt.sigma() == s2.sigma());
  CHECK(rt.atoms().size() == s2.atoms().size());
}
