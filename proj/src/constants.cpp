// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0

#include "asymptotica/constants.hpp"

#include <algorithm>
#include <cmath>

#include "asymptotica/kernels.hpp"

namespace asymptotica::constants {

namespace {

// (log n)^{delta+1}/(delta+1) under the convention (the n = 1 pure_ln case
// gives 0 for every delta since delta+1 > 0).
double log_primitive(double n, double delta, LogConvention conv) {
  double l = specfn::log_conv(n, conv);
  if (l == 0.0) return 0.0;
  return std::pow(l, delta + 1.0) / (delta + 1.0);
}

double g_weight(double n, double delta, LogConvention conv) {
  return specfn::log_pow_weight(n, delta, conv) / n;
}

}  // namespace

double gamma_n_delta(std::uint64_t n, double delta, LogConvention conv) {
  if (n == 0) throw std::invalid_argument("gamma_n_delta: n >= 1");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::domain_error("gamma_n_delta: delta in [0, 1]");
  double head = kernels::log_weight_sum(1, n + 1, delta, conv);
  return head - log_primitive(static_cast<double>(n), delta, conv);
}

CertifiedValue gamma_delta(double delta, double tol, LogConvention conv,
                           std::uint64_t n_ceiling) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::domain_error("gamma_delta: delta in [0, 1]");
  if (!(tol > 0.0)) throw std::domain_error("gamma_delta: tol > 0");

  // remainder bound after the endpoint correction: (3/2) * g(N), with
  // g(x) = (ln x)^delta / x decreasing past e^delta
  auto bound_at = [&](double N) {
    return 1.5 * std::pow(std::log(N), delta) / N;
  };
  const double fp_pad = 1e-12;
  double target = tol - fp_pad;
  if (target <= 0.0) target = tol * 0.5;

  // solve (3/2)(ln N)^delta / N <= target by fixed-point iteration
  double N_est = std::max(1024.0, 1.5 / target);
  for (int it = 0; it < 8; ++it)
    N_est = std::max(1024.0, 1.5 * std::pow(std::log(N_est), delta) / target);
  std::uint64_t N = static_cast<std::uint64_t>(std::ceil(N_est));
  while (bound_at(static_cast<double>(N)) > target &&
         N < static_cast<std::uint64_t>(-1) / 2)
    N += N / 8 + 1;

  bool capped = false;
  if (N > n_ceiling) {
    N = n_ceiling;
    capped = true;
  }
  double dN = static_cast<double>(N);
  double head = kernels::log_weight_sum(1, N + 1, delta, conv);
  double value = head - log_primitive(dN, delta, conv) -
                 0.5 * g_weight(dN, delta, conv);
  double bound = bound_at(dN) + fp_pad;
  CertifiedValue out{value, bound, BoundKind::rigorous, N};
  if (capped && bound > tol)
    throw tolerance_error(
        "gamma_delta: tolerance unachievable within the summation ceiling",
        out);
  return out;
}

double log_power_integral(double N, double delta, double s) {
  // integral_N^inf (ln x)^delta x^(-s) dx
  //   = (s-1)^{-(delta+1)} Gamma(delta+1) Q(delta+1, (s-1) ln N)
  double sm1 = s - 1.0;
  double g = std::exp(specfn::log_gamma(delta + 1.0));
  return std::pow(sm1, -(delta + 1.0)) * g *
         specfn::upper_incomplete_gamma_reg(delta + 1.0, sm1 * std::log(N));
}

namespace {

// Stirling-series correction J(z) = ln Gamma(z+1) - [(z+1/2) ln z - z +
// ln(2 pi)/2], three terms plus a remainder bounded by the first omitted
// term (alternating asymptotic series, valid for z > 0).
double stirling_j(double z) {
  double z2 = z * z;
  return (1.0 / 12.0) / z - (1.0 / 360.0) / (z * z2) +
         (1.0 / 1260.0) / (z * z2 * z2);
}

struct TwoPointReturn {
  std::int64_t a = 1, b = 1;  // reduced offsets {-a, +b}, coprime
  std::uint64_t q = 2;        // feasible step a + b
  double beta = 0.5;          // up-step probability of the centered law
  double kappa = 0.0;         // 1 / sqrt(2 pi beta (1-beta))
  double alpha = 0.0;         // 1/n coefficient of the return probability
};

TwoPointReturn two_point_return(const dist::LatticeDistribution& d) {
  TwoPointReturn tp;
  tp.a = -d.reduced_atoms().front().offset;
  tp.b = d.reduced_atoms().back().offset;
  tp.q = static_cast<std::uint64_t>(tp.a + tp.b);
  double q = static_cast<double>(tp.q);
  tp.beta = static_cast<double>(tp.a) / q;
  tp.kappa = 1.0 / std::sqrt(2.0 * M_PI * tp.beta * (1.0 - tp.beta));
  tp.alpha =
      (1.0 - q / static_cast<double>(tp.a) - q / static_cast<double>(tp.b)) /
      12.0;
  return tp;
}

// P(S_n = 0) for the centered two-point law at a feasible n = q m:
// cancellation-free Stirling form for large n, log-gamma below.
double two_point_p0(const TwoPointReturn& tp, std::uint64_t n) {
  std::uint64_t m = n / tp.q;
  double k = static_cast<double>(m) * static_cast<double>(tp.a);
  double nk = static_cast<double>(m) * static_cast<double>(tp.b);
  double dn = static_cast<double>(n);
  double cf_threshold = 64.0 * std::max<double>(1.0, static_cast<double>(tp.q));
  if (dn < cf_threshold) {
    double lp = specfn::log_gamma(dn + 1.0) - specfn::log_gamma(k + 1.0) -
                specfn::log_gamma(nk + 1.0) + k * std::log(tp.beta) +
                nk * std::log1p(-tp.beta);
    return std::exp(lp);
  }
  double corr = stirling_j(dn) - stirling_j(k) - stirling_j(nk);
  return tp.kappa / std::sqrt(dn) * std::exp(corr);
}

// Bound on |exp(corr) - 1 - alpha/n| valid for all feasible n >= N.
double two_point_expansion_rem(const TwoPointReturn& tp, double N) {
  double qa = static_cast<double>(tp.q) / static_cast<double>(tp.a);
  double qb = static_cast<double>(tp.q) / static_cast<double>(tp.b);
  double c3 = (1.0 / 360.0) * (1.0 + qa * qa * qa + qb * qb * qb) +
              ((1.0 / 1260.0) * (1.0 + std::pow(qa, 5) + std::pow(qb, 5)) +
               (1.0 / 1680.0) * (1.0 + std::pow(qa, 7) + std::pow(qb, 7))) /
                  (N * N);
  double rho = c3 / (N * N * N);                // |corr - alpha/N| tail part
  double dbar = std::fabs(tp.alpha) / N + rho;  // |corr|
  return rho + 0.5 * dbar * dbar * std::exp(dbar);
}

// sum over feasible n = q m, m > M, of (ln n)^delta n^(-s): explicit terms
// to M2, then the Euler-Maclaurin closure. Returns value and adds its own
// remainder to *bound.
double progression_tail(double delta, double s, std::uint64_t q,
                        std::uint64_t M, double tol_piece, double* bound) {
  double dq = static_cast<double>(q);
  // choose M2 so the EM remainder (1/2) h(M2) is below tol_piece
  double qM2 = std::pow(4.0 * std::max(1.0, std::pow(40.0, delta)) /
                            std::max(tol_piece, 1e-300),
                        1.0 / s);
  std::uint64_t M2 = static_cast<std::uint64_t>(std::ceil(qM2 / dq));
  std::uint64_t M2_min = M + 16;
  if (M2 < M2_min) M2 = M2_min;
  std::uint64_t M2_cap = M + (1ull << 23);
  if (M2 > M2_cap) M2 = M2_cap;
  auto h = [&](double x) {
    double lx = std::log(dq * x);
    return std::pow(lx, delta) * std::pow(dq * x, -s);
  };
  double explicit_part = kernels::log_power_sum(M + 1, M2 + 1, dq, delta, s);
  double dM2 = static_cast<double>(M2);
  double integral = log_power_integral(dq * dM2, delta, s) / dq;
  double hM2 = h(dM2);
  *bound += 0.5 * hM2;
  return explicit_part + integral - 0.5 * hM2;
}

CertifiedValue eta_two_point(const dist::LatticeDistribution& d, double delta,
                             double tol, LogConvention conv,
                             std::uint64_t head_ceiling) {
  TwoPointReturn tp = two_point_return(d);
  // snap the up-probability to the exactly centered value; validated to
  // 1e-12 by the centering precondition, perturbation folded into the pad
  const double snap_pad = 1e-9 * std::fabs(static_cast<double>(tp.a + tp.b)) /
                          2.0;
  double q = static_cast<double>(tp.q);

  // pick the head length: remainder of the 1/n expansion over the tail
  std::uint64_t M = std::max<std::uint64_t>(64, 256 / tp.q);
  double tail_budget = 0.25 * tol;
  for (;;) {
    double N = q * static_cast<double>(M);
    double rem = two_point_expansion_rem(tp, N);
    double s1_up = log_power_integral(N, delta, 1.5) / q +
                   std::pow(std::log(N), delta) * std::pow(N, -1.5);
    if (tp.kappa * rem * s1_up <= tail_budget || N > static_cast<double>(head_ceiling))
      break;
    M *= 2;
  }
  std::uint64_t N = tp.q * M;

  // exact head over the feasible progression
  double head = 0.0, comp = 0.0;
  std::uint64_t terms = 0;
  for (std::uint64_t n = tp.q; n <= N; n += tp.q) {
    double w = specfn::log_pow_weight(static_cast<double>(n), delta, conv) /
               static_cast<double>(n);
    double y = w * two_point_p0(tp, n) - comp;
    double t = head + y;
    comp = (t - head) - y;
    head = t;
    ++terms;
  }

  // analytic tail: kappa [ S(3/2) + alpha S(5/2) ] with a rigorous
  // remainder from the Stirling sandwich
  double bound = 0.0;
  double em_budget = 0.125 * tol / std::max(1.0, tp.kappa);
  double s32 = progression_tail(delta, 1.5, tp.q, M, em_budget, &bound);
  double s52 = progression_tail(delta, 2.5, tp.q, M, em_budget, &bound);
  double tail = tp.kappa * (s32 + tp.alpha * s52);
  double rem = two_point_expansion_rem(tp, static_cast<double>(N));
  double err = tp.kappa * (rem * s32 + bound * (1.0 + std::fabs(tp.alpha)));
  err += snap_pad + 1e-12;

  CertifiedValue out{head + tail, err, BoundKind::rigorous, terms};
  if (err > tol)
    throw tolerance_error(
        "eta_delta: tolerance unachievable within the head ceiling", out);
  return out;
}

CertifiedValue eta_general(const dist::LatticeDistribution& d, double delta,
                           double tol, LogConvention conv,
                           std::uint64_t head_ceiling) {
  // characteristic-function envelope for the tail:
  //   P(S_n = 0) <= (span/pi) [ (1/2) sqrt(pi/(a n)) + len * r0^n ]
  // with |phi(t)| <= exp(-a t^2) on [0, t0] (t0 = pi / max offset gap)
  // and r0 a certified maximum of |phi| on [t0, pi/span].
  const auto& atoms = d.reduced_atoms();
  double span = static_cast<double>(d.span());
  double dmax = static_cast<double>(atoms.back().offset -
                                    atoms.front().offset);
  double sr = d.sigma_reduced();
  double a_env = 2.0 * sr * sr / (M_PI * M_PI);
  double t0 = M_PI / dmax;
  double upper = M_PI / span;
  double r0 = 0.0, len = 0.0;
  if (t0 < upper) {
    len = upper - t0;
    double lip = 0.0;
    for (const auto& at : atoms)
      lip += at.prob * std::fabs(static_cast<double>(at.offset));
    const int K = 8192;
    double step = len / K;
    for (int i = 0; i <= K; ++i)
      r0 = std::max(r0, std::abs(d.cf_reduced(t0 + step * i)));
    r0 += lip * step * 0.5;
    if (r0 >= 1.0) r0 = 1.0 - 1e-12;  // cannot happen off the lattice points
  }
  double c1 = span / M_PI * 0.5 * std::sqrt(M_PI / a_env);

  // quadrature cost per head term grows like sqrt(n); cap the head hard
  std::uint64_t cap = std::min<std::uint64_t>(head_ceiling, 1u << 14);
  std::uint64_t N = 4096;
  auto tail_bound = [&](double dN) {
    double t1 = c1 * (log_power_integral(dN, delta, 1.5) +
                      std::pow(std::log(dN), delta) * std::pow(dN, -1.5));
    double t2 = 0.0;
    if (len > 0.0 && r0 > 0.0) {
      double w = std::pow(std::log(dN), delta) / dN;
      t2 = span / M_PI * len * w * std::pow(r0, dN) / (1.0 - r0);
    }
    return t1 + t2;
  };
  while (tail_bound(static_cast<double>(N)) > 0.5 * tol && N < cap) N *= 2;
  if (N > cap) N = cap;

  double head = 0.0, comp = 0.0;
  std::uint64_t terms = 0;
  std::uint64_t qstep = d.feasible_step();
  for (std::uint64_t n = qstep; n <= N; n += qstep) {
    double w = specfn::log_pow_weight(static_cast<double>(n), delta, conv) /
               static_cast<double>(n);
    double y = w * dist::pmf_at_zero(d, n) - comp;
    double t = head + y;
    comp = (t - head) - y;
    head = t;
    ++terms;
  }
  double bound = tail_bound(static_cast<double>(N)) + 1e-11;
  CertifiedValue out{head, bound, BoundKind::rigorous, terms};
  if (bound > tol)
    throw tolerance_error(
        "eta_delta: tolerance unachievable for this law within the head "
        "ceiling (tight tails are available for two-point laws only)",
        out);
  return out;
}

}  // namespace

CertifiedValue eta_delta(const dist::LatticeDistribution& d, double delta,
                         double tol, LogConvention conv,
                         std::uint64_t head_ceiling) {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::domain_error("eta_delta: delta in [0, 1]");
  if (!(tol > 0.0)) throw std::domain_error("eta_delta: tol > 0");
  if (!d.is_centered())
    throw std::invalid_argument("eta_delta: distribution must be centered");
  if (d.is_two_point())
    return eta_two_point(d, delta, tol, conv, head_ceiling);
  return eta_general(d, delta, tol, conv, head_ceiling);
}

}  // namespace asymptotica::constants
