// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// Certified evaluation of the weighted tail-probability series:
//
//   normal:      sum_n (log n)^d / n * P(|N| >= eps sqrt(log n))
//   difference:  sum_n (log n)^d / n * [ P(|S_n| >= eps sigma sqrt(n log n))
//                                        - P(|N| >= eps sqrt(log n)) ]
//   davis:       sum_n (log n)^d / n * P(|S_n| >= eps sqrt(n log n))
//   heyde:       sum_n P(|S_n| >= eps n)
//
// Normal-law heads are summed termwise and closed with an analytic
// integral (incomplete-gamma form) plus an Euler-Maclaurin endpoint
// correction and a monotonicity remainder. Lattice heads use exact walk
// probabilities; the difference tail beyond the exact head enters the
// error bound only, through a Berry-Esseen envelope fitted on exact
// Kolmogorov distances and inflated by a factor two.
//
// Remainder forms (series minus its leading term) are evaluated without
// forming the large leading term, so they stay accurate at small eps.

#ifndef ASYMPTOTICA_SERIES_HPP
#define ASYMPTOTICA_SERIES_HPP

#include "asymptotica/certified.hpp"
#include "asymptotica/dist.hpp"
#include "asymptotica/specfn.hpp"

namespace asymptotica::series {

using specfn::LogConvention;

enum class TailMethod { integral_em, bound_only };

struct EvalPlan {
  std::uint64_t n_exact = 10000;
  std::uint64_t n_normal = 1000000;
  TailMethod tail_method = TailMethod::integral_em;
  LogConvention log_convention = LogConvention::paper;

  static EvalPlan defaults_for(double delta) {
    EvalPlan p;
    if (delta >= 0.5) p.n_exact = 30000;
    return p;
  }
  void validate() const;
};

/// Marker for an exactly normal law with standard deviation sigma.
struct ExactNormal {
  double sigma = 1.0;
};

/// Leading term E|N|^{2d+2} sigma^{2d+2} / ((d+1) eps^{2d+2}).
double davis_leading_term(double sigma, double eps, double delta);

/// integral_L^inf u^d P(|N| >= eps sqrt(u)) du in closed form; at L = 0 it
/// equals the leading term with sigma = 1.
double weighted_normal_tail_integral(double L, double eps, double delta);

CertifiedValue normal_series(double eps, double delta, const EvalPlan& plan);

/// normal_series minus the (sigma = 1) leading term, cancellation-free.
CertifiedValue normal_series_remainder(double eps, double delta,
                                       const EvalPlan& plan);

/// Berry-Esseen envelope Lambda_n <= c_safe / sqrt(n), fitted on exact
/// Kolmogorov distances for n <= fit_n_max and inflated by 2.
struct BerryEsseenEnvelope {
  double c_fit = 0.0;
  double c_safe = 0.0;
  std::uint64_t fit_n_max = 0;
};
BerryEsseenEnvelope fit_envelope(const dist::LatticeDistribution& d);

/// eps is the standardized threshold multiplier: the walk probability at
/// term n is P(|S_n| >= eps sigma sqrt(n log n)).
CertifiedValue difference_series(const dist::LatticeDistribution& d,
                                 double eps, double delta,
                                 const EvalPlan& plan);

CertifiedValue davis_series(const dist::LatticeDistribution& d, double eps,
                            double delta, const EvalPlan& plan);
CertifiedValue davis_series(const ExactNormal& n, double eps, double delta,
                            const EvalPlan& plan);

/// davis_series minus the leading term (the convergence-rate remainder).
CertifiedValue davis_remainder(const dist::LatticeDistribution& d, double eps,
                               double delta, const EvalPlan& plan);
CertifiedValue davis_remainder(const ExactNormal& n, double eps, double delta,
                               const EvalPlan& plan);

CertifiedValue heyde_klesov_series(const dist::LatticeDistribution& d,
                                   double eps, const EvalPlan& plan);
CertifiedValue heyde_klesov_series(const ExactNormal& n, double eps,
                                   const EvalPlan& plan);

/// heyde_klesov_series minus sigma^2 / eps^2, cancellation-free
/// (exact-normal law only).
CertifiedValue klesov_remainder(const ExactNormal& n, double eps,
                                const EvalPlan& plan);

}  // namespace asymptotica::series

#endif  // ASYMPTOTICA_SERIES_HPP
