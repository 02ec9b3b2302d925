// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0

#include "asymptotica/series.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "asymptotica/constants.hpp"
#include "asymptotica/kernels.hpp"

namespace asymptotica::series {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_convergent(double eps) {
  if (!(eps > 0.0))
    throw std::domain_error("series diverges: eps must be > 0");
}

// f(x) = (ln x)^d / x * P(|N| >= eps sqrt(ln x)), the integrand whose
// samples at integers are the normal-series terms past n = 3
double normal_term(double x, double eps, double delta) {
  double l = std::log(x);
  return std::pow(l, delta) / x *
         specfn::erfc(eps * std::sqrt(l) * kInvSqrt2);
}

struct NormalTailParts {
  double lead_minus_integral;  // integral_0^L part (small when L small)
  double integral;             // integral_L^inf part
};

// Split of the closed-form integral at L = ln N:
//   integral_L^inf u^d P(|N| >= eps sqrt u) du
//     = (2/eps^{2d+2}) [ -Q(1/2, a^2/2) a^{2d+2} / (2d+2)
//                        + cg Q(d+3/2, a^2/2) ]      with a = eps sqrt(L)
//   lead - integral = (2/eps^{2d+2}) [ Q(1/2, a^2/2) a^{2d+2} / (2d+2)
//                        + cg P(d+3/2, a^2/2) ],  cg = 2^d G(d+3/2)/((d+1) sqrt pi)
NormalTailParts normal_tail_parts(double L, double eps, double delta) {
  double a = eps * std::sqrt(L);
  double x = 0.5 * a * a;
  double cg = std::exp(delta * M_LN2 + specfn::log_gamma(delta + 1.5)) /
              ((delta + 1.0) * std::sqrt(M_PI));
  double apow = std::pow(a, 2.0 * delta + 2.0);
  double scale = 2.0 * std::pow(eps, -(2.0 * delta + 2.0));
  double q_half = specfn::upper_incomplete_gamma_reg(0.5, x);
  NormalTailParts parts;
  parts.integral =
      scale * (cg * specfn::upper_incomplete_gamma_reg(delta + 1.5, x) -
               q_half * apow / (2.0 * delta + 2.0));
  parts.lead_minus_integral =
      scale * (cg * specfn::lower_incomplete_gamma_reg(delta + 1.5, x) +
               q_half * apow / (2.0 * delta + 2.0));
  return parts;
}

}  // namespace

void EvalPlan::validate() const {
  if (n_exact < 1 || n_normal < 8)
    throw std::invalid_argument("EvalPlan: n_exact >= 1, n_normal >= 8");
  if (n_exact > n_normal)
    throw std::invalid_argument("EvalPlan: n_exact must be <= n_normal");
}

double davis_leading_term(double sigma, double eps, double delta) {
  require_convergent(eps);
  double p = 2.0 * delta + 2.0;
  return specfn::abs_normal_moment(p) * std::pow(sigma, p) /
         ((delta + 1.0) * std::pow(eps, p));
}

double weighted_normal_tail_integral(double L, double eps, double delta) {
  require_convergent(eps);
  if (L <= 0.0) return davis_leading_term(1.0, eps, delta);
  return normal_tail_parts(L, eps, delta).integral;
}

namespace {

struct NormalEval {
  double value;
  double bound;
  std::uint64_t terms;
};

// shared by normal_series and its remainder form; when remainder is true
// the returned value has the leading term subtracted stably
NormalEval eval_normal(double eps, double delta, const EvalPlan& plan,
                       bool remainder) {
  require_convergent(eps);
  plan.validate();
  std::uint64_t N = plan.n_normal;
  double dN = static_cast<double>(N);
  double head = kernels::normal_series_sum(1, N + 1, delta, eps,
                                           plan.log_convention);
  NormalTailParts parts = normal_tail_parts(std::log(dN), eps, delta);
  double fN = normal_term(dN, eps, delta);
  double value, bound;
  if (plan.tail_method == TailMethod::integral_em) {
    value = remainder ? head - parts.lead_minus_integral - 0.5 * fN
                      : head + parts.integral - 0.5 * fN;
    bound = 0.5 * fN;
  } else {
    value = remainder ? head - parts.lead_minus_integral - parts.integral
                      : head;
    bound = parts.integral + fN;
  }
  // roundoff pad: Kahan head plus the closed-form factors
  bound += 1e-14 * (std::fabs(head) + std::fabs(parts.integral) +
                    std::fabs(parts.lead_minus_integral));
  return {value, bound, N};
}

}  // namespace

CertifiedValue normal_series(double eps, double delta, const EvalPlan& plan) {
  NormalEval e = eval_normal(eps, delta, plan, false);
  return {e.value, e.bound, BoundKind::rigorous, e.terms};
}

CertifiedValue normal_series_remainder(double eps, double delta,
                                       const EvalPlan& plan) {
  NormalEval e = eval_normal(eps, delta, plan, true);
  return {e.value, e.bound, BoundKind::rigorous, e.terms};
}

BerryEsseenEnvelope fit_envelope(const dist::LatticeDistribution& d) {
  const std::uint64_t n_fit = 1024;
  std::vector<double> lam = dist::kolmogorov_profile(d, n_fit);
  BerryEsseenEnvelope env;
  env.fit_n_max = n_fit;
  for (std::uint64_t n = 1; n <= n_fit; ++n)
    env.c_fit = std::max(env.c_fit,
                         lam[n] * std::sqrt(static_cast<double>(n)));
  env.c_safe = 2.0 * env.c_fit;
  return env;
}

namespace {

// Incremental one-sided binomial tail P(K_n >= k_n) for K_n ~ Bin(n, p)
// along n = 1, 2, ... with slowly moving thresholds. One n-step costs a
// couple of logs:
//   P(K_{n+1} >= k) = P(K_n >= k) + p * pmf_n(k-1)
// and threshold moves add/subtract the tracked pmf. The pmf is carried in
// log form at position k-1 and updated by exact log-ratios with Kahan
// compensation, so no large log-gamma differences ever cancel.
class BinomialUpperTracker {
 public:
  BinomialUpperTracker(double p, std::int64_t k1)
      : p_(p), q_(1.0 - p), lp_(std::log(p)), lq_(std::log1p(-p)) {
    n_ = 1;
    k_ = clamp_k(k1);
    reinit();
  }

  // advance to n+1, then move the threshold to k_next; returns P(K >= k)
  double step(std::int64_t k_next) {
    // n -> n+1 at fixed k: T += p * pmf_n(k-1)
    T_ += p_ * pmf_lo();
    // pmf_{n+1}(k-1) = pmf_n(k-1) * (n+1)/(n+2-k) * (1-p)
    add_log(std::log(static_cast<double>(n_ + 1) /
                     static_cast<double>(n_ + 2 - k_)) +
            lq_);
    ++n_;
    std::int64_t kc = clamp_k(k_next);
    int guard = 0;
    while (k_ < kc) {
      // pmf_n(k) from pmf_n(k-1)
      double r = std::log(static_cast<double>(n_ - k_ + 1) /
                          static_cast<double>(k_)) + lp_ - lq_;
      add_log(r);
      T_ -= pmf_lo();  // now holds pmf_n(k); T drops by it
      ++k_;
      if (++guard > 64) break;
    }
    while (k_ > kc) {
      T_ += pmf_lo();
      double r = std::log(static_cast<double>(k_ - 1) /
                          static_cast<double>(n_ - k_ + 2)) + lq_ - lp_;
      add_log(r);
      --k_;
      if (++guard > 64) break;
    }
    if (guard > 64 || k_next != kc) {
      k_ = clamp_k(k_next);
      reinit();
    }
    if (T_ < 0.0) T_ = 0.0;
    return T_ > 1.0 ? 1.0 : T_;
  }

  double value() const { return T_ < 0.0 ? 0.0 : (T_ > 1.0 ? 1.0 : T_); }

 private:
  std::int64_t clamp_k(std::int64_t k) const {
    std::int64_t hi = static_cast<std::int64_t>(n_) + 1;
    return k < 1 ? 1 : (k > hi ? hi : k);
  }

  double pmf_lo() const { return std::exp(lnpmf_ - comp_); }

  void add_log(double r) {
    double y = r - comp_;
    double t = lnpmf_ + y;
    comp_ = (t - lnpmf_) - y;
    lnpmf_ = t;
  }

  void reinit() {
    double dn = static_cast<double>(n_);
    double dk = static_cast<double>(k_ - 1);
    lnpmf_ = specfn::log_gamma(dn + 1.0) - specfn::log_gamma(dk + 1.0) -
             specfn::log_gamma(dn - dk + 1.0) + dk * lp_ + (dn - dk) * lq_;
    comp_ = 0.0;
    T_ = specfn::binomial_tail_geq(n_, p_, k_);
  }

  double p_, q_, lp_, lq_;
  std::uint64_t n_ = 1;
  std::int64_t k_ = 1;
  double lnpmf_ = 0.0, comp_ = 0.0;  // ln pmf_n(k-1), compensation
  double T_ = 0.0;
};

// Two-sided exact tail P(|S_n| >= tau_n) for two-point laws along
// increasing n. Offsets {-a, +b}: S_n = K (a+b) - n a with K ~ Bin(n, pb).
class TwoPointTailSweep {
 public:
  explicit TwoPointTailSweep(const dist::LatticeDistribution& d) {
    const auto& at = d.reduced_atoms();
    a_ = -at.front().offset;
    b_ = at.back().offset;
    pb_ = at.back().prob;
    q_ = static_cast<double>(a_ + b_);
    symmetric_ = (a_ == b_) && pb_ == 0.5;
  }

  // must be called with n = 1, 2, 3, ... in order
  double tail(std::uint64_t n, double tau) {
    if (tau <= 0.0) {
      advance_to(n);
      return 1.0;
    }
    double na = static_cast<double>(n) * static_cast<double>(a_);
    std::int64_t k_up = static_cast<std::int64_t>(std::ceil((na + tau) / q_));
    double up = track_up(n, k_up);
    double s;
    if (symmetric_) {
      s = 2.0 * up;
    } else {
      std::int64_t k_dn =
          static_cast<std::int64_t>(std::floor((na - tau) / q_));
      // P(K <= k_dn) = 1 - P(K >= k_dn + 1)
      s = up + (1.0 - track_dn(n, k_dn + 1));
    }
    return s > 1.0 ? 1.0 : s;
  }

 private:
  double track_up(std::uint64_t n, std::int64_t k) {
    if (!up_) {
      up_n_ = 1;
      up_.emplace(pb_, k);
      // callers start at n = 1
    }
    while (up_n_ < n) {
      ++up_n_;
      up_->step(k);
    }
    return up_->value();
  }

  double track_dn(std::uint64_t n, std::int64_t k) {
    if (!dn_) {
      dn_n_ = 1;
      dn_.emplace(pb_, k);
    }
    while (dn_n_ < n) {
      ++dn_n_;
      dn_->step(k);
    }
    return dn_->value();
  }

  void advance_to(std::uint64_t n) {
    // keep trackers warm through tau <= 0 stretches
    if (up_) track_up(n, 1);
    if (dn_) track_dn(n, 1);
  }

  std::int64_t a_ = 1, b_ = 1;
  double pb_ = 0.5, q_ = 2.0;
  bool symmetric_ = true;
  std::optional<BinomialUpperTracker> up_, dn_;
  std::uint64_t up_n_ = 1, dn_n_ = 1;
};

// exact P(|S_n| >= tau) by forward PMF stepping, for general lattice laws
struct WalkTail {
  const dist::LatticeDistribution& d;
  std::vector<double> cur, next;
  std::int64_t lo = 0, cur_min = 0, cur_max = 0;
  std::uint64_t cur_n = 0;

  explicit WalkTail(const dist::LatticeDistribution& dd, std::uint64_t n_max)
      : d(dd) {
    const auto& at = d.reduced_atoms();
    std::int64_t amin = at.front().offset, amax = at.back().offset;
    lo = amin < 0 ? amin * static_cast<std::int64_t>(n_max) : 0;
    std::int64_t hi = amax > 0 ? amax * static_cast<std::int64_t>(n_max) : 0;
    cur.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    next.assign(cur.size(), 0.0);
    for (const auto& atom : at)
      cur[static_cast<std::size_t>(atom.offset - lo)] = atom.prob;
    cur_min = amin;
    cur_max = amax;
    cur_n = 1;
  }

  // must be called with strictly increasing n
  double tail(std::uint64_t n, double tau) {
    const auto& at = d.reduced_atoms();
    std::int64_t amin = at.front().offset, amax = at.back().offset;
    while (cur_n < n) {
      std::int64_t nmin = cur_min + amin, nmax = cur_max + amax;
      std::size_t nlen = static_cast<std::size_t>(nmax - nmin + 1);
      std::fill(next.begin() + (nmin - lo), next.begin() + (nmin - lo) + nlen,
                0.0);
      std::size_t clen = static_cast<std::size_t>(cur_max - cur_min + 1);
      for (const auto& atom : at)
        kernels::axpy(next.data() + (cur_min + atom.offset - lo),
                      cur.data() + (cur_min - lo), clen, atom.prob);
      cur.swap(next);
      cur_min = nmin;
      cur_max = nmax;
      ++cur_n;
    }
    if (tau <= 0.0) return 1.0;
    std::int64_t v = static_cast<std::int64_t>(std::ceil(tau));
    double up = 0.0, dn = 0.0;
    for (std::int64_t off = cur_max; off >= v; --off)
      up += cur[static_cast<std::size_t>(off - lo)];
    for (std::int64_t off = cur_min; off <= -v; ++off)
      dn += cur[static_cast<std::size_t>(off - lo)];
    double s = up + dn;
    return s > 1.0 ? 1.0 : s;
  }
};

constexpr std::uint64_t kGeneralHeadCap = 1u << 15;

}  // namespace

CertifiedValue difference_series(const dist::LatticeDistribution& d,
                                 double eps, double delta,
                                 const EvalPlan& plan) {
  require_convergent(eps);
  plan.validate();
  if (!d.is_centered())
    throw std::invalid_argument("difference_series: law must be centered");
  std::uint64_t N = plan.n_exact;
  bool two_point = d.is_two_point();
  if (!two_point && N > kGeneralHeadCap) N = kGeneralHeadCap;

  double sr = d.sigma_reduced();
  std::optional<TwoPointTailSweep> tp;
  std::optional<WalkTail> wt;
  if (two_point)
    tp.emplace(d);
  else
    wt.emplace(d, N);
  LogConvention conv = plan.log_convention;
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    double dn = static_cast<double>(n);
    double l = specfn::log_conv(dn, conv);
    double w = specfn::log_pow_weight(dn, delta, conv) / dn;
    double tau = eps * sr * std::sqrt(dn * l);
    double pw = two_point ? tp->tail(n, tau) : wt->tail(n, tau);
    double pn = l <= 0.0 ? 1.0 : specfn::erfc(eps * std::sqrt(l) * kInvSqrt2);
    double y = w * (pw - pn) - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  BerryEsseenEnvelope env = fit_envelope(d);
  double bound = env.c_safe *
                 constants::log_power_integral(static_cast<double>(N), delta,
                                               1.5);
  bound += 1e-13 + 1e-15 * static_cast<double>(N);
  return {sum, bound, BoundKind::rigorous, N};
}

CertifiedValue davis_series(const dist::LatticeDistribution& d, double eps,
                            double delta, const EvalPlan& plan) {
  require_convergent(eps);
  double eps_std = eps / d.sigma();
  return normal_series(eps_std, delta, plan) +
         difference_series(d, eps_std, delta, plan);
}

CertifiedValue davis_series(const ExactNormal& n, double eps, double delta,
                            const EvalPlan& plan) {
  require_convergent(eps);
  return normal_series(eps / n.sigma, delta, plan);
}

CertifiedValue davis_remainder(const dist::LatticeDistribution& d, double eps,
                               double delta, const EvalPlan& plan) {
  require_convergent(eps);
  double eps_std = eps / d.sigma();
  return normal_series_remainder(eps_std, delta, plan) +
         difference_series(d, eps_std, delta, plan);
}

CertifiedValue davis_remainder(const ExactNormal& n, double eps, double delta,
                               const EvalPlan& plan) {
  require_convergent(eps);
  return normal_series_remainder(eps / n.sigma, delta, plan);
}

namespace {

struct HeydeNormalParts {
  double integral;             // integral_N^inf P(|N| >= c sqrt x) dx
  double lead_minus_integral;  // sigma^2/eps^2 - integral
};

HeydeNormalParts heyde_normal_parts(double N, double c) {
  double a = c * std::sqrt(N);
  double x = 0.5 * a * a;
  double inv_c2 = 1.0 / (c * c);
  double q_half = specfn::upper_incomplete_gamma_reg(0.5, x);
  HeydeNormalParts parts;
  parts.integral = inv_c2 * (specfn::upper_incomplete_gamma_reg(1.5, x) -
                             a * a * q_half);
  parts.lead_minus_integral =
      inv_c2 * (specfn::lower_incomplete_gamma_reg(1.5, x) + a * a * q_half);
  return parts;
}

NormalEval eval_heyde_normal(double c, const EvalPlan& plan, bool remainder) {
  std::uint64_t N = plan.n_normal;
  double dN = static_cast<double>(N);
  double head = kernels::sqrt_arg_tail_sum(1, N + 1, c);
  HeydeNormalParts parts = heyde_normal_parts(dN, c);
  double fN = specfn::erfc(c * std::sqrt(dN) * kInvSqrt2);
  double value, bound;
  if (plan.tail_method == TailMethod::integral_em) {
    value = remainder ? head - parts.lead_minus_integral - 0.5 * fN
                      : head + parts.integral - 0.5 * fN;
    bound = 0.5 * fN;
  } else {
    value = remainder ? head - parts.lead_minus_integral - parts.integral
                      : head;
    bound = parts.integral + fN;
  }
  bound += 1e-14 * (std::fabs(head) + std::fabs(parts.integral) +
                    std::fabs(parts.lead_minus_integral));
  return {value, bound, N};
}

}  // namespace

CertifiedValue heyde_klesov_series(const ExactNormal& n, double eps,
                                   const EvalPlan& plan) {
  require_convergent(eps);
  plan.validate();
  NormalEval e = eval_heyde_normal(eps / n.sigma, plan, false);
  return {e.value, e.bound, BoundKind::rigorous, e.terms};
}

CertifiedValue klesov_remainder(const ExactNormal& n, double eps,
                                const EvalPlan& plan) {
  require_convergent(eps);
  plan.validate();
  NormalEval e = eval_heyde_normal(eps / n.sigma, plan, true);
  return {e.value, e.bound, BoundKind::rigorous, e.terms};
}

CertifiedValue heyde_klesov_series(const dist::LatticeDistribution& d,
                                   double eps, const EvalPlan& plan) {
  require_convergent(eps);
  plan.validate();
  if (!d.is_centered())
    throw std::invalid_argument("heyde_klesov_series: law must be centered");
  double sigma = d.sigma();
  double c = eps / sigma;

  // Hoeffding decay rate of the exact-walk tail at threshold eps n
  const auto& at = d.atoms();
  double range = d.scale() * static_cast<double>(at.back().offset -
                                                 at.front().offset);
  double beta = 2.0 * eps * eps / (range * range);
  std::uint64_t N = plan.n_exact;
  if (!d.is_two_point() && N > kGeneralHeadCap) N = kGeneralHeadCap;

  bool two_point = d.is_two_point();
  std::optional<TwoPointTailSweep> tp;
  std::optional<WalkTail> wt;
  if (two_point)
    tp.emplace(d);
  else
    wt.emplace(d, N);
  double rscale = d.reduced_scale();
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    double dn = static_cast<double>(n);
    double tau = eps * dn / rscale;
    double pw = two_point ? tp->tail(n, tau) : wt->tail(n, tau);
    double pn = specfn::erfc(c * std::sqrt(dn) * kInvSqrt2);
    double y = (pw - pn) - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  // difference tail bound: Hoeffding + the normal integral
  double dN = static_cast<double>(N);
  double hoeff = 2.0 * std::exp(-beta * (dN + 1.0)) / (-std::expm1(-beta));
  double norm_tail = heyde_normal_parts(dN, c).integral;
  CertifiedValue diff{sum, hoeff + norm_tail + 1e-15 * dN,
                      BoundKind::rigorous, N};
  NormalEval nm = eval_heyde_normal(c, plan, false);
  return diff + CertifiedValue{nm.value, nm.bound, BoundKind::rigorous,
                               nm.terms};
}

}  // namespace asymptotica::series
