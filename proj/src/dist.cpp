// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0

#include "asymptotica/dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "asymptotica/kernels.hpp"
#include "asymptotica/specfn.hpp"

namespace asymptotica::dist {

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

LatticeDistribution LatticeDistribution::create(std::vector<Atom> atoms,
                                                double scale) {
  if (!(scale > 0.0))
    throw std::invalid_argument("LatticeDistribution: scale must be > 0");
  if (atoms.size() < 2)
    throw std::invalid_argument(
        "LatticeDistribution: need at least two atoms (sigma^2 > 0)");
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& x, const Atom& y) { return x.offset < y.offset; });
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(atoms[i].prob > 0.0))
      throw std::invalid_argument(
          "LatticeDistribution: probabilities must be positive");
    if (i && atoms[i].offset == atoms[i - 1].offset)
      throw std::invalid_argument("LatticeDistribution: duplicate offsets");
    total += atoms[i].prob;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw std::invalid_argument(
        "LatticeDistribution: probabilities must sum to 1 (got " +
        std::to_string(total) + ")");
  for (auto& a : atoms) a.prob /= total;

  LatticeDistribution d;
  d.atoms_ = atoms;
  d.scale_ = scale;

  std::int64_t g = 0;
  for (const auto& a : atoms) g = gcd64(g, a.offset);
  if (g == 0)
    throw std::invalid_argument("LatticeDistribution: all offsets are zero");
  d.reduced_ = atoms;
  for (auto& a : d.reduced_) a.offset /= g;
  d.reduced_scale_ = scale * static_cast<double>(g);

  double m1 = 0.0, m2 = 0.0, m3a = 0.0;
  for (const auto& a : d.reduced_) {
    double x = static_cast<double>(a.offset);
    m1 += a.prob * x;
    m2 += a.prob * x * x;
    m3a += a.prob * std::fabs(x * x * x);
  }
  d.sigma_red_ = std::sqrt(std::max(0.0, m2 - m1 * m1));
  d.mean_ = d.reduced_scale_ * m1;
  d.variance_ = d.reduced_scale_ * d.reduced_scale_ * (m2 - m1 * m1);
  d.sigma_ = std::sqrt(std::max(0.0, d.variance_));
  double s3 = d.reduced_scale_ * d.reduced_scale_ * d.reduced_scale_;
  d.third_abs_ = s3 * m3a;
  if (!(d.variance_ > 0.0))
    throw std::invalid_argument("LatticeDistribution: sigma^2 must be > 0");

  std::int64_t span = 0;
  std::int64_t h0 = d.reduced_.front().offset;
  for (const auto& a : d.reduced_) span = gcd64(span, a.offset - h0);
  if (span == 0) span = 1;  // cannot happen with >= 2 distinct offsets
  d.span_ = span;
  d.residue_ = ((h0 % span) + span) % span;
  return d;
}

LatticeDistribution LatticeDistribution::rademacher() {
  return create({{-1, 0.5}, {1, 0.5}});
}

LatticeDistribution LatticeDistribution::uniform3() {
  return create({{-1, 1.0 / 3.0}, {0, 1.0 / 3.0}, {1, 1.0 / 3.0}});
}

bool LatticeDistribution::return_feasible(std::uint64_t n) const {
  std::int64_t d = span_;
  std::int64_t nr = static_cast<std::int64_t>(n % static_cast<std::uint64_t>(d));
  return (nr * residue_) % d == 0;
}

std::uint64_t LatticeDistribution::feasible_step() const {
  if (residue_ == 0) return 1;
  return static_cast<std::uint64_t>(span_ / gcd64(span_, residue_));
}

bool LatticeDistribution::is_centered(double tol) const {
  return std::fabs(mean_) <= tol;
}

std::complex<double> LatticeDistribution::cf_reduced(double t) const {
  double re = 0.0, im = 0.0;
  for (const auto& a : reduced_) {
    double th = t * static_cast<double>(a.offset);
    re += a.prob * std::cos(th);
    im += a.prob * std::sin(th);
  }
  return {re, im};
}

std::string LatticeDistribution::repr() const {
  std::ostringstream os;
  os.precision(17);
  os << "lattice:";
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (i) os << ",";
    os << atoms_[i].offset << ":" << atoms_[i].prob;
  }
  if (scale_ != 1.0) os << ";scale=" << scale_;
  return os.str();
}

double ExactSumDistribution::mass() const {
  double s = 0.0, c = 0.0;
  for (double v : pmf) {
    double y = v - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double ExactSumDistribution::at_offset(std::int64_t offset) const {
  std::int64_t i = offset - min_offset;
  if (i < 0 || i >= static_cast<std::int64_t>(pmf.size())) return 0.0;
  return pmf[static_cast<std::size_t>(i)];
}

double ExactSumDistribution::tail_two_sided(double t) const {
  if (t <= 0.0) return 1.0;
  double tau = t / scale;
  // offset qualifies iff |offset| >= tau
  std::int64_t v = static_cast<std::int64_t>(std::ceil(tau));
  double upper = 0.0, lower = 0.0;
  std::int64_t max_offset = min_offset + static_cast<std::int64_t>(pmf.size()) - 1;
  // outermost first: ascending magnitudes accumulate accurately
  for (std::int64_t off = max_offset; off >= v; --off) upper += at_offset(off);
  for (std::int64_t off = min_offset; off <= -v; ++off) lower += at_offset(off);
  double s = upper + lower;
  return s > 1.0 ? 1.0 : s;
}

ExactSumDistribution convolve_power(const LatticeDistribution& d,
                                    std::uint64_t n, std::uint64_t ceiling) {
  if (n == 0) throw std::invalid_argument("convolve_power: n >= 1");
  if (n > ceiling)
    throw resource_error(
        "convolve_power: n exceeds the convolution ceiling (" +
        std::to_string(ceiling) +
        "); use the closed-form or normal+difference path");
  const auto& atoms = d.reduced_atoms();
  std::int64_t base_min = atoms.front().offset;
  std::int64_t base_max = atoms.back().offset;
  std::vector<double> base(static_cast<std::size_t>(base_max - base_min + 1), 0.0);
  for (const auto& a : atoms)
    base[static_cast<std::size_t>(a.offset - base_min)] = a.prob;

  auto conv = [](const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size() + y.size() - 1, 0.0);
    kernels::convolve_accumulate(x.data(), x.size(), y.data(), y.size(),
                                 out.data());
    return out;
  };

  std::vector<double> acc;
  std::int64_t acc_min = 0;
  std::vector<double> sq = base;
  std::int64_t sq_min = base_min;
  std::uint64_t bits = n;
  for (;;) {
    if (bits & 1u) {
      if (acc.empty()) {
        acc = sq;
        acc_min = sq_min;
      } else {
        acc = conv(acc, sq);
        acc_min += sq_min;
      }
    }
    bits >>= 1u;
    if (!bits) break;
    sq = conv(sq, sq);
    sq_min += sq_min;
  }
  ExactSumDistribution out;
  out.n = n;
  out.min_offset = acc_min;
  out.pmf = std::move(acc);
  out.scale = d.reduced_scale();
  return out;
}

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1], computed once by
// Newton iteration on the Legendre polynomial.
struct GaussLegendre16 {
  double node[16];
  double weight[16];
  GaussLegendre16() {
    const int m = 16;
    for (int i = 0; i < m / 2; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= m; ++k) {
          double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        double dp = m * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::fabs(dx) < 1e-16) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = m * (x * p1 - p0) / (x * x - 1.0);
      double w = 2.0 / ((1.0 - x * x) * dp * dp);
      node[i] = -x;
      node[m - 1 - i] = x;
      weight[i] = w;
      weight[m - 1 - i] = w;
    }
  }
};

const GaussLegendre16& gl16() {
  static const GaussLegendre16 g;
  return g;
}

}  // namespace

double pmf_at_zero(const LatticeDistribution& d, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("pmf_at_zero: n >= 1");
  if (!d.return_feasible(n)) return 0.0;
  double dn = static_cast<double>(n);
  double span = static_cast<double>(d.span());
  double range = M_PI / span;
  // panel count grows with sqrt(n) so the central peak (width ~ 1/(sigma
  // sqrt n)) is always resolved
  std::uint64_t panels = static_cast<std::uint64_t>(
      std::ceil(1.0 + d.sigma_reduced() * std::sqrt(dn) * range));
  if (panels < 8) panels = 8;
  const auto& g = gl16();
  double h = range / static_cast<double>(panels);
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t pnl = 0; pnl < panels; ++pnl) {
    double t0 = static_cast<double>(pnl) * h;
    for (int k = 0; k < 16; ++k) {
      double t = t0 + 0.5 * h * (g.node[k] + 1.0);
      std::complex<double> phi = d.cf_reduced(t);
      double r2 = std::norm(phi);
      double val = 0.0;
      if (r2 > 0.0) {
        double logr = 0.5 * std::log(r2);
        double theta = std::atan2(phi.imag(), phi.real());
        double mag = std::exp(dn * logr);
        val = mag == 0.0 ? 0.0 : mag * std::cos(dn * theta);
      }
      double term = 0.5 * h * g.weight[k] * val;
      double y = term - comp;
      double t2 = sum + y;
      comp = (t2 - sum) - y;
      sum = t2;
    }
  }
  double res = sum * span / M_PI;
  if (res < 0.0 && res > -1e-13) res = 0.0;
  return res;
}

namespace {

// Two-point law in reduced units: offsets {-a, +b}, P(X = b) = pb.
struct TwoPoint {
  std::int64_t a = 0, b = 0;
  double pb = 0.0;
};

TwoPoint two_point_of(const LatticeDistribution& d) {
  const auto& r = d.reduced_atoms();
  TwoPoint tp;
  tp.a = -r.front().offset;
  tp.b = r.back().offset;
  tp.pb = r.back().prob;
  return tp;
}

// P(|S_n| >= tau) for a two-point law, tau in reduced offset units.
double two_point_tail(const TwoPoint& tp, std::uint64_t n, double tau) {
  if (tau <= 0.0) return 1.0;
  double q = static_cast<double>(tp.a + tp.b);
  double na = static_cast<double>(n) * static_cast<double>(tp.a);
  // S = K (a+b) - n a over K up-steps
  std::int64_t k_up = static_cast<std::int64_t>(std::ceil((na + tau) / q));
  std::int64_t k_dn = static_cast<std::int64_t>(std::floor((na - tau) / q));
  double up = specfn::binomial_tail_geq(n, tp.pb, k_up);
  double dn = 1.0 - specfn::binomial_tail_geq(n, tp.pb, k_dn + 1);
  double s = up + dn;
  return s > 1.0 ? 1.0 : s;
}

}  // namespace

double tail_two_sided(const LatticeDistribution& d, std::uint64_t n, double t,
                      std::uint64_t ceiling) {
  if (n == 0) throw std::invalid_argument("tail_two_sided: n >= 1");
  if (t < 0.0) throw std::domain_error("tail_two_sided: t >= 0");
  if (t == 0.0) return 1.0;
  double tau = t / d.reduced_scale();
  if (d.is_two_point()) return two_point_tail(two_point_of(d), n, tau);
  ExactSumDistribution s = convolve_power(d, n, ceiling);
  return s.tail_two_sided(t);
}

namespace {

// Kolmogorov scan over the jump points of |S_n| / (sigma sqrt n). pmf is
// indexed by reduced offset (min_offset at index 0).
double kolmogorov_scan(const double* pmf, std::size_t len,
                       std::int64_t min_offset, std::uint64_t n,
                       double sigma_red) {
  std::int64_t max_offset = min_offset + static_cast<std::int64_t>(len) - 1;
  std::int64_t vmax = std::max(std::llabs(min_offset), std::llabs(max_offset));
  double sn = sigma_red * std::sqrt(static_cast<double>(n));
  // only jumps with x <= xcut matter: beyond, both tails are < 1e-13
  double vcut_d = 8.0 * sn;
  std::int64_t vcut = vmax;
  if (vcut_d < static_cast<double>(vmax)) {
    vcut = static_cast<std::int64_t>(vcut_d) + 1;
  }
  auto at = [&](std::int64_t off) -> double {
    std::int64_t i = off - min_offset;
    if (i < 0 || i >= static_cast<std::int64_t>(len)) return 0.0;
    return pmf[static_cast<std::size_t>(i)];
  };
  // mass beyond the cut, summed outermost-first
  double beyond = 0.0;
  for (std::int64_t off = max_offset; off > vcut; --off) beyond += at(off);
  for (std::int64_t off = min_offset; off < -vcut; ++off) beyond += at(off);
  // suffix tails T[v] = P(|S| >= v), v = 0..vcut
  std::vector<double> tail(static_cast<std::size_t>(vcut) + 2, 0.0);
  tail[static_cast<std::size_t>(vcut) + 1] = beyond;
  for (std::int64_t v = vcut; v >= 0; --v) {
    double m = v == 0 ? at(0) : at(v) + at(-v);
    tail[static_cast<std::size_t>(v)] = m + tail[static_cast<std::size_t>(v) + 1];
  }
  double lambda = 0.0;
  for (std::int64_t v = 0; v <= vcut; ++v) {
    double m = v == 0 ? at(0) : at(v) + at(-v);
    if (m == 0.0) continue;  // no jump here
    double tv = tail[static_cast<std::size_t>(v)];
    double x = static_cast<double>(v) / sn;
    if (tv < 1e-13 && x > 7.7) break;
    double qn = specfn::erfc(x * kInvSqrt2);
    double below = std::fabs(tv - qn);
    double above = std::fabs(tail[static_cast<std::size_t>(v) + 1] - qn);
    if (below > lambda) lambda = below;
    if (above > lambda) lambda = above;
  }
  return lambda;
}

}  // namespace

double kolmogorov_two_sided(const LatticeDistribution& d, std::uint64_t n,
                            std::uint64_t ceiling) {
  ExactSumDistribution s = convolve_power(d, n, ceiling);
  return kolmogorov_scan(s.pmf.data(), s.pmf.size(), s.min_offset, n,
                         d.sigma_reduced());
}

std::vector<double> kolmogorov_profile(const LatticeDistribution& d,
                                       std::uint64_t n_max) {
  const auto& atoms = d.reduced_atoms();
  std::int64_t amin = atoms.front().offset;
  std::int64_t amax = atoms.back().offset;
  std::int64_t lo = amin < 0 ? amin * static_cast<std::int64_t>(n_max) : 0;
  std::int64_t hi = amax > 0 ? amax * static_cast<std::int64_t>(n_max) : 0;
  std::size_t width = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> cur(width, 0.0), next(width, 0.0);
  // index of offset 0 is -lo
  for (const auto& a : atoms)
    cur[static_cast<std::size_t>(a.offset - lo)] = a.prob;

  std::vector<double> out(n_max + 1, 0.0);
  std::int64_t cur_min = amin, cur_max = amax;
  out[1] = kolmogorov_scan(cur.data() + (cur_min - lo),
                           static_cast<std::size_t>(cur_max - cur_min + 1),
                           cur_min, 1, d.sigma_reduced());
  for (std::uint64_t n = 2; n <= n_max; ++n) {
    std::int64_t nmin = cur_min + amin, nmax = cur_max + amax;
    std::size_t nlen = static_cast<std::size_t>(nmax - nmin + 1);
    std::memset(next.data() + (nmin - lo), 0, nlen * sizeof(double));
    std::size_t clen = static_cast<std::size_t>(cur_max - cur_min + 1);
    for (const auto& a : atoms) {
      kernels::axpy(next.data() + (cur_min + a.offset - lo),
                    cur.data() + (cur_min - lo), clen, a.prob);
    }
    cur.swap(next);
    cur_min = nmin;
    cur_max = nmax;
    out[n] = kolmogorov_scan(cur.data() + (cur_min - lo), nlen, cur_min, n,
                             d.sigma_reduced());
  }
  return out;
}

double nagaev_bound(std::uint64_t n, double x, double third_abs_moment,
                    double C) {
  if (n == 0) throw std::invalid_argument("nagaev_bound: n >= 1");
  double ax = std::fabs(x);
  return C * third_abs_moment /
         (std::sqrt(static_cast<double>(n)) * (1.0 + ax * ax * ax));
}

double heyde_series_partial(const LatticeDistribution& d, double delta,
                            std::uint64_t N) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::domain_error("heyde_series_partial: delta in [0, 1)");
  std::vector<double> lam = kolmogorov_profile(d, N);
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t n = 1; n <= N; ++n) {
    double w = std::pow(static_cast<double>(n), 0.5 * delta - 1.0);
    double y = w * lam[n] - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

CertifiedValue mc_tail(const LatticeDistribution& d, std::uint64_t n, double t,
                       std::uint64_t reps, std::uint64_t seed) {
  if (reps < 100) throw std::invalid_argument("mc_tail: reps >= 100");
  if (t < 0.0) throw std::domain_error("mc_tail: t >= 0");
  const auto& atoms = d.reduced_atoms();
  std::size_t k = atoms.size();
  std::vector<double> cum(k);
  std::vector<std::int64_t> off(k);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    acc += atoms[i].prob;
    cum[i] = acc;
    off[i] = atoms[i].offset;
  }
  cum[k - 1] = 1.0 + 1e-9;  // guard against roundoff at the top
  double tau = t / d.reduced_scale();
  std::mt19937_64 eng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t r = 0; r < reps; ++r) {
    std::int64_t s = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
      std::size_t j = 0;
      while (u > cum[j]) ++j;
      s += off[j];
    }
    if (std::fabs(static_cast<double>(s)) >= tau) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(reps);
  double se = std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
  return {p, se, BoundKind::standard_error, reps};
}

LatticeDistribution parse_distribution(const std::string& spec) {
  std::string body = spec;
  double scale = 1.0;
  auto pos = body.find(";scale=");
  std::size_t taglen = 7;
  if (pos == std::string::npos) {
    pos = body.find(" scale=");
  }
  if (pos != std::string::npos) {
    scale = std::stod(body.substr(pos + taglen));
    body = body.substr(0, pos);
  }
  if (body == "rademacher") {
    auto d = LatticeDistribution::rademacher();
    return scale == 1.0 ? d
                        : LatticeDistribution::create(d.atoms(), scale);
  }
  if (body == "uniform3") {
    auto d = LatticeDistribution::uniform3();
    return scale == 1.0 ? d
                        : LatticeDistribution::create(d.atoms(), scale);
  }
  const std::string prefix = "lattice:";
  if (body.rfind(prefix, 0) != 0)
    throw std::invalid_argument("unknown distribution spec: '" + spec + "'");
  std::vector<Atom> atoms;
  std::stringstream ss(body.substr(prefix.size()));
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("bad atom '" + item +
                                  "' (expected offset:prob)");
    Atom a;
    a.offset = std::stoll(item.substr(0, colon));
    a.prob = std::stod(item.substr(colon + 1));
    atoms.push_back(a);
  }
  if (atoms.empty())
    throw std::invalid_argument("empty lattice distribution spec");
  return LatticeDistribution::create(std::move(atoms), scale);
}

}  // namespace asymptotica::dist
