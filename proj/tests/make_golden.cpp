// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// Regenerates tests/golden/constants.txt from plain-loop oracles that are
// independent of the library's accelerated evaluation paths: direct
// summation for the gamma constants, direct log-gamma summation with a
// local-limit tail estimate for the eta constants.
//
//   make_golden [output-path]

#include <cmath>
#include <cstdio>
#include <string>

namespace {

double lg_paper(double x) {
  double l = std::log(x);
  return l < 1.0 ? 1.0 : l;
}

// gamma_delta by direct Kahan summation to N plus the endpoint correction;
// the first-order Euler-Maclaurin remainder is below (1/2) g(N)
struct Golden {
  double value, bound;
};

Golden gamma_direct(double delta, bool paper, std::uint64_t N) {
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t j = 1; j <= N; ++j) {
    double x = static_cast<double>(j);
    double l = paper ? lg_paper(x) : std::log(x);
    double w = l == 0.0 ? (delta == 0.0 ? 1.0 : 0.0)
                        : std::pow(l, delta);
    double y = w / x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double dN = static_cast<double>(N);
  double lN = std::log(dN);
  double g = std::pow(lN, delta) / dN;
  double value = sum - std::pow(lN, delta + 1.0) / (delta + 1.0) - 0.5 * g;
  return {value, 0.5 * g + 1e-12};
}

// eta_delta for the +-1 walk: direct summation of
// (log n)^delta / n * C(n, n/2) 2^-n over even n, then a local-limit tail
//   P(S_n = 0) = sqrt(2/(pi n)) (1 - 1/(4n) + O(n^-2))
// integrated past N; the n^-2 correction bounds the estimate error.
Golden eta_pm1_direct(double delta, bool paper, std::uint64_t N) {
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t n = 2; n <= N; n += 2) {
    double dn = static_cast<double>(n);
    double lp0 = std::lgamma(dn + 1.0) - 2.0 * std::lgamma(0.5 * dn + 1.0) -
                 dn * M_LN2;
    double l = paper ? lg_paper(dn) : std::log(dn);
    double w = std::pow(l, delta) / dn;
    double y = w * std::exp(lp0) - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  // tail: sum over even n > N of (ln n)^d/n sqrt(2/(pi n)) (1 - 1/(4n))
  // ~ (1/2) integral_N^inf (ln x)^d x^{-3/2} sqrt(2/pi) (1 - 1/(4x)) dx,
  // evaluated by midpoint steps in u = ln x (plenty for a 1e-10 oracle)
  double tail = 0.0;
  double u = std::log(static_cast<double>(N));
  const double du = 1e-4;
  for (int i = 0; i < 400000; ++i) {
    double um = u + (i + 0.5) * du;
    double x = std::exp(um);
    double f = std::pow(um, delta) * std::exp(-0.5 * um) *
               std::sqrt(2.0 / M_PI) * (1.0 - 0.25 / x);
    tail += 0.5 * f * du;
    if (um > 60.0) break;
  }
  // error scale of the dropped n^-2 local-limit term, plus the noise floor
  // of the plain lgamma difference (three ~1e8-sized values cancel)
  double dN = static_cast<double>(N);
  double bound = 0.1 * std::pow(std::log(dN), delta) * std::pow(dN, -1.5) +
                 1e-9;
  return {sum + tail, bound};
}

}  // namespace

int main(int argc, char** argv) {
  std::string path = argc > 1 ? argv[1] : "constants.txt";
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) {
    std::perror("fopen");
    return 1;
  }
  std::fprintf(f, "# quantity delta convention [dist] value error_bound\n");
  for (double delta : {0.0, 0.5, 1.0}) {
    Golden g = gamma_direct(delta, true, 200000000ull);
    std::fprintf(f, "gamma %g paper %.17g %.3g\n", delta, g.value, g.bound);
  }
  {
    Golden g = gamma_direct(1.0, false, 200000000ull);
    std::fprintf(f, "gamma 1 pure-ln %.17g %.3g\n", g.value, g.bound);
  }
  for (double delta : {0.0, 1.0}) {
    Golden g = eta_pm1_direct(delta, true, 40000000ull);
    std::fprintf(f, "eta %g paper rademacher %.17g %.3g\n", delta, g.value,
                 g.bound);
  }
  {
    Golden g = eta_pm1_direct(1.0, false, 40000000ull);
    std::fprintf(f, "eta 1 pure-ln rademacher %.17g %.3g\n", g.value,
                 g.bound);
  }
  std::fclose(f);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}
