// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0
//
// eps-sweep experiments: evaluate a mode's remainder (or scaled series)
// along a decreasing eps grid, extrapolate the eps -> 0 limit, and compare
// against the independently computed target constant. Targets always come
// from the constants/specfn path, never from the series being tested.

#ifndef ASYMPTOTICA_VERIFY_HPP
#define ASYMPTOTICA_VERIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "asymptotica/certified.hpp"
#include "asymptotica/dist.hpp"
#include "asymptotica/series.hpp"

namespace asymptotica::verify {

enum class Mode {
  theorem11,      // davis remainder -> gamma_delta - eta_delta
  gs_leading,     // eps^{2d+2} davis -> E|N|^{2d+2} sigma^{2d+2}/(d+1)
  klesov_normal,  // heyde remainder (exact normal) -> -1/2
  heyde_leading,  // eps^2 heyde -> sigma^2
  prop21,         // normal-series remainder -> gamma_delta
  prop31,         // difference series -> -eta_delta
};

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

/// Either a lattice law or the exactly-normal marker.
struct DistSpec {
  bool exact_normal = false;
  double normal_sigma = 1.0;
  std::optional<dist::LatticeDistribution> lattice;
  std::string repr;

  /// accepts the lattice mini-language plus "normal" / "normal:<sigma>"
  static DistSpec parse(const std::string& spec);
  static DistSpec normal(double sigma = 1.0);
  static DistSpec of(dist::LatticeDistribution d);
  double sigma() const;
};

enum class Extrapolation { last_point, power_fit };

struct SweepSpec {
  Mode mode = Mode::theorem11;
  DistSpec dist;
  double delta = 0.0;
  std::vector<double> eps_grid;  // strictly decreasing, >= 3 points
  series::EvalPlan plan;
  Extrapolation extrapolation = Extrapolation::power_fit;
  double tolerance = 0.02;
  std::uint64_t seed = 0;

  /// mode-appropriate defaults (grid, plan); see the README for why the
  /// lattice modes default to a much smaller eps range
  static SweepSpec defaults(Mode mode, DistSpec dist, double delta);
  void validate() const;
};

struct SweepPoint {
  double eps = 0.0;
  double value = 0.0;        // the full series at this eps
  double error_bound = 0.0;  // certified bound on the series value
  double remainder = 0.0;    // the tracked quantity (remainder or scaled)
  double remainder_bound = 0.0;

  bool operator==(const SweepPoint&) const = default;
};

struct Extrapolated {
  double limit = 0.0;
  double uncertainty = 0.0;
  std::string model;  // which fit family member won

  bool operator==(const Extrapolated&) const = default;
};

struct VerifyReport {
  std::string schema_version = "1";
  std::string mode;
  std::string dist;
  double delta = 0.0;
  std::string log_convention;
  std::string extrapolation;
  double tolerance = 0.02;
  std::uint64_t seed = 0;
  std::uint64_t n_exact = 0, n_normal = 0;
  std::string isa;
  std::string library_version;
  double envelope_c_fit = 0.0, envelope_c_safe = 0.0;
  std::vector<SweepPoint> points;
  Extrapolated extrapolated;
  double target = 0.0;
  double target_uncertainty = 0.0;
  bool pass = false;
  std::string error;  // nonempty when a component failed

  bool operator==(const VerifyReport&) const = default;
};

struct FitPoint {
  double eps = 0.0;
  double value = 0.0;
  double uncertainty = 0.0;
};

/// A candidate model value(eps) ~ L + sum_k a_k * feature_k(eps); features
/// are pre-evaluated on the grid.
struct FitModel {
  std::string name;
  std::vector<std::vector<double>> features;
};

/// last_point: final value, its bound plus the last spread.
/// power_fit: least squares over the model family eps^{1/2}, eps, eps^{3/2}
/// (plus mode-supplied extra models); minimal residual wins.
Extrapolated extrapolate(const std::vector<FitPoint>& points,
                         Extrapolation method,
                         const std::vector<FitModel>& extra = {});

/// Evaluate the sweep. Component errors are captured in the report (error
/// field set, pass = false) rather than thrown.
VerifyReport run_sweep(const SweepSpec& spec);

std::string to_json(const VerifyReport& r);
VerifyReport report_from_json(const std::string& text);
/// RFC-4180 CSV of the per-eps rows, 17 significant digits.
std::string to_csv(const VerifyReport& r);

std::string library_version();

}  // namespace asymptotica::verify

#endif  // ASYMPTOTICA_VERIFY_HPP
