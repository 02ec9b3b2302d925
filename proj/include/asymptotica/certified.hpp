// Copyright 2026 The Asymptotica Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef ASYMPTOTICA_CERTIFIED_HPP
#define ASYMPTOTICA_CERTIFIED_HPP

#include <cstdint>
#include <stdexcept>

namespace asymptotica {

/// How the error_bound of a CertifiedValue is to be read.
enum class BoundKind {
  /// Truncation analysis: the true quantity lies in
  /// [value - error_bound, value + error_bound] (up to double roundoff,
  /// which the producers pad for).
  rigorous,
  /// Monte Carlo standard error (one sigma), not a hard enclosure.
  standard_error,
};

/// A numeric result paired with an absolute error bound.
struct CertifiedValue {
  double value = 0.0;
  double error_bound = 0.0;
  BoundKind kind = BoundKind::rigorous;
  std::uint64_t terms_used = 0;

  double lo() const { return value - error_bound; }
  double hi() const { return value + error_bound; }

  /// Sum of two certified values; bounds add.
  CertifiedValue operator+(const CertifiedValue& o) const {
    BoundKind k = (kind == BoundKind::rigorous && o.kind == BoundKind::rigorous)
                      ? BoundKind::rigorous
                      : BoundKind::standard_error;
    return {value + o.value, error_bound + o.error_bound, k,
            terms_used + o.terms_used};
  }

  CertifiedValue operator-(double shift) const {
    return {value - shift, error_bound, kind, terms_used};
  }
};

/// Thrown when a requested tolerance cannot be certified within the
/// configured resource ceiling. Carries the best achieved bound.
class tolerance_error : public std::runtime_error {
 public:
  tolerance_error(const std::string& what, CertifiedValue best)
      : std::runtime_error(what), best_(best) {}
  const CertifiedValue& best() const { return best_; }

 private:
  CertifiedValue best_;
};

}  // namespace asymptotica

#endif  // ASYMPTOTICA_CERTIFIED_HPP
