#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cccp {

/// Raised when an argument lies outside an operation's domain
/// (state index out of range, invalid tolerance, mismatched instances).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised by the hitting-time solvers when p = 1: the full collection is
/// never reached, so the expected hitting time is infinite.
class NonAbsorbingError : public DomainError {
 public:
  NonAbsorbingError();
};

/// A problem instance: n coupon types, per-round per-coupon loss probability p.
class Params {
 public:
  /// Throws DomainError unless n >= 1 and 0 <= p <= 1.
  Params(std::uint32_t n, double p);

  std::uint32_t n() const noexcept { return n_; }
  double p() const noexcept { return p_; }

  /// True when every held coupon is lost every round.
  bool never_completes() const noexcept { return p_ >= 1.0; }

  friend bool operator==(const Params&, const Params&) = default;

 private:
  std::uint32_t n_;
  double p_;
};

std::string to_string(const Params& params);

}  // namespace cccp
