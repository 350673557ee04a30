#pragma once

#include <compare>
#include <limits>

namespace cccp {

/// A nonnegative quantity carried as its natural logarithm, so values like
/// e^{10^4} stay representable. ln_v = -inf encodes zero.
struct LogValue {
  double ln_v = -std::numeric_limits<double>::infinity();

  static LogValue from_ln(double ln) noexcept { return LogValue{ln}; }
  /// Requires x >= 0.
  static LogValue from_linear(double x) noexcept;
  static LogValue zero() noexcept { return LogValue{}; }
  static LogValue infinity() noexcept { return LogValue{std::numeric_limits<double>::infinity()}; }

  bool is_zero() const noexcept { return ln_v == -std::numeric_limits<double>::infinity(); }
  bool is_infinite() const noexcept { return ln_v == std::numeric_limits<double>::infinity(); }

  /// exp(ln_v); +inf when the value exceeds the double range.
  double linear() const noexcept;
  double log10() const noexcept;
  /// True when linear() is finite.
  bool representable() const noexcept;

  friend LogValue operator+(LogValue x, LogValue y) noexcept;  // log-sum-exp
  friend LogValue operator*(LogValue x, LogValue y) noexcept { return {x.ln_v + y.ln_v}; }
  friend LogValue operator/(LogValue x, LogValue y) noexcept { return {x.ln_v - y.ln_v}; }

  friend auto operator<=>(const LogValue& x, const LogValue& y) noexcept { return x.ln_v <=> y.ln_v; }
  friend bool operator==(const LogValue& x, const LogValue& y) noexcept { return x.ln_v == y.ln_v; }
};

}  // namespace cccp
