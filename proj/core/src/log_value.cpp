#include "cccp/log_value.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cccp {

LogValue LogValue::from_linear(double x) noexcept { return LogValue{std::log(x)}; }

double LogValue::linear() const noexcept { return std::exp(ln_v); }

double LogValue::log10() const noexcept { return ln_v / std::numbers::ln10; }

bool LogValue::representable() const noexcept { return std::isfinite(linear()); }

LogValue operator+(LogValue x, LogValue y) noexcept {
  const double hi = std::max(x.ln_v, y.ln_v);
  const double lo = std::min(x.ln_v, y.ln_v);
  if (lo == -std::numeric_limits<double>::infinity() || hi == std::numeric_limits<double>::infinity())
    return LogValue{hi};
  return LogValue{hi + std::log1p(std::exp(lo - hi))};
}

}  // namespace cccp
