#include "cccp/bounds_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "cccp/marginal_dynamics.hpp"

namespace cccp {

namespace {

constexpr double kBandLow = 0.1;
constexpr double kBandHigh = 10.0;

LogValue log_of_count(std::uint64_t t) {
  return t == 0 ? LogValue::zero() : LogValue::from_ln(std::log(static_cast<double>(t)));
}

double ln_n_ln_n(double n) { return std::log(n * std::log(n)); }

}  // namespace

MeanFieldInterval mean_field_interval(const Params& params, double epsilon) {
  const auto model = marginal_coeffs(params);
  if (!(epsilon > 0.0 && epsilon < model.q_star)) throw DomainError("epsilon must lie in (0, q*)");

  const double n = params.n();
  MeanFieldInterval out;
  out.epsilon = epsilon;
  out.t_mix = marginal_mixing_time(params, epsilon);
  const double t = static_cast<double>(out.t_mix);
  const double ln_qn = n * std::log(model.q_star);  // ln q*^n <= 0
  const double qn = std::exp(ln_qn);

  // T(1 - q*^n T), clamped at zero where the bracket goes negative.
  LogValue mixing_part = LogValue::zero();
  if (out.t_mix > 0) {
    const double shortfall = qn * t;
    if (shortfall < 1.0) {
      mixing_part = LogValue::from_ln(std::log(t) + std::log1p(-shortfall));
    } else {
      out.lower_clamped = true;
    }
  }
  // (1 - q*^n)^{T+1} / q*^n
  const LogValue escape_part = LogValue::from_ln((t + 1.0) * std::log1p(-qn) - ln_qn);
  out.lower = mixing_part + escape_part;

  const LogValue upper_escape = LogValue::from_ln(-n * std::log(model.q_star - epsilon));
  out.upper = log_of_count(out.t_mix) + upper_escape;
  return out;
}

std::string_view to_string(HittingRegime regime) {
  switch (regime) {
    case HittingRegime::Classical: return "Classical";
    case HittingRegime::SuperClassical: return "Super-classical";
    case HittingRegime::MetastableI: return "Metastable I";
    case HittingRegime::MetastableII: return "Metastable II";
    case HittingRegime::MetastableIII: return "Metastable III";
    case HittingRegime::Infinite: return "Infinite";
  }
  return "unknown";
}

double RegimeEstimate::log10_scale() const { return ln_scale / std::numbers::ln10; }

namespace {

// The regime's own expression, without the monotone envelope.
RegimeEstimate bucket_estimate(double n, double p) {
  const double ln_n = std::log(n);
  const LogValue baseline = LogValue::from_ln(ln_n_ln_n(n));

  RegimeEstimate out;
  if (p == 0.0) {
    out.label = HittingRegime::Classical;
    out.ln_scale = baseline.ln_v;
    return out;
  }
  if (p == 1.0) {
    out.label = HittingRegime::Infinite;
    out.ln_scale = std::numeric_limits<double>::infinity();
    return out;
  }

  const double per_n = n * p;                 // p relative to 1/n
  const double per_log = p * n * n / ln_n;     // p relative to ln n / n^2
  const bool log_band = per_log >= kBandLow && per_log <= kBandHigh;

  double escape_ln = 0.0;
  if (per_n > kBandHigh) {
    out.label = HittingRegime::MetastableIII;
    escape_ln = n * std::log(per_n / (1.0 - p));
  } else if (per_n >= kBandLow) {
    out.label = HittingRegime::MetastableII;
    out.c = per_n;
    out.boundary = log_band;
    escape_ln = n * std::log1p(per_n);
  } else if (per_log > kBandHigh) {
    out.label = HittingRegime::MetastableI;
    escape_ln = n * n * p / (1.0 - p);
  } else if (log_band) {
    out.label = HittingRegime::SuperClassical;
    out.c = per_log;
    escape_ln = per_log * ln_n;
  } else {
    out.label = HittingRegime::Classical;
    out.ln_scale = baseline.ln_v;
    return out;
  }
  out.ln_scale = (baseline + LogValue::from_ln(escape_ln)).ln_v;
  return out;
}

}  // namespace

RegimeEstimate hitting_regime(const Params& params) {
  if (params.n() < 2) throw DomainError("hitting_regime requires n >= 2");
  const double n = params.n();
  const double p = params.p();
  RegimeEstimate out = bucket_estimate(n, p);
  // Each bucket's expression grows with p, but neighbouring expressions
  // disagree by constant factors at the cutoffs. Carry the largest value
  // reached just below every cutoff at or under p, so the estimate never
  // drops as p grows.
  const double ln_n = std::log(n);
  for (const double edge : {kBandLow / n, kBandHigh / n, kBandLow * ln_n / (n * n), kBandHigh * ln_n / (n * n)}) {
    if (edge <= p && edge < 1.0) {
      out.ln_scale = std::max({out.ln_scale, bucket_estimate(n, std::nextafter(edge, 0.0)).ln_scale,
                               bucket_estimate(n, edge).ln_scale});
    }
  }
  return out;
}

EscapeBound escape_rate(const Params& params, double epsilon) {
  if (params.n() < 2) throw DomainError("escape_rate requires n >= 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  const double n = params.n();
  const double q_star = marginal_coeffs(params).q_star;

  EscapeBound out;
  out.epsilon = epsilon;
  out.block_len = static_cast<std::uint64_t>(std::ceil(n * std::log(n)));
  out.good_threshold = static_cast<std::uint64_t>(std::ceil((1.0 - epsilon) * n * q_star));
  if (params.never_completes()) {
    out.rho = LogValue::zero();
    return out;
  }
  out.rho = LogValue::from_ln(std::log(q_star) + std::log1p(-epsilon) +
                              n * n * std::log(n) * std::log1p(-params.p()));
  return out;
}

LogValue unconditional_upper_bound(const Params& params, double epsilon) {
  const auto escape = escape_rate(params, epsilon);
  if (escape.rho.is_zero()) return LogValue::infinity();
  const LogValue blocks = log_of_count(escape.block_len) / escape.rho;
  return log_of_count(marginal_mixing_time(params, epsilon)) + blocks;
}

LogValue unconditional_lower_bound(const Params& params) {
  const double q_star = marginal_coeffs(params).q_star;
  return LogValue::from_ln(-std::log(5.0) - static_cast<double>(params.n()) * std::log(q_star));
}

std::string_view to_string(MetastabilityVariant variant) {
  return variant == MetastabilityVariant::SmallP ? "small_p" : "large_p";
}

MetastabilityBound metastability_deviation_bound(const Params& params, double delta, std::uint64_t window,
                                                 MetastabilityVariant variant) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (window < 1) throw DomainError("window must be at least 1");
  const double n = params.n();
  const double ln_window = std::log(static_cast<double>(window));

  MetastabilityBound out;
  out.delta = delta;
  out.window = window;
  out.variant = variant;
  if (variant == MetastabilityVariant::SmallP) {
    const double q_star = marginal_coeffs(params).q_star;
    out.prob_bound = LogValue::from_ln(std::log(2.0) + ln_window - delta * delta * (1.0 - delta) * n * q_star / 3.0);
  } else {
    out.prob_bound = LogValue::from_ln(ln_window - delta * delta * n / 4.0);
  }
  out.vacuous = out.prob_bound.ln_v > 0.0;
  return out;
}

std::uint64_t metastability_start(const Params& params, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const double q_star = marginal_coeffs(params).q_star;
  if (q_star <= 0.0) return 0;
  return marginal_mixing_time(params, delta * q_star / 2.0);
}

}  // namespace cccp
