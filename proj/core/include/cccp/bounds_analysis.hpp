#pragma once

// Analytic estimates of the hitting time and of metastability, all carried
// in natural-log space. Mean-field results rest on an independence
// assumption that the process does not satisfy and are heuristic; the
// unconditional bounds and deviation bounds are rigorous.

#include <cstdint>
#include <string_view>

#include "cccp/log_value.hpp"
#include "cccp/params.hpp"

namespace cccp {

struct MeanFieldInterval {
  LogValue lower;
  LogValue upper;
  std::uint64_t t_mix = 0;
  double epsilon = 0.0;
  bool lower_clamped = false;  // T(1 - q*^n T) was negative and replaced by 0
  static constexpr bool heuristic = true;
};

/// T(1 - q*^n T) + (1 - q*^n)^{T+1} / q*^n  <=  E[T]  <=  T + (q* - eps)^{-n},
/// with T the marginal mixing time at eps. Requires 0 < eps < q* (so p < 1).
MeanFieldInterval mean_field_interval(const Params& params, double epsilon);

enum class HittingRegime { Classical, SuperClassical, MetastableI, MetastableII, MetastableIII, Infinite };

std::string_view to_string(HittingRegime regime);

struct RegimeEstimate {
  HittingRegime label = HittingRegime::Classical;
  /// ln of n ln n plus the regime's dominant escape term:
  /// n^c (c = p n^2 / ln n), e^{n^2 p/(1-p)}, (1+c)^n (c = np), (np/(1-p))^n.
  double ln_scale = 0.0;
  double c = 0.0;         // the regime constant where one applies
  bool boundary = false;  // p lies in both constant-c bands (small n)

  double log10_scale() const;
};

/// Buckets p against (ln n)/n^2 and 1/n. The bands within a factor 10 of
/// either line are the constant-c regimes; outside them the o/omega regimes.
/// ln_scale is the bucket's expression, raised where needed to the value a
/// lower bucket reaches at its cutoff, so it is nondecreasing in p.
/// Requires n >= 2. p = 0 is Classical and p = 1 Infinite.
RegimeEstimate hitting_regime(const Params& params);

struct EscapeBound {
  LogValue rho;                      // q*(1-eps)(1-p)^{n^2 ln n}
  std::uint64_t block_len = 0;       // ceil(n ln n)
  std::uint64_t good_threshold = 0;  // ceil((1-eps) n q*), least good state
  double epsilon = 0.0;
};

/// Lower bound on completing the collection within one block of rounds from
/// any state at least (1-eps) n q*. Requires n >= 2 and 0 < eps < 1;
/// p = 1 gives rho = 0.
EscapeBound escape_rate(const Params& params, double epsilon);

/// E[T] <= T_mix(eps) + ceil(n ln n) / rho. +inf when p = 1.
LogValue unconditional_upper_bound(const Params& params, double epsilon);

/// E[T] >= 1 / (5 q*^n). +inf when p = 1.
LogValue unconditional_lower_bound(const Params& params);

enum class MetastabilityVariant { SmallP, LargeP };

std::string_view to_string(MetastabilityVariant variant);

struct MetastabilityBound {
  double delta = 0.0;
  std::uint64_t window = 0;
  LogValue prob_bound;
  MetastabilityVariant variant = MetastabilityVariant::SmallP;
  bool vacuous = false;  // prob_bound > 1
};

/// SmallP: Pr(exists t in [T, T+L) : ||S_t| - n q*| > 2 delta n q*) <= 2L exp(-delta^2 (1-delta) n q* / 3),
///         valid when T is the mixing time of some eps <= delta q*.
/// LargeP: Pr(exists t in [T, T+L) : |S_t| > delta n) <= L exp(-delta^2 n / 4).
/// Requires 0 < delta < 1 and window >= 1.
MetastabilityBound metastability_deviation_bound(const Params& params, double delta, std::uint64_t window,
                                                 MetastabilityVariant variant);

/// T_mix(delta q* / 2): a start round satisfying the SmallP precondition.
std::uint64_t metastability_start(const Params& params, double delta);

}  // namespace cccp
