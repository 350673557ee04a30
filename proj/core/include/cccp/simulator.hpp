#pragma once

// Seeded Monte Carlo for the careless collector. Replication r of a batch
// always runs on make_stream(seed, r), and batch results are merged in
// replication order (integer accumulators where order could matter), so
// every output is a function of (params, seed, runs) alone and does not
// depend on the thread count.

#include <cstdint>
#include <optional>
#include <vector>

#include "cccp/chain_model.hpp"
#include "cccp/params.hpp"
#include "cccp/random.hpp"

namespace cccp {

inline constexpr std::uint64_t kDefaultMaxSteps = 1'000'000;

struct SimOutcome {
  std::optional<std::uint64_t> hitting_time;  // empty when censored
  std::uint64_t steps_used = 0;
  std::uint64_t seed = 0;  // master seed
  std::uint64_t replication = 0;

  bool censored() const noexcept { return !hitting_time.has_value(); }
  std::uint64_t stream_seed() const noexcept { return substream_seed(seed, replication); }
};

/// First t >= 1 with K_t = n, from K_0 = 0, on the count chain; censored
/// after max_steps rounds. Throws DomainError when max_steps == 0.
SimOutcome simulate_hitting_time(const Params& params, std::uint64_t seed, std::uint64_t max_steps,
                                 std::uint64_t replication = 0);

enum class ChainKind { Reduced, Full };

struct TrajectoryRecord {
  Params params;
  std::uint64_t seed = 0;
  std::uint64_t replication = 0;
  std::vector<std::uint32_t> sizes;  // sizes[t] = |S_t|, t = 0..horizon
};

TrajectoryRecord simulate_trajectory(const Params& params, std::uint64_t seed, std::uint64_t horizon,
                                     std::uint64_t replication = 0, ChainKind kind = ChainKind::Reduced);

struct CoupledOutcome {
  SimOutcome t1;  // loss probability p1
  SimOutcome t2;  // loss probability p2 >= p1
  bool inclusion_held = true;
};

/// Both set-valued chains share C_t and one uniform U_{i,t} per coupon per
/// round (drawn for i = 1..n ascending); coupon i is lost under p when
/// U_{i,t} < p. Runs until both complete or max_steps, checking
/// S^{(p1)} contains S^{(p2)} after every round. Throws DomainError unless
/// the instances share n and p1 <= p2.
CoupledOutcome simulate_coupled(const Params& params1, const Params& params2, std::uint64_t seed,
                                std::uint64_t max_steps, std::uint64_t replication = 0);

struct MarginalEstimate {
  double estimate = 0.0;
  double stderr = 0.0;  // sqrt(est (1 - est) / runs)
};

/// Frequency of {1 in S_t} over independent full-chain runs.
/// Throws DomainError when runs < 100.
MarginalEstimate estimate_marginal(const Params& params, std::uint64_t t, std::uint64_t runs, std::uint64_t seed,
                                   unsigned threads = 0);

struct PairCovariance {
  double q1 = 0.0;
  double q2 = 0.0;
  double covariance = 0.0;  // Pr(1,2 in S_t) - Pr(1 in S_t) Pr(2 in S_t), sample version
  double stderr = 0.0;      // of the covariance estimate
};

/// Empirical covariance of the indicators {1 in S_t} and {2 in S_t}.
/// Requires n >= 2 and runs >= 100.
PairCovariance estimate_pair_covariance(const Params& params, std::uint64_t t, std::uint64_t runs,
                                        std::uint64_t seed, unsigned threads = 0);

struct HittingSummary {
  std::optional<double> mean;  // over uncensored runs; empty when all censored
  double variance = 0.0;       // sample variance over uncensored runs
  double stderr = 0.0;
  std::uint64_t censored = 0;
  std::uint64_t runs = 0;
  std::vector<SimOutcome> outcomes;  // replication order

  bool mean_defined() const noexcept { return mean.has_value(); }
};

HittingSummary batch_hitting_stats(const Params& params, std::uint64_t runs, std::uint64_t seed,
                                   std::uint64_t max_steps = kDefaultMaxSteps, unsigned threads = 0);

struct TrajectoryPoint {
  double mean_fraction = 0.0;  // average |S_t| / n
  double stderr = 0.0;
};

/// Per-round mean of |S_t|/n over `runs` trajectories, t = 0..horizon.
std::vector<TrajectoryPoint> batch_trajectory_stats(const Params& params, std::uint64_t runs, std::uint64_t seed,
                                                    std::uint64_t horizon, unsigned threads = 0,
                                                    ChainKind kind = ChainKind::Reduced);

struct BandViolationStats {
  std::uint64_t start = 0;
  std::uint64_t window = 0;
  double band_center = 0.0;     // n q*
  double band_halfwidth = 0.0;  // 2 delta n q*
  std::uint64_t runs = 0;
  std::uint64_t runs_violated = 0;
  std::uint64_t rounds_outside = 0;  // summed over runs
  double violation_frequency() const noexcept {
    return runs == 0 ? 0.0 : static_cast<double>(runs_violated) / static_cast<double>(runs);
  }
  double fraction_rounds_outside() const noexcept {
    return runs == 0 || window == 0 ? 0.0
                                    : static_cast<double>(rounds_outside) / static_cast<double>(runs * window);
  }
};

/// Runs the count chain to start + window - 1 and counts the rounds
/// t in [start, start + window) with ||S_t| - n q*| > 2 delta n q*. When
/// q* = 0 the band has zero width and every round counts as outside.
BandViolationStats band_violation_stats(const Params& params, double delta, std::uint64_t start,
                                        std::uint64_t window, std::uint64_t runs, std::uint64_t seed,
                                        unsigned threads = 0);

}  // namespace cccp
