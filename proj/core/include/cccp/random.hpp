#pragma once

// Pinned pseudo-random machinery. Every sampled quantity in the library is a
// deterministic function of the generator state, so equal seeds reproduce
// equal outputs on every platform (no std::*_distribution is used, since
// their algorithms are implementation-defined).

#include <cstdint>
#include <limits>
#include <vector>

namespace cccp {

inline constexpr const char* kPrngName = "xoshiro256**-1.0/splitmix64";

/// SplitMix64 step; used for seeding and substream derivation.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// xoshiro256** 1.0 (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Seed of the substream used by replication `replication` of a batch run
/// under master seed `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t replication) noexcept;

/// Independent generator for replication `replication`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t replication) noexcept {
  return Rng(substream_seed(seed, replication));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, bound); bound must be positive. Lemire's
/// multiply-and-reject method, exact (unbiased).
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) noexcept;

/// One draw of Bernoulli(p): true with probability p. Consumes one uniform.
inline bool bernoulli(Rng& rng, double p) noexcept { return uniform01(rng) < p; }

/// Binomial(trials, p) by inversion on the lighter tail, consuming exactly
/// one uniform when trials > 0 (falls back to `trials` Bernoulli draws only
/// when the starting mass underflows). Returns 0 without drawing when
/// trials == 0.
std::uint64_t binomial(Rng& rng, std::uint64_t trials, double p) noexcept;

/// Binomial(trials, p) sampler for a fixed p with the starting masses of the
/// inversion cached for every trial count up to `max_trials`. Draws are
/// bit-identical to `binomial(rng, trials, p)`.
class BinomialTable {
 public:
  BinomialTable(std::uint64_t max_trials, double p);

  std::uint64_t operator()(Rng& rng, std::uint64_t trials) const noexcept;

  double p() const noexcept { return p_; }
  std::uint64_t max_trials() const noexcept { return start_mass_.size() - 1; }

 private:
  double p_;
  std::vector<double> start_mass_;
};

}  // namespace cccp
