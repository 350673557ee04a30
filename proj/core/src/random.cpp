#include "cccp/random.hpp"

#include <cmath>

namespace cccp {

Rng::Rng(std::uint64_t seed) noexcept {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t replication) noexcept {
  std::uint64_t state = seed;
  const std::uint64_t mixed = splitmix64(state);
  state = mixed ^ (replication * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
  return splitmix64(state);
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) noexcept {
  __extension__ typedef unsigned __int128 u128;
  u128 m = static_cast<u128>(rng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

namespace {

double lighter_tail(double p) noexcept { return p > 0.5 ? 1.0 - p : p; }

double start_mass(std::uint64_t trials, double q) noexcept {
  return std::exp(static_cast<double>(trials) * std::log1p(-q));
}

// Shared by binomial() and BinomialTable so both consume the stream identically.
std::uint64_t draw_binomial(Rng& rng, std::uint64_t trials, double p, double mass) noexcept {
  if (trials == 0) return 0;
  const bool flip = p > 0.5;
  const double q = lighter_tail(p);
  if (q <= 0.0) {
    (void)uniform01(rng);
    return flip ? trials : 0;
  }
  if (mass <= 0.0) {
    std::uint64_t count = 0;
    for (std::uint64_t i = 0; i < trials; ++i) count += bernoulli(rng, q) ? 1 : 0;
    return flip ? trials - count : count;
  }
  const double odds = q / (1.0 - q);
  double u = uniform01(rng);
  std::uint64_t x = 0;
  while (u >= mass && x < trials) {
    u -= mass;
    mass *= odds * static_cast<double>(trials - x) / static_cast<double>(x + 1);
    ++x;
  }
  return flip ? trials - x : x;
}

}  // namespace

std::uint64_t binomial(Rng& rng, std::uint64_t trials, double p) noexcept {
  return draw_binomial(rng, trials, p, start_mass(trials, lighter_tail(p)));
}

BinomialTable::BinomialTable(std::uint64_t max_trials, double p)
    : p_(p), start_mass_(max_trials + 1) {
  const double q = lighter_tail(p);
  for (std::uint64_t m = 0; m <= max_trials; ++m) start_mass_[m] = start_mass(m, q);
}

std::uint64_t BinomialTable::operator()(Rng& rng, std::uint64_t trials) const noexcept {
  const double mass = trials < start_mass_.size() ? start_mass_[trials]
                                                  : start_mass(trials, lighter_tail(p_));
  return draw_binomial(rng, trials, p_, mass);
}

}  // namespace cccp
