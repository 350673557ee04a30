#include "cccp/chain_model.hpp"

#include <algorithm>
#include <numeric>

namespace cccp {

namespace {

constexpr double kRescaleAbove = 0x1.0p+900;
constexpr double kRescaleFactor = 0x1.0p-900;

void binomial_weights(std::uint32_t trials, double p, std::vector<double>& out) {
  out.assign(trials + 1, 0.0);
  if (p <= 0.0) {
    out[0] = 1.0;
    return;
  }
  if (p >= 1.0) {
    out[trials] = 1.0;
    return;
  }
  const double odds = p / (1.0 - p);
  out[0] = 1.0;
  for (std::uint32_t j = 0; j < trials; ++j) {
    out[j + 1] = out[j] * odds * static_cast<double>(trials - j) / static_cast<double>(j + 1);
    if (out[j + 1] > kRescaleAbove) {
      for (std::uint32_t i = 0; i <= j + 1; ++i) out[i] *= kRescaleFactor;
    }
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& w : out) w /= total;
}

}  // namespace

std::vector<double> binomial_pmf(std::uint32_t trials, double p) {
  std::vector<double> out;
  binomial_weights(trials, p, out);
  return out;
}

TransitionRowBuilder::TransitionRowBuilder(const Params& params)
    : params_(params), row_(params.n() + 1, 0.0) {}

void TransitionRowBuilder::fill_pmf(std::uint32_t trials, std::vector<double>& out) const {
  binomial_weights(trials, params_.p(), out);
}

// P_{k,k-i} = (1-k/n) Pmf(k+1; i+1) + (k/n) Pmf(k; i), P_{k,k+1} = (1-k/n) Pmf(k+1; 0)
// where Pmf(m; j) is the Binomial(m, p) mass of j losses.
std::span<const double> TransitionRowBuilder::row(std::uint32_t k) {
  const std::uint32_t n = params_.n();
  if (k > n) throw DomainError("state index out of range");
  const std::size_t width = std::min<std::size_t>(k + 2, n + 1);
  std::fill_n(row_.begin(), width, 0.0);

  const double gain = static_cast<double>(n - k) / static_cast<double>(n);
  const double stay = static_cast<double>(k) / static_cast<double>(n);
  if (k < n) {
    fill_pmf(k + 1, gain_pmf_);
    for (std::uint32_t j = 0; j <= k + 1; ++j) row_[k + 1 - j] += gain * gain_pmf_[j];
  }
  if (k > 0) {
    fill_pmf(k, keep_pmf_);
    for (std::uint32_t j = 0; j <= k; ++j) row_[k - j] += stay * keep_pmf_[j];
  }
  return {row_.data(), width};
}

ReducedTransitionRow build_transition_row(const Params& params, std::uint32_t k) {
  TransitionRowBuilder builder(params);
  const auto entries = builder.row(k);
  ReducedTransitionRow out;
  out.k = k;
  out.probs.assign(params.n() + 1, 0.0);
  std::copy(entries.begin(), entries.end(), out.probs.begin());
  return out;
}

double ReducedChainSystem::at(std::uint32_t k, std::uint32_t i) const {
  if (k >= n || i >= n) throw DomainError("system index out of range");
  if (i <= k) return lower[k][i];
  if (i == k + 1) return super[k];
  return 0.0;
}

std::vector<double> ReducedChainSystem::multiply(std::span<const double> h) const {
  if (h.size() != n) throw DomainError("vector length does not match system size");
  std::vector<double> out(n, 0.0);
  for (std::uint32_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::uint32_t i = 0; i <= k; ++i) acc += lower[k][i] * h[i];
    if (k + 1 < n) acc += super[k] * h[k + 1];
    out[k] = acc;
  }
  return out;
}

ReducedChainSystem build_reduced_system(const Params& params) {
  if (params.never_completes()) throw NonAbsorbingError();
  const std::uint32_t n = params.n();
  ReducedChainSystem sys;
  sys.n = n;
  sys.lower.resize(n);
  sys.super.resize(n - 1);
  sys.rhs.assign(n, 1.0);
  sys.upward.resize(n);

  TransitionRowBuilder builder(params);
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto row = builder.row(k);
    auto& lower = sys.lower[k];
    lower.resize(k + 1);
    for (std::uint32_t i = 0; i <= k; ++i) lower[i] = (i == k ? 1.0 : 0.0) - row[i];
    if (k + 1 < n) sys.super[k] = -row[k + 1];
    sys.upward[k] = row[k + 1];
  }
  return sys;
}

FullState::FullState(std::uint32_t n) : n_(n) {
  if (n < 1) throw DomainError("n must be at least 1");
}

FullState::FullState(std::uint32_t n, std::vector<std::uint32_t> owned)
    : n_(n), owned_(std::move(owned)) {
  if (n < 1) throw DomainError("n must be at least 1");
  std::sort(owned_.begin(), owned_.end());
  if (std::adjacent_find(owned_.begin(), owned_.end()) != owned_.end())
    throw DomainError("duplicate coupon index");
  if (!owned_.empty() && (owned_.front() < 1 || owned_.back() > n))
    throw DomainError("coupon index outside 1..n");
}

bool FullState::contains(std::uint32_t coupon) const noexcept {
  return std::binary_search(owned_.begin(), owned_.end(), coupon);
}

bool FullState::includes(const FullState& other) const noexcept {
  return std::includes(owned_.begin(), owned_.end(), other.owned_.begin(), other.owned_.end());
}

void FullState::insert(std::uint32_t coupon) {
  if (coupon < 1 || coupon > n_) throw DomainError("coupon index outside 1..n");
  const auto it = std::lower_bound(owned_.begin(), owned_.end(), coupon);
  if (it == owned_.end() || *it != coupon) owned_.insert(it, coupon);
}

void advance_full(FullState& state, const Params& params, Rng& rng) {
  const auto drawn = static_cast<std::uint32_t>(uniform_below(rng, params.n())) + 1;
  state.insert(drawn);
  auto& owned = state.mutable_owned();
  const double p = params.p();
  std::size_t kept = 0;
  for (std::size_t i = 0; i < owned.size(); ++i) {
    if (!bernoulli(rng, p)) owned[kept++] = owned[i];
  }
  owned.resize(kept);
}

FullState step_full(FullState state, const Params& params, Rng& rng) {
  if (state.n() != params.n()) throw DomainError("state and params disagree on n");
  advance_full(state, params, rng);
  return state;
}

std::uint32_t step_reduced(std::uint32_t k, const Params& params, Rng& rng) {
  const std::uint32_t n = params.n();
  if (k > n) throw DomainError("state index out of range");
  const bool gained = uniform_below(rng, n) >= k;
  const std::uint32_t held = gained ? k + 1 : k;
  return held - static_cast<std::uint32_t>(binomial(rng, held, params.p()));
}

ReducedStepper::ReducedStepper(const Params& params)
    : params_(params), losses_(params.n() + 1, params.p()) {}

std::uint32_t ReducedStepper::operator()(std::uint32_t k, Rng& rng) const noexcept {
  const bool gained = uniform_below(rng, params_.n()) >= k;
  const std::uint32_t held = gained ? k + 1 : k;
  return held - static_cast<std::uint32_t>(losses_(rng, held));
}

}  // namespace cccp
