#pragma once

// The careless collector as a Markov chain: the set-valued chain S_t, the
// count chain K_t = |S_t| on {0..n}, and the exact lower-Hessenberg
// transition rows of the count chain.

#include <cstdint>
#include <span>
#include <vector>

#include "cccp/params.hpp"
#include "cccp/random.hpp"

namespace cccp {

/// Binomial(trials, p) probability mass function, entries 0..trials.
/// Built by the ratio recurrence w_{j+1} = w_j * p/(1-p) * (trials-j)/(j+1)
/// with periodic rescaling and a final normalization, so no binomial
/// coefficient or power is ever formed and large `trials` cannot overflow.
std::vector<double> binomial_pmf(std::uint32_t trials, double p);

/// One row P_{k,.} of the count chain's transition matrix.
struct ReducedTransitionRow {
  std::uint32_t k = 0;
  std::vector<double> probs;  // size n+1; probs[i] = P(K_{t+1} = i | K_t = k)
};

/// Throws DomainError when k > n.
ReducedTransitionRow build_transition_row(const Params& params, std::uint32_t k);

/// Produces transition rows into reusable scratch storage. The returned
/// span covers states 0..min(k+1, n); every later entry is zero.
class TransitionRowBuilder {
 public:
  explicit TransitionRowBuilder(const Params& params);

  std::span<const double> row(std::uint32_t k);

 private:
  void fill_pmf(std::uint32_t trials, std::vector<double>& out) const;

  Params params_;
  std::vector<double> row_;
  std::vector<double> gain_pmf_;
  std::vector<double> keep_pmf_;
};

/// The linear system (I - Q) h = 1 over the transient states 0..n-1,
/// stored row by row as a dense lower part plus a single superdiagonal entry.
struct ReducedChainSystem {
  std::uint32_t n = 0;
  std::vector<std::vector<double>> lower;  // lower[k][i] = A_{k,i}, 0 <= i <= k
  std::vector<double> super;               // super[k] = A_{k,k+1}, k < n-1
  std::vector<double> rhs;                 // all ones
  std::vector<double> upward;              // upward[k] = P_{k,k+1}, k < n

  /// A_{k,i}; zero above the superdiagonal.
  double at(std::uint32_t k, std::uint32_t i) const;

  /// A * h for a vector of n entries.
  std::vector<double> multiply(std::span<const double> h) const;
};

/// Throws NonAbsorbingError when p = 1.
ReducedChainSystem build_reduced_system(const Params& params);

/// Set of held coupons, a subset of {1..n}, kept sorted ascending.
class FullState {
 public:
  /// Empty collection over n coupon types.
  explicit FullState(std::uint32_t n);
  /// Throws DomainError on indices outside 1..n or duplicates.
  FullState(std::uint32_t n, std::vector<std::uint32_t> owned);

  std::uint32_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return owned_.size(); }
  bool empty() const noexcept { return owned_.empty(); }
  bool complete() const noexcept { return owned_.size() == n_; }
  bool contains(std::uint32_t coupon) const noexcept;
  const std::vector<std::uint32_t>& owned() const noexcept { return owned_; }

  /// True when every coupon held by `other` is also held here.
  bool includes(const FullState& other) const noexcept;

  void insert(std::uint32_t coupon);
  std::vector<std::uint32_t>& mutable_owned() noexcept { return owned_; }

  friend bool operator==(const FullState&, const FullState&) = default;

 private:
  std::uint32_t n_;
  std::vector<std::uint32_t> owned_;
};

/// One round of the set-valued chain, in place: draws C_t uniformly from
/// {1..n} (one uniform_below draw), inserts it, then visits every held coupon
/// in ascending index order and removes it when a uniform01 draw is below p.
void advance_full(FullState& state, const Params& params, Rng& rng);

/// Value-returning form of advance_full.
FullState step_full(FullState state, const Params& params, Rng& rng);

/// One round of the count chain: a uniform coupon draw decides the gain
/// (new iff it is not among the k held), then Binomial(k+1, p) or
/// Binomial(k, p) losses. Throws DomainError when k > n.
std::uint32_t step_reduced(std::uint32_t k, const Params& params, Rng& rng);

/// step_reduced with cached binomial start masses; bit-identical draws.
class ReducedStepper {
 public:
  explicit ReducedStepper(const Params& params);

  std::uint32_t operator()(std::uint32_t k, Rng& rng) const noexcept;

  const Params& params() const noexcept { return params_; }

 private:
  Params params_;
  BinomialTable losses_;
};

}  // namespace cccp
