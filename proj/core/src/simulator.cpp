#include "cccp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cccp/marginal_dynamics.hpp"

namespace cccp {

namespace {

unsigned resolve_threads(unsigned threads, std::uint64_t work) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(work, 1)));
}

// Calls fn(r) for r = 0..runs-1 on contiguous blocks; fn must only write
// to slots owned by r.
template <class Fn>
void for_each_replication(std::uint64_t runs, unsigned threads, Fn&& fn) {
  const unsigned workers = resolve_threads(threads, runs);
  if (workers <= 1) {
    for (std::uint64_t r = 0; r < runs; ++r) fn(r);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t lo = runs * w / workers;
    const std::uint64_t hi = runs * (w + 1) / workers;
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint64_t r = lo; r < hi; ++r) fn(r);
    });
  }
}

void require_runs(std::uint64_t runs) {
  if (runs < 100) throw DomainError("runs must be at least 100");
}

}  // namespace

SimOutcome simulate_hitting_time(const Params& params, std::uint64_t seed, std::uint64_t max_steps,
                                 std::uint64_t replication) {
  if (max_steps == 0) throw DomainError("max_steps must be positive");
  SimOutcome out;
  out.seed = seed;
  out.replication = replication;
  const ReducedStepper step(params);
  Rng rng = make_stream(seed, replication);
  const std::uint32_t n = params.n();
  std::uint32_t k = 0;
  for (std::uint64_t t = 1; t <= max_steps; ++t) {
    k = step(k, rng);
    if (k == n) {
      out.hitting_time = t;
      out.steps_used = t;
      return out;
    }
  }
  out.steps_used = max_steps;
  return out;
}

TrajectoryRecord simulate_trajectory(const Params& params, std::uint64_t seed, std::uint64_t horizon,
                                     std::uint64_t replication, ChainKind kind) {
  TrajectoryRecord rec{params, seed, replication, {}};
  rec.sizes.reserve(horizon + 1);
  rec.sizes.push_back(0);
  Rng rng = make_stream(seed, replication);
  if (kind == ChainKind::Full) {
    FullState s(params.n());
    for (std::uint64_t t = 1; t <= horizon; ++t) {
      advance_full(s, params, rng);
      rec.sizes.push_back(static_cast<std::uint32_t>(s.size()));
    }
  } else {
    const ReducedStepper step(params);
    std::uint32_t k = 0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
      k = step(k, rng);
      rec.sizes.push_back(k);
    }
  }
  return rec;
}

namespace {

void coupled_round(FullState& s, std::uint32_t coupon, const std::vector<double>& u, double p) {
  s.insert(coupon);
  auto& owned = s.mutable_owned();
  std::size_t kept = 0;
  for (const std::uint32_t c : owned) {
    if (!(u[c - 1] < p)) owned[kept++] = c;
  }
  owned.resize(kept);
}

}  // namespace

CoupledOutcome simulate_coupled(const Params& params1, const Params& params2, std::uint64_t seed,
                                std::uint64_t max_steps, std::uint64_t replication) {
  if (params1.n() != params2.n()) throw DomainError("coupled instances must share n");
  if (params1.p() > params2.p()) throw DomainError("coupling requires p1 <= p2");
  if (max_steps == 0) throw DomainError("max_steps must be positive");
  const std::uint32_t n = params1.n();
  CoupledOutcome out;
  out.t1.seed = out.t2.seed = seed;
  out.t1.replication = out.t2.replication = replication;
  Rng rng = make_stream(seed, replication);
  FullState s1(n), s2(n);
  std::vector<double> u(n);
  std::uint64_t t = 0;
  while (t < max_steps && (!out.t1.hitting_time || !out.t2.hitting_time)) {
    ++t;
    const auto coupon = static_cast<std::uint32_t>(uniform_below(rng, n) + 1);
    for (auto& x : u) x = uniform01(rng);
    coupled_round(s1, coupon, u, params1.p());
    coupled_round(s2, coupon, u, params2.p());
    if (!s1.includes(s2)) out.inclusion_held = false;
    if (!out.t1.hitting_time && s1.complete()) out.t1.hitting_time = t;
    if (!out.t2.hitting_time && s2.complete()) out.t2.hitting_time = t;
  }
  out.t1.steps_used = out.t1.hitting_time.value_or(t);
  out.t2.steps_used = out.t2.hitting_time.value_or(t);
  return out;
}

namespace {

// Per-replication membership of coupons 1 and 2 at round t, packed in two bits.
std::vector<std::uint8_t> membership_at(const Params& params, std::uint64_t t, std::uint64_t runs,
                                        std::uint64_t seed, unsigned threads) {
  std::vector<std::uint8_t> bits(runs, 0);
  for_each_replication(runs, threads, [&](std::uint64_t r) {
    Rng rng = make_stream(seed, r);
    FullState s(params.n());
    for (std::uint64_t i = 0; i < t; ++i) advance_full(s, params, rng);
    bits[r] = static_cast<std::uint8_t>((s.contains(1) ? 1 : 0) | (s.contains(2) ? 2 : 0));
  });
  return bits;
}

}  // namespace

MarginalEstimate estimate_marginal(const Params& params, std::uint64_t t, std::uint64_t runs, std::uint64_t seed,
                                   unsigned threads) {
  require_runs(runs);
  const auto bits = membership_at(params, t, runs, seed, threads);
  const auto hits = std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return (b & 1) != 0; });
  MarginalEstimate est;
  const double m = static_cast<double>(runs);
  est.estimate = static_cast<double>(hits) / m;
  est.stderr = std::sqrt(est.estimate * (1.0 - est.estimate) / m);
  return est;
}

PairCovariance estimate_pair_covariance(const Params& params, std::uint64_t t, std::uint64_t runs,
                                        std::uint64_t seed, unsigned threads) {
  if (params.n() < 2) throw DomainError("pair covariance needs n >= 2");
  require_runs(runs);
  const auto bits = membership_at(params, t, runs, seed, threads);
  std::uint64_t c1 = 0, c2 = 0, c12 = 0;
  for (const auto b : bits) {
    c1 += b & 1;
    c2 += (b >> 1) & 1;
    c12 += b == 3;
  }
  const double m = static_cast<double>(runs);
  PairCovariance out;
  out.q1 = static_cast<double>(c1) / m;
  out.q2 = static_cast<double>(c2) / m;
  const double q12 = static_cast<double>(c12) / m;
  out.covariance = q12 - out.q1 * out.q2;
  // Delta method: the per-run influence of the covariance estimate is
  // (X - q1)(Y - q2) - cov, whose variance is estimated from the counts.
  // Joint cell frequencies.
  const double f11 = q12;
  const double f10 = out.q1 - q12;
  const double f01 = out.q2 - q12;
  const double f00 = 1.0 - f11 - f10 - f01;
  const auto infl = [&](double x, double y) { return (x - out.q1) * (y - out.q2) - out.covariance; };
  const double second = f11 * infl(1, 1) * infl(1, 1) + f10 * infl(1, 0) * infl(1, 0) + f01 * infl(0, 1) * infl(0, 1) +
           f00 * infl(0, 0) * infl(0, 0);
  out.stderr = std::sqrt(std::max(second, 0.0) / m);
  return out;
}

HittingSummary batch_hitting_stats(const Params& params, std::uint64_t runs, std::uint64_t seed,
                                   std::uint64_t max_steps, unsigned threads) {
  if (runs == 0) throw DomainError("runs must be positive");
  if (max_steps == 0) throw DomainError("max_steps must be positive");
  HittingSummary sum;
  sum.runs = runs;
  sum.outcomes.resize(runs);
  for_each_replication(runs, threads, [&](std::uint64_t r) {
    sum.outcomes[r] = simulate_hitting_time(params, seed, max_steps, r);
  });
  // Welford in replication order.
  double mean = 0.0, m2 = 0.0;
  std::uint64_t count = 0;
  for (const auto& o : sum.outcomes) {
    if (o.censored()) {
      ++sum.censored;
      continue;
    }
    ++count;
    const double x = static_cast<double>(*o.hitting_time);
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  if (count > 0) {
    sum.mean = mean;
    sum.variance = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    sum.stderr = std::sqrt(sum.variance / static_cast<double>(count));
  }
  return sum;
}

std::vector<TrajectoryPoint> batch_trajectory_stats(const Params& params, std::uint64_t runs, std::uint64_t seed,
                                                    std::uint64_t horizon, unsigned threads, ChainKind kind) {
  if (runs == 0) throw DomainError("runs must be positive");
  const unsigned workers = resolve_threads(threads, runs);
  // Integer sums per worker; addition is exact, so the merge order is moot.
  std::vector<std::vector<std::uint64_t>> s1(workers, std::vector<std::uint64_t>(horizon + 1, 0));
  std::vector<std::vector<std::uint64_t>> s2(workers, std::vector<std::uint64_t>(horizon + 1, 0));
  const auto block = [&](unsigned w) {
    const std::uint64_t lo = runs * w / workers;
    const std::uint64_t hi = runs * (w + 1) / workers;
    for (std::uint64_t r = lo; r < hi; ++r) {
      const auto rec = simulate_trajectory(params, seed, horizon, r, kind);
      for (std::uint64_t t = 0; t <= horizon; ++t) {
        const std::uint64_t k = rec.sizes[t];
        s1[w][t] += k;
        s2[w][t] += k * k;
      }
    }
  };
  if (workers == 1) {
    block(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(block, w);
  }
  std::vector<TrajectoryPoint> out(horizon + 1);
  const double m = static_cast<double>(runs);
  const double n = static_cast<double>(params.n());
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    std::uint64_t a = 0, b = 0;
    for (unsigned w = 0; w < workers; ++w) {
      a += s1[w][t];
      b += s2[w][t];
    }
    const double mean = static_cast<double>(a) / m;
    out[t].mean_fraction = mean / n;
    if (runs > 1) {
      const double var = std::max(0.0, (static_cast<double>(b) - m * mean * mean) / (m - 1.0));
      out[t].stderr = std::sqrt(var / m) / n;
    }
  }
  return out;
}

BandViolationStats band_violation_stats(const Params& params, double delta, std::uint64_t start,
                                        std::uint64_t window, std::uint64_t runs, std::uint64_t seed,
                                        unsigned threads) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (runs == 0) throw DomainError("runs must be positive");
  if (window == 0) throw DomainError("window must be positive");
  BandViolationStats st;
  st.start = start;
  st.window = window;
  st.runs = runs;
  const double n = static_cast<double>(params.n());
  const double q = marginal_coeffs(params).q_star;
  st.band_center = n * q;
  st.band_halfwidth = 2.0 * delta * n * q;
  const bool degenerate = q <= 0.0;
  std::vector<std::uint64_t> outside(runs, 0);
  for_each_replication(runs, threads, [&](std::uint64_t r) {
    const ReducedStepper step(params);
    Rng rng = make_stream(seed, r);
    std::uint32_t k = 0;
    std::uint64_t count = 0;
    const std::uint64_t end = start + window;
    for (std::uint64_t t = 1; t < end; ++t) {
      k = step(k, rng);
      if (t < start) continue;
      if (degenerate || std::abs(static_cast<double>(k) - st.band_center) > st.band_halfwidth) ++count;
    }
    // t = 0 (K_0 = 0) is inside the window only when start == 0.
    if (start == 0 && (degenerate || st.band_center > st.band_halfwidth)) ++count;
    outside[r] = count;
  });
  for (const auto c : outside) {
    st.rounds_outside += c;
    st.runs_violated += c > 0;
  }
  return st;
}

}  // namespace cccp
