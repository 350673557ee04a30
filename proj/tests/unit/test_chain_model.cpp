#include <doctest.h>

#include <numeric>

#include "cccp/chain_model.hpp"
#include "oracles.hpp"

using namespace cccp;

namespace {

std::vector<double> empirical_reduced(const Params& params, std::uint32_t k, std::uint64_t samples, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> freq(params.n() + 1, 0.0);
  for (std::uint64_t i = 0; i < samples; ++i) freq[step_reduced(k, params, rng)] += 1.0;
  for (auto& f : freq) f /= static_cast<double>(samples);
  return freq;
}

}  // namespace

TEST_CASE("params validation") {
  CHECK_THROWS_AS(Params(0, 0.5), DomainError);
  CHECK_THROWS_AS(Params(3, -0.1), DomainError);
  CHECK_THROWS_AS(Params(3, 1.1), DomainError);
  CHECK(Params(3, 1.0).never_completes());
  CHECK_FALSE(Params(3, 0.99).never_completes());
}

TEST_CASE("binomial pmf") {
  const auto w = binomial_pmf(4, 0.5);
  REQUIRE(w.size() == 5);
  CHECK(w[0] == doctest::Approx(1.0 / 16));
  CHECK(w[2] == doctest::Approx(6.0 / 16));
  CHECK(binomial_pmf(3, 0.0)[0] == 1.0);
  CHECK(binomial_pmf(3, 1.0)[3] == 1.0);
  // large trials: finite, normalized, mode near np
  const auto big = binomial_pmf(20000, 0.3);
  CHECK(std::accumulate(big.begin(), big.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::max_element(big.begin(), big.end()) - big.begin() == 6000);
}

TEST_CASE("transition rows: worked examples") {
  CHECK(build_transition_row(Params(1, 0.5), 0).probs == std::vector<double>{0.5, 0.5});
  const auto r = build_transition_row(Params(2, 0.0), 1).probs;
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(0.5));
  CHECK(r[2] == doctest::Approx(0.5));
  const auto q = build_transition_row(Params(2, 0.1), 1).probs;
  CHECK(q[0] == doctest::Approx(0.055).epsilon(1e-14));
  CHECK(q[1] == doctest::Approx(0.54).epsilon(1e-14));
  CHECK(q[2] == doctest::Approx(0.405).epsilon(1e-14));
  CHECK_THROWS_AS(build_transition_row(Params(2, 0.1), 3), DomainError);
}

TEST_CASE("transition rows match enumeration of the set chain") {
  for (std::uint32_t n = 1; n <= 7; ++n) {
    for (const double p : {0.0, 0.05, 0.3, 0.5, 0.9, 1.0}) {
      for (std::uint32_t k = 0; k <= n; ++k) {
        const auto lib = build_transition_row(Params(n, p), k).probs;
        const auto ref = oracle::row_by_enumeration(n, p, k);
        CAPTURE(n);
        CAPTURE(p);
        CAPTURE(k);
        for (std::uint32_t j = 0; j <= n; ++j) CHECK(lib[j] == doctest::Approx(ref[j]).epsilon(1e-12).scale(1e-300));
      }
    }
  }
}

TEST_CASE("transition rows are stochastic and Hessenberg") {
  for (const std::uint32_t n : {1u, 2u, 17u, 250u, 3000u}) {
    for (const double p : {0.0, 1e-4, 0.2, 0.7, 1.0}) {
      TransitionRowBuilder builder{Params(n, p)};
      for (std::uint32_t k = 0; k <= n; k += std::max(1u, n / 25)) {
        const auto row = build_transition_row(Params(n, p), k).probs;
        REQUIRE(row.size() == n + 1);
        double sum = 0.0;
        for (std::uint32_t j = 0; j <= n; ++j) {
          CHECK(row[j] >= 0.0);
          CHECK(row[j] <= 1.0);
          if (j > k + 1) CHECK(row[j] == 0.0);
          sum += row[j];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        const auto span = builder.row(k);
        CHECK(span.size() == std::min(k + 2, n + 1));
        for (std::size_t j = 0; j < span.size(); ++j) CHECK(span[j] == row[j]);
      }
    }
  }
}

TEST_CASE("reduced system") {
  const auto s1 = build_reduced_system(Params(1, 0.0));
  CHECK(s1.at(0, 0) == 1.0);
  CHECK(s1.rhs == std::vector<double>{1.0});
  CHECK(build_reduced_system(Params(1, 0.5)).at(0, 0) == 0.5);
  const auto s2 = build_reduced_system(Params(2, 0.1));
  CHECK(s2.at(1, 0) == doctest::Approx(-0.055).epsilon(1e-14));
  CHECK(s2.at(1, 1) == doctest::Approx(0.46).epsilon(1e-14));
  CHECK(s2.rhs == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(build_reduced_system(Params(4, 1.0)), NonAbsorbingError);

  // one superdiagonal band, equal to minus the upward probability
  const auto s = build_reduced_system(Params(30, 0.2));
  for (std::uint32_t k = 0; k < 30; ++k) {
    for (std::uint32_t i = k + 2; i < 30; ++i) CHECK(s.at(k, i) == 0.0);
    if (k + 1 < 30) {
      CHECK(s.at(k, k + 1) < 0.0);
      CHECK(s.at(k, k + 1) == -s.upward[k]);
    }
  }
}

TEST_CASE("full state") {
  FullState s(5, {4, 1});
  CHECK(s.owned() == std::vector<std::uint32_t>{1, 4});
  CHECK(s.contains(4));
  CHECK_FALSE(s.contains(2));
  CHECK_THROWS_AS(FullState(3, {0}), DomainError);
  CHECK_THROWS_AS(FullState(3, {4}), DomainError);
  CHECK_THROWS_AS(FullState(3, {2, 2}), DomainError);
  CHECK(FullState(5, {1, 2, 4}).includes(s));
  CHECK_FALSE(s.includes(FullState(5, {2})));
}

TEST_CASE("step_full: trivial cases") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto s = step_full(FullState(6), Params(6, 0.0), rng);
    CHECK(s.size() == 1);
  }
  for (int i = 0; i < 100; ++i) {
    CHECK(step_full(FullState(4, {1, 2, 3, 4}), Params(4, 1.0), rng).empty());
  }
}

TEST_CASE("step_full: n=2, owned={1}, p=0.5 reaches {1,2} with probability 1/8") {
  Rng rng(2024);
  const Params params(2, 0.5);
  const std::uint64_t runs = 200000;
  std::uint64_t both = 0;
  for (std::uint64_t i = 0; i < runs; ++i) both += step_full(FullState(2, {1}), params, rng).size() == 2;
  const double est = static_cast<double>(both) / runs;
  const double se = std::sqrt(0.125 * 0.875 / runs);
  CHECK(std::abs(est - 0.125) < 4 * se);
}

TEST_CASE("step_full consumes one coupon draw plus one uniform per held coupon") {
  const Params params(8, 0.3);
  Rng a(5), b(5);
  FullState s(8, {2, 5, 7});
  advance_full(s, params, a);
  const auto c = uniform_below(b, 8) + 1;
  const std::size_t held = (c == 2 || c == 5 || c == 7) ? 3 : 4;
  for (std::size_t i = 0; i < held; ++i) (void)uniform01(b);
  CHECK(a == b);
}

TEST_CASE("step_reduced: trivial cases") {
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    CHECK(step_reduced(7, Params(7, 0.0), rng) == 7);
    CHECK(step_reduced(0, Params(7, 0.0), rng) == 1);
  }
  CHECK_THROWS_AS(step_reduced(8, Params(7, 0.0), rng), DomainError);
}

TEST_CASE("step_reduced law matches the rows") {
  {
    const Params params(5, 0.3);
    const auto emp = empirical_reduced(params, 2, 100000, 99);
    CHECK(oracle::total_variation(emp, build_transition_row(params, 2).probs) < 0.01);
  }
  for (std::uint32_t n = 1; n <= 6; ++n) {
    for (const double p : {0.0, 0.2, 0.5, 0.9}) {
      for (std::uint32_t k = 0; k <= n; ++k) {
        const Params params(n, p);
        const auto emp = empirical_reduced(params, k, 100000, 1000 * n + k);
        CAPTURE(n);
        CAPTURE(p);
        CAPTURE(k);
        CHECK(oracle::total_variation(emp, build_transition_row(params, k).probs) < 0.02);
      }
    }
  }
}

TEST_CASE("ReducedStepper is bit-identical to step_reduced") {
  for (const double p : {0.0, 0.01, 0.4, 0.6, 0.999}) {
    const Params params(40, p);
    const ReducedStepper stepper(params);
    Rng a(17), b(17);
    std::uint32_t ka = 0, kb = 0;
    for (int i = 0; i < 5000; ++i) {
      ka = step_reduced(ka, params, a);
      kb = stepper(kb, b);
      REQUIRE(ka == kb);
    }
    CHECK(a == b);
  }
}

TEST_CASE("full chain size law matches repeated row multiplication") {
  for (const std::uint32_t n : {2u, 3u, 5u}) {
    for (const double p : {0.2, 0.5}) {
      const Params params(n, p);
      // t-step law by rows
      std::vector<double> law(n + 1, 0.0);
      law[0] = 1.0;
      for (int t = 0; t < 50; ++t) {
        std::vector<double> next(n + 1, 0.0);
        for (std::uint32_t k = 0; k <= n; ++k) {
          const auto row = build_transition_row(params, k).probs;
          for (std::uint32_t j = 0; j <= n; ++j) next[j] += law[k] * row[j];
        }
        law = next;
      }
      // exact law of the set chain agrees with it
      const auto ref = oracle::size_law(n, p, 50);
      for (std::uint32_t j = 0; j <= n; ++j) CHECK(law[j] == doctest::Approx(ref[j]).epsilon(1e-10));
      // and so does the simulated set chain
      std::vector<double> emp(n + 1, 0.0);
      Rng rng(n * 31 + static_cast<std::uint64_t>(p * 100));
      const int runs = 100000;
      for (int r = 0; r < runs; ++r) {
        FullState s(n);
        for (int t = 0; t < 50; ++t) advance_full(s, params, rng);
        emp[s.size()] += 1.0 / runs;
      }
      CAPTURE(n);
      CAPTURE(p);
      CHECK(oracle::total_variation(emp, law) < 0.02);
    }
  }
}
