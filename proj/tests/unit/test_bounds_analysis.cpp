#include <doctest.h>

#include <cmath>
#include <limits>

#include "cccp/bounds_analysis.hpp"
#include "cccp/exact_hitting.hpp"
#include "cccp/log_value.hpp"
#include "cccp/marginal_dynamics.hpp"

using namespace cccp;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("LogValue arithmetic") {
  const auto a = LogValue::from_linear(3.0);
  const auto b = LogValue::from_linear(5.0);
  CHECK((a + b).linear() == doctest::Approx(8.0).epsilon(1e-15));
  CHECK((a * b).linear() == doctest::Approx(15.0).epsilon(1e-15));
  CHECK((b / a).linear() == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(a < b);
  CHECK((a + LogValue::zero()) == a);
  CHECK(LogValue::zero().is_zero());
  CHECK(LogValue::zero().linear() == 0.0);
  CHECK((a + LogValue::infinity()).is_infinite());
  const auto huge = LogValue::from_ln(5000.0);
  CHECK_FALSE(huge.representable());
  CHECK((huge + huge).ln_v == doctest::Approx(5000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(LogValue::from_linear(1000.0).log10() == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("mean-field interval") {
  const Params params(2, 0.1);
  const double qs = marginal_coeffs(params).q_star;
  const auto mf = mean_field_interval(params, 0.1 * qs);
  CHECK(mf.t_mix == 3);
  CHECK(mf.upper.linear() == doctest::Approx(3.0 + 1.0 / std::pow(0.9 * qs, 2)).epsilon(1e-12));
  CHECK(mf.upper.linear() == doctest::Approx(4.844).epsilon(1e-3));
  CHECK(mf.lower <= mf.upper);
  CHECK(expected_hitting_time(params) <= mf.upper.linear());
  CHECK(MeanFieldInterval::heuristic);
  CHECK_THROWS_AS(mean_field_interval(params, qs), DomainError);
  CHECK_THROWS_AS(mean_field_interval(params, 0.0), DomainError);
  CHECK_THROWS_AS(mean_field_interval(Params(2, 1.0), 0.1), DomainError);

  // q* = 1: upper is T + (1-eps)^{-n}; the lower bracket is vacuous and clamped
  const auto c = mean_field_interval(Params(10, 0.0), 0.1);
  CHECK(c.upper.linear() == doctest::Approx(c.t_mix + std::pow(0.9, -10)).epsilon(1e-12));
  CHECK(c.lower_clamped);
  CHECK(c.lower <= c.upper);

  // small eps: the escape term is about q*^{-10} = (1.9/0.9)^10
  const Params p10(10, 0.1);
  const auto m = mean_field_interval(p10, 1e-9);
  CHECK(m.upper.ln_v == doctest::Approx(std::log(m.t_mix + std::pow(1.9 / 0.9, 10))).epsilon(1e-6));
  CHECK(std::pow(1.9 / 0.9, 10) == doctest::Approx(1757).epsilon(1e-3));

  for (const std::uint32_t n : {2u, 5u, 30u, 400u}) {
    for (const double p : {0.0, 0.01, 0.2, 0.7}) {
      const double q = marginal_coeffs(Params(n, p)).q_star;
      for (const double f : {0.01, 0.1, 0.5}) {
        const auto r = mean_field_interval(Params(n, p), f * q);
        CHECK(r.lower <= r.upper);
      }
    }
  }
}

TEST_CASE("mean-field lower side against direct arithmetic") {
  const Params params(6, 0.3);
  const double q = marginal_coeffs(params).q_star;
  const auto r = mean_field_interval(params, 0.05 * q);
  const double t = static_cast<double>(r.t_mix);
  const double qn = std::pow(q, 6);
  const double direct = t * (1 - qn * t) + std::pow(1 - qn, t + 1) / qn;
  REQUIRE_FALSE(r.lower_clamped);
  CHECK(r.lower.linear() == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("hitting regimes") {
  const auto cl = hitting_regime(Params(100, 0.0));
  CHECK(cl.label == HittingRegime::Classical);
  CHECK(std::exp(cl.ln_scale) == doctest::Approx(100 * std::log(100.0)).epsilon(1e-12));
  const auto m2 = hitting_regime(Params(100, 0.01));
  CHECK(m2.label == HittingRegime::MetastableII);
  CHECK(m2.c == doctest::Approx(1.0));
  CHECK(m2.ln_scale == doctest::Approx(100 * std::log(2.0)).epsilon(1e-6));
  CHECK(m2.log10_scale() == doctest::Approx(30.1).epsilon(1e-3));
  const auto m3 = hitting_regime(Params(100, 0.5));
  CHECK(m3.label == HittingRegime::MetastableIII);
  CHECK(m3.ln_scale == doctest::Approx(100 * std::log(100.0)).epsilon(1e-6));
  CHECK(hitting_regime(Params(100, 1.0)).label == HittingRegime::Infinite);
  CHECK(hitting_regime(Params(100, 1.0)).ln_scale == kInf);
  CHECK_THROWS_AS(hitting_regime(Params(1, 0.1)), DomainError);

  // n large enough that all five regimes are separated
  const std::uint32_t n = 1000000;
  const double ln_n = std::log(double(n));
  const double nn = double(n) * n;
  CHECK(hitting_regime(Params(n, 0.001 * ln_n / nn)).label == HittingRegime::Classical);
  const auto sc = hitting_regime(Params(n, ln_n / nn));
  CHECK(sc.label == HittingRegime::SuperClassical);
  CHECK(sc.c == doctest::Approx(1.0));
  CHECK(hitting_regime(Params(n, 1e-3 / n)).label == HittingRegime::MetastableI);
  CHECK(hitting_regime(Params(n, 1.0 / n)).label == HittingRegime::MetastableII);
  CHECK(hitting_regime(Params(n, 100.0 / n)).label == HittingRegime::MetastableIII);
  CHECK(to_string(HittingRegime::SuperClassical) == "Super-classical");
}

TEST_CASE("regime scale is nondecreasing in p") {
  for (const std::uint32_t n : {2u, 10u, 100u, 1000u, 100000u}) {
    double prev = -kInf;
    // fine geometric grid from 1e-14 to 1, crossing every cutoff
    for (int i = 0; i <= 1400; ++i) {
      const double p = std::min(1.0, std::pow(10.0, -14.0 + i * 0.01));
      const double s = hitting_regime(Params(n, p)).ln_scale;
      CAPTURE(n);
      CAPTURE(p);
      CHECK(s >= prev);
      prev = s;
    }
  }
}

TEST_CASE("escape rate") {
  const auto e = escape_rate(Params(2, 0.1), 0.1);
  CHECK(e.rho.linear() == doctest::Approx(0.5499).epsilon(1e-4));
  CHECK(e.block_len == 2);
  CHECK(e.good_threshold == 2);
  CHECK(escape_rate(Params(7, 0.0), 0.25).rho.linear() == doctest::Approx(0.75).epsilon(1e-15));
  // n = 10, p = 0.5: q* = 0.5/5.5
  const auto big = escape_rate(Params(10, 0.5), 0.1);
  const double direct = std::log(0.5 / 5.5) + std::log(0.9) + 100 * std::log(10.0) * std::log(0.5);
  CHECK(big.rho.ln_v == doctest::Approx(direct).epsilon(1e-14));
  CHECK(big.rho.ln_v == doctest::Approx(-162.106).epsilon(1e-5));
  CHECK(big.block_len == 24);
  CHECK(escape_rate(Params(5, 1.0), 0.1).rho.is_zero());
  CHECK_THROWS_AS(escape_rate(Params(5, 0.1), 0.0), DomainError);
  CHECK_THROWS_AS(escape_rate(Params(5, 0.1), 1.0), DomainError);
  CHECK_THROWS_AS(escape_rate(Params(1, 0.1), 0.5), DomainError);
  // deep in metastable III rho stays representable in logs
  CHECK(std::isfinite(escape_rate(Params(10000, 0.5), 0.1).rho.ln_v));
}

TEST_CASE("unconditional bounds") {
  CHECK(unconditional_upper_bound(Params(2, 0.1), 0.1).linear() == doctest::Approx(6.64).epsilon(1e-3));
  const auto u3 = unconditional_upper_bound(Params(3, 0.0), 0.01);
  CHECK(u3.linear() == doctest::Approx(12 + 4 / 0.99).epsilon(1e-12));
  CHECK(u3.linear() > 5.5);
  const auto u10 = unconditional_upper_bound(Params(10, 0.5), 0.1);
  CHECK(u10.log10() == doctest::Approx((std::log(24.0) + 162.10595) / std::log(10.0)).epsilon(1e-5));
  CHECK(u10.log10() == doctest::Approx(71.78).epsilon(1e-3));
  CHECK(unconditional_upper_bound(Params(4, 1.0), 0.1).is_infinite());

  CHECK(unconditional_lower_bound(Params(9, 0.0)).linear() == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(unconditional_lower_bound(Params(2, 0.5)).linear() == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(unconditional_lower_bound(Params(2, 0.1)).linear() == doctest::Approx(0.2988).epsilon(1e-3));
  CHECK(unconditional_lower_bound(Params(4, 1.0)).is_infinite());
}

TEST_CASE("log-space bounds agree with direct arithmetic") {
  for (std::uint32_t n = 2; n <= 10; ++n) {
    for (const double p : {0.0, 0.05, 0.2, 0.5}) {
      const Params params(n, p);
      const double q = marginal_coeffs(params).q_star;
      const double eps = 0.1 * q;
      const double lower = 1.0 / (5.0 * std::pow(q, n));
      const double rho = q * (1 - eps) * std::pow(1 - p, n * n * std::log(double(n)));
      const double upper = marginal_mixing_time(params, eps) + std::ceil(n * std::log(double(n))) / rho;
      CHECK(unconditional_lower_bound(params).ln_v == doctest::Approx(std::log(lower)).epsilon(1e-10).scale(1e-3));
      CHECK(escape_rate(params, eps).rho.ln_v == doctest::Approx(std::log(rho)).epsilon(1e-10).scale(1e-3));
      CHECK(unconditional_upper_bound(params, eps).ln_v ==
            doctest::Approx(std::log(upper)).epsilon(1e-10).scale(1e-3));
    }
  }
}

TEST_CASE("sandwich around the exact hitting time") {
  for (std::uint32_t n = 2; n <= 12; ++n) {
    for (const double p : {0.05, 0.1, 0.2, 0.3, 0.5}) {
      const Params params(n, p);
      const double eps = 0.1 * marginal_coeffs(params).q_star;
      const double ln_h = std::log(expected_hitting_time(params));
      CAPTURE(n);
      CAPTURE(p);
      CHECK(unconditional_lower_bound(params).ln_v <= ln_h);
      CHECK(ln_h <= unconditional_upper_bound(params, eps).ln_v);
    }
  }
}

TEST_CASE("metastability deviation bounds") {
  const auto s = metastability_deviation_bound(Params(1000, 1.0 / 1000), 0.3, 100, MetastabilityVariant::SmallP);
  CHECK(s.prob_bound.linear() == doctest::Approx(5.5e-3).epsilon(1e-2));
  const double q = 0.999 / 1.999;
  CHECK(s.prob_bound.linear() == doctest::Approx(200 * std::exp(-0.09 * 0.7 * 1000 * q / 3)).epsilon(1e-12));
  CHECK_FALSE(s.vacuous);
  const auto l = metastability_deviation_bound(Params(400, 0.3), 0.5, 10, MetastabilityVariant::LargeP);
  CHECK(l.prob_bound.linear() == doctest::Approx(10 * std::exp(-25.0)).epsilon(1e-12));
  CHECK(l.prob_bound.linear() == doctest::Approx(1.39e-10).epsilon(1e-2));
  const auto v = metastability_deviation_bound(Params(10, 0.01), 0.1, 1000000, MetastabilityVariant::SmallP);
  CHECK(v.vacuous);
  CHECK(v.prob_bound.linear() > 1.0);
  const auto tiny = metastability_deviation_bound(Params(100000, 1e-5), 0.99, 10, MetastabilityVariant::SmallP);
  CHECK(tiny.prob_bound.linear() < 1e-60);
  CHECK_THROWS_AS(metastability_deviation_bound(Params(10, 0.1), 0.0, 10, MetastabilityVariant::SmallP),
                  DomainError);
  CHECK_THROWS_AS(metastability_deviation_bound(Params(10, 0.1), 0.5, 0, MetastabilityVariant::LargeP),
                  DomainError);
  CHECK(to_string(MetastabilityVariant::LargeP) == "large_p");
}

TEST_CASE("metastability start") {
  const Params params(300, 2.0 / 300);
  const double q = marginal_coeffs(params).q_star;
  CHECK(metastability_start(params, 0.2) == marginal_mixing_time(params, 0.1 * q));
  CHECK(metastability_start(Params(10, 1.0), 0.5) == 0);
  CHECK_THROWS_AS(metastability_start(params, 1.0), DomainError);
}
