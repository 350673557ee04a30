#include "cccp/marginal_dynamics.hpp"

#include <cmath>

namespace cccp {

namespace {
constexpr double kNearOneCutoff = 0.1;
constexpr double kVanishingCutoff = 10.0;
}  // namespace

MarginalModel marginal_coeffs(const Params& params) {
  const double n = params.n();
  const double keep = 1.0 - params.p();
  MarginalModel m;
  m.a = keep * (1.0 - 1.0 / n);
  m.b = keep / n;
  const double denom = keep + n * params.p();
  m.q_star = denom > 0.0 ? keep / denom : 0.0;
  return m;
}

double q_at(const Params& params, std::uint64_t t, double q0) {
  if (!(q0 >= 0.0 && q0 <= 1.0)) throw DomainError("q0 must lie in [0, 1]");
  const auto m = marginal_coeffs(params);
  return m.q_star + std::pow(m.a, static_cast<double>(t)) * (q0 - m.q_star);
}

std::uint64_t marginal_mixing_time(const Params& params, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const auto m = marginal_coeffs(params);
  if (epsilon >= m.q_star || m.a <= 0.0) return 0;

  const double ln_a = std::log(m.a);
  const double ln_target = std::log(epsilon) - std::log(m.q_star);  // < 0
  auto t = static_cast<std::uint64_t>(std::ceil(ln_target / ln_a));
  // Settle rounding at the ceiling: a^t q* <= eps and a^{t-1} q* > eps.
  const auto within = [&](std::uint64_t s) { return static_cast<double>(s) * ln_a <= ln_target; };
  while (!within(t)) ++t;
  while (t > 0 && within(t - 1)) --t;
  return t;
}

double default_epsilon(const Params& params) {
  return marginal_coeffs(params).q_star / static_cast<double>(params.n());
}

std::string_view to_string(QStarRegime regime) {
  switch (regime) {
    case QStarRegime::NearOne: return "NearOne";
    case QStarRegime::Constant: return "Constant";
    case QStarRegime::Vanishing: return "Vanishing";
  }
  return "unknown";
}

QStarClass classify_qstar_regime(const Params& params) {
  QStarClass out;
  out.scale = marginal_coeffs(params).q_star;
  out.np = static_cast<double>(params.n()) * params.p();
  if (out.np <= kNearOneCutoff) {
    out.label = QStarRegime::NearOne;
  } else if (out.np <= kVanishingCutoff) {
    out.label = QStarRegime::Constant;
  } else {
    out.label = QStarRegime::Vanishing;
  }
  return out;
}

}  // namespace cccp
