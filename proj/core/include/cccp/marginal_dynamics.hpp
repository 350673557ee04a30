#pragma once

// Marginal probability q_t = Pr(i in S_t) of a fixed coupon. It obeys the
// affine recurrence q_{t+1} = a q_t + b with a = (1-p)(1-1/n), b = (1-p)/n,
// whose fixed point q* = (1-p)/(1-p+np) is the metastable held fraction.

#include <cstdint>
#include <string_view>

#include "cccp/params.hpp"

namespace cccp {

struct MarginalModel {
  double a = 0.0;       // contraction factor (1-p)(1-1/n)
  double b = 0.0;       // (1-p)/n
  double q_star = 0.0;  // b / (1-a)
};

MarginalModel marginal_coeffs(const Params& params);

/// Closed form q_t = q* + a^t (q0 - q*). Throws DomainError when q0 is not
/// a probability.
double q_at(const Params& params, std::uint64_t t, double q0 = 0.0);

/// Smallest t with a^t q* <= epsilon, i.e. the first round from which the
/// marginal started at q0 = 0 stays within epsilon of q* forever.
/// Returns 0 when epsilon >= q*, and when a = 0 (n = 1 or p = 1).
/// Throws DomainError when epsilon <= 0.
std::uint64_t marginal_mixing_time(const Params& params, double epsilon);

/// Tolerance used when a caller does not choose one: q*/n.
double default_epsilon(const Params& params);

enum class QStarRegime { NearOne, Constant, Vanishing };

std::string_view to_string(QStarRegime regime);

struct QStarClass {
  QStarRegime label = QStarRegime::NearOne;
  double scale = 1.0;  // closed-form q* for the instance
  double np = 0.0;     // the constant c = np when label == Constant
};

/// Buckets np at the fixed cutoffs 0.1 and 10: np <= 0.1 is NearOne,
/// np > 10 is Vanishing, everything between is Constant with c = np.
/// This is a finite-n bucketing of asymptotic classes, not a decision
/// procedure for them.
QStarClass classify_qstar_regime(const Params& params);

}  // namespace cccp
