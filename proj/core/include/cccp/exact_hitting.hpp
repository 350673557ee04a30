#pragma once

// Exact expected hitting times h(k) = E[T | K_0 = k] of the full collection,
// from the linear system (I - Q) h = 1 over the transient count states.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cccp/chain_model.hpp"
#include "cccp/params.hpp"

namespace cccp {

enum class SolveMethod { Hessenberg, DenseOracle };

std::string_view to_string(SolveMethod method);

struct HittingSolution {
  std::vector<double> h;     // h[k] for k = 0..n-1; +inf entries when overflow
  double residual_inf = 0;   // max_k |(A h)_k - 1| against a freshly built A
  SolveMethod method = SolveMethod::Hessenberg;
  bool overflow = false;     // some h[k] exceeds the double range

  double h0() const { return h.front(); }
};

/// O(n^2) time, O(n) memory solve of (I - Q) h = 1.
///
/// Rows of A are generated one at a time and pushed through forward
/// elimination without pivoting: for each earlier column c the multiplier
/// m = A[r][c] / U[c][c] updates A[r][c+1] and b[r], which is exactly the
/// column-by-column update sequence applied in row-major order (each entry
/// receives the same operations in the same order). Backward substitution
/// then runs over the bidiagonal U.
///
/// Every row of A sums to the row's upward mass P_{r,r+1} (zero row sums of
/// I - Q, plus absorption from row n-1), and eliminating a pivot row with
/// zero row sum preserves that. So each pivot U[r][r] equals P_{r,r+1}
/// exactly; it is taken from the row rather than from the cancelling
/// difference A[r][r] - m U[r-1][r], which loses every significant digit
/// once P_{r,r+1} drops below machine epsilon.
///
/// Throws NonAbsorbingError when p = 1.
HittingSolution solve_hitting_times(const Params& params);

/// h(0) = E[T_{n,p}]; +inf when the solve overflows.
double expected_hitting_time(const Params& params);

/// Dense reference solve: builds the full A from the displayed binomial
/// formulas and runs Gaussian elimination with partial pivoting in MPFR
/// arithmetic. Working precision starts at 128 bits and grows until two
/// solves 64 bits apart agree, so the oracle stays accurate where A is
/// numerically singular in double precision. O(n^3); n <= 2000.
///
/// Throws NonAbsorbingError when p = 1 and DomainError when n > 2000.
HittingSolution dense_oracle_solve(const Params& params);

/// Max |(A h)_k - 1| with A rebuilt row by row (O(n) memory).
double residual_inf(const Params& params, std::span<const double> h);

/// The elimination exactly as usually written: column-major order over a
/// stored system, pivots updated by subtraction. Agrees with
/// solve_hitting_times while A is well conditioned; kept for comparison.
std::vector<double> eliminate_column_order(ReducedChainSystem system);

/// Largest componentwise relative difference |x - y| / max(|x|, |y|);
/// entries where both are +inf count as equal.
double max_relative_difference(std::span<const double> x, std::span<const double> y);

}  // namespace cccp
