#include "cccp/exact_hitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cccp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Non-finite entries become +inf; returns whether any were found.
bool flag_overflow(std::vector<double>& h) {
  bool overflow = false;
  for (double& v : h) {
    if (!std::isfinite(v)) {
      v = kInf;
      overflow = true;
    }
  }
  // Overflow anywhere propagates to h(0): it dominates every later state.
  if (overflow) h.front() = kInf;
  return overflow;
}

}  // namespace

std::string_view to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::Hessenberg: return "hessenberg";
    case SolveMethod::DenseOracle: return "dense_oracle";
  }
  return "unknown";
}

HittingSolution solve_hitting_times(const Params& params) {
  if (params.never_completes()) throw NonAbsorbingError();
  const std::uint32_t n = params.n();

  std::vector<double> pivot(n);
  std::vector<double> super(n, 0.0);
  std::vector<double> rhs(n);
  TransitionRowBuilder rows(params);

  for (std::uint32_t r = 0; r < n; ++r) {
    const auto row = rows.row(r);
    double b = 1.0;
    if (r > 0) {
      double entry = -row[0];  // A[r][0]
      for (std::uint32_t c = 0; c < r; ++c) {
        const double m = entry / pivot[c];
        b -= m * rhs[c];
        if (c + 1 < r) entry = -row[c + 1] - m * super[c];
      }
    }
    pivot[r] = row[r + 1];
    if (r + 1 < n) super[r] = -row[r + 1];
    rhs[r] = b;
  }

  HittingSolution out;
  out.method = SolveMethod::Hessenberg;
  out.h.resize(n);
  out.h[n - 1] = rhs[n - 1] / pivot[n - 1];
  // super[k] = -pivot[k], so the bidiagonal step is an increment.
  for (std::uint32_t k = n - 1; k-- > 0;) {
    out.h[k] = out.h[k + 1] + rhs[k] / pivot[k];
  }
  out.overflow = flag_overflow(out.h);
  out.residual_inf = out.overflow ? kInf : residual_inf(params, out.h);
  return out;
}

double expected_hitting_time(const Params& params) { return solve_hitting_times(params).h0(); }

double residual_inf(const Params& params, std::span<const double> h) {
  const std::uint32_t n = params.n();
  if (h.size() != n) throw DomainError("vector length does not match n");
  TransitionRowBuilder rows(params);
  double worst = 0.0;
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto row = rows.row(k);
    double acc = h[k];
    const std::uint32_t last = std::min(k + 1, n - 1);
    for (std::uint32_t i = 0; i <= last; ++i) acc -= row[i] * h[i];
    worst = std::max(worst, std::abs(acc - 1.0));
  }
  return worst;
}

std::vector<double> eliminate_column_order(ReducedChainSystem sys) {
  const std::uint32_t n = sys.n;
  auto& b = sys.rhs;
  for (std::uint32_t c = 0; c + 1 < n; ++c) {
    for (std::uint32_t r = c + 1; r < n; ++r) {
      const double m = sys.lower[r][c] / sys.lower[c][c];
      sys.lower[r][c] = 0.0;
      if (c + 1 == r) {
        sys.lower[r][r] -= m * sys.super[c];
      } else {
        sys.lower[r][c + 1] -= m * sys.super[c];
      }
      b[r] -= m * b[c];
    }
  }
  std::vector<double> h(n);
  h[n - 1] = b[n - 1] / sys.lower[n - 1][n - 1];
  for (std::uint32_t k = n - 1; k-- > 0;) {
    h[k] = (b[k] - sys.super[k] * h[k + 1]) / sys.lower[k][k];
  }
  return h;
}

double max_relative_difference(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == y[i]) continue;
    const double scale = std::max(std::abs(x[i]), std::abs(y[i]));
    const double diff = std::abs(x[i] - y[i]);
    worst = std::max(worst, std::isfinite(scale) ? diff / scale : kInf);
  }
  return worst;
}

}  // namespace cccp
