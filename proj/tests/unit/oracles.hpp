#pragma once

// Brute-force references over the 2^n subsets of the set-valued chain.
// They share nothing with the library beyond the model definition.

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

// Law of the set after one round from `mask`, as (mask', prob) pairs.
inline std::vector<std::pair<std::uint32_t, double>> full_step(std::uint32_t n, double p, std::uint32_t mask) {
  std::vector<std::pair<std::uint32_t, double>> out;
  for (std::uint32_t c = 0; c < n; ++c) {
    const std::uint32_t held = mask | (1u << c);
    // every subset `lost` of `held`
    for (std::uint32_t lost = held;; lost = (lost - 1) & held) {
      const int nl = std::popcount(lost);
      const int nk = std::popcount(held) - nl;
      const double pr = std::pow(p, nl) * std::pow(1.0 - p, nk) / n;
      if (pr > 0.0) out.emplace_back(held & ~lost, pr);
      if (lost == 0) break;
    }
  }
  return out;
}

// P(|S_{t+1}| = j | S_t = {1..k}).
inline std::vector<double> row_by_enumeration(std::uint32_t n, double p, std::uint32_t k) {
  std::vector<double> row(n + 1, 0.0);
  const std::uint32_t mask = k == 0 ? 0u : ((1u << k) - 1u);
  for (const auto& [m, pr] : full_step(n, p, mask)) row[std::popcount(m)] += pr;
  return row;
}

// Law of |S_t| from S_0 = empty.
inline std::vector<double> size_law(std::uint32_t n, double p, std::uint32_t t) {
  std::vector<double> dist(1u << n, 0.0), next(1u << n);
  dist[0] = 1.0;
  for (std::uint32_t s = 0; s < t; ++s) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint32_t m = 0; m < dist.size(); ++m) {
      if (dist[m] == 0.0) continue;
      for (const auto& [m2, pr] : full_step(n, p, m)) next[m2] += dist[m] * pr;
    }
    dist.swap(next);
  }
  std::vector<double> law(n + 1, 0.0);
  for (std::uint32_t m = 0; m < dist.size(); ++m) law[std::popcount(m)] += dist[m];
  return law;
}

// E[T | S_0 = empty] by a pivoted long-double solve over all subsets.
inline long double hitting_time_from_empty(std::uint32_t n, double p) {
  const std::uint32_t full = (1u << n) - 1u;
  const std::size_t m = full;  // transient states 0..full-1
  std::vector<std::vector<long double>> a(m, std::vector<long double>(m + 1, 0.0L));
  for (std::uint32_t s = 0; s < m; ++s) {
    a[s][s] += 1.0L;
    a[s][m] = 1.0L;
    for (const auto& [s2, pr] : full_step(n, p, s)) {
      if (s2 != full) a[s][s2] -= pr;
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    for (std::size_t r = c + 1; r < m; ++r) {
      const long double f = a[r][c] / a[c][c];
      if (f == 0.0L) continue;
      for (std::size_t j = c; j <= m; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<long double> h(m);
  for (std::size_t r = m; r-- > 0;) {
    long double s = a[r][m];
    for (std::size_t j = r + 1; j < m; ++j) s -= a[r][j] * h[j];
    h[r] = s / a[r][r];
  }
  return h[0];
}

inline double total_variation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return 0.5 * s;
}

inline double harmonic(std::uint32_t n) {
  long double s = 0.0L;
  for (std::uint32_t i = n; i >= 1; --i) s += 1.0L / i;
  return static_cast<double>(s);
}

}  // namespace oracle
