#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cccp/exact_hitting.hpp"

namespace cccp {

namespace {

constexpr std::uint32_t kMaxOracleStates = 2000;
constexpr mpfr_prec_t kStartBits = 128;
constexpr mpfr_prec_t kGuardBits = 96;
constexpr mpfr_prec_t kCheckBits = 64;
constexpr mpfr_prec_t kMaxBits = mpfr_prec_t{1} << 16;
constexpr mpfr_exp_t kBeyondDouble = 1100;  // log2 magnitude well past DBL_MAX

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits) { mpfr_init2(v_, bits); mpfr_set_zero(v_, 1); }
  BigFloat(const BigFloat&) = delete;
  BigFloat& operator=(const BigFloat&) = delete;
  BigFloat(BigFloat&& other) noexcept {
    v_[0] = other.v_[0];
    other.owned_ = false;
  }
  BigFloat& operator=(BigFloat&&) = delete;
  ~BigFloat() {
    if (owned_) mpfr_clear(v_);
  }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }

 private:
  mpfr_t v_;
  bool owned_ = true;
};

std::vector<BigFloat> make_vector(std::size_t size, mpfr_prec_t bits) {
  std::vector<BigFloat> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.emplace_back(bits);
  return out;
}

// Dense row-major n x n matrix of MPFR numbers.
class BigMatrix {
 public:
  BigMatrix(std::size_t n, mpfr_prec_t bits) : n_(n), cells_(make_vector(n * n, bits)) {}
  mpfr_ptr operator()(std::size_t r, std::size_t c) { return cells_[r * n_ + c].get(); }

  void swap_rows(std::size_t a, std::size_t b) {
    for (std::size_t c = 0; c < n_; ++c) mpfr_swap(cells_[a * n_ + c].get(), cells_[b * n_ + c].get());
  }

 private:
  std::size_t n_;
  std::vector<BigFloat> cells_;
};

// A = I - Q with P_{k,k-i} = (1-k/n) C(k+1,i+1) (1-p)^{k-i} p^{i+1} + (k/n) C(k,i) (1-p)^{k-i} p^i
// and P_{k,k+1} = (1-k/n) (1-p)^{k+1}.
void build_dense_system(const Params& params, BigMatrix& a, mpfr_prec_t bits) {
  const std::uint32_t n = params.n();
  auto loss_pow = make_vector(n + 2, bits);
  auto keep_pow = make_vector(n + 2, bits);
  BigFloat keep(bits);
  mpfr_set_d(keep.get(), params.p(), MPFR_RNDN);
  mpfr_ui_sub(keep.get(), 1, keep.get(), MPFR_RNDN);
  mpfr_set_ui(loss_pow[0].get(), 1, MPFR_RNDN);
  mpfr_set_ui(keep_pow[0].get(), 1, MPFR_RNDN);
  for (std::uint32_t j = 1; j <= n + 1; ++j) {
    mpfr_mul_d(loss_pow[j].get(), loss_pow[j - 1].get(), params.p(), MPFR_RNDN);
    mpfr_mul(keep_pow[j].get(), keep_pow[j - 1].get(), keep.get(), MPFR_RNDN);
  }

  // Pascal rows C(k, .) and C(k+1, .).
  auto choose_k = make_vector(n + 2, bits);
  auto choose_k1 = make_vector(n + 2, bits);
  mpfr_set_ui(choose_k[0].get(), 1, MPFR_RNDN);

  BigFloat gain(bits), stay(bits), term(bits), entry(bits);
  for (std::uint32_t k = 0; k < n; ++k) {
    mpfr_set_ui(choose_k1[0].get(), 1, MPFR_RNDN);
    for (std::uint32_t i = 1; i <= k + 1; ++i) {
      if (i <= k) {
        mpfr_add(choose_k1[i].get(), choose_k[i - 1].get(), choose_k[i].get(), MPFR_RNDN);
      } else {
        mpfr_set_ui(choose_k1[i].get(), 1, MPFR_RNDN);
      }
    }
    mpfr_set_ui(gain.get(), n - k, MPFR_RNDN);
    mpfr_div_ui(gain.get(), gain.get(), n, MPFR_RNDN);
    mpfr_set_ui(stay.get(), k, MPFR_RNDN);
    mpfr_div_ui(stay.get(), stay.get(), n, MPFR_RNDN);

    for (std::uint32_t i = 0; i <= k; ++i) {
      // P_{k,k-i}
      mpfr_mul(entry.get(), choose_k1[i + 1].get(), keep_pow[k - i].get(), MPFR_RNDN);
      mpfr_mul(entry.get(), entry.get(), loss_pow[i + 1].get(), MPFR_RNDN);
      mpfr_mul(entry.get(), entry.get(), gain.get(), MPFR_RNDN);
      mpfr_mul(term.get(), choose_k[i].get(), keep_pow[k - i].get(), MPFR_RNDN);
      mpfr_mul(term.get(), term.get(), loss_pow[i].get(), MPFR_RNDN);
      mpfr_mul(term.get(), term.get(), stay.get(), MPFR_RNDN);
      mpfr_add(entry.get(), entry.get(), term.get(), MPFR_RNDN);

      const std::uint32_t col = k - i;
      if (col == k) {
        mpfr_ui_sub(a(k, col), 1, entry.get(), MPFR_RNDN);
      } else {
        mpfr_neg(a(k, col), entry.get(), MPFR_RNDN);
      }
    }
    if (k + 1 < n) {
      mpfr_mul(entry.get(), gain.get(), keep_pow[k + 1].get(), MPFR_RNDN);
      mpfr_neg(a(k, k + 1), entry.get(), MPFR_RNDN);
    }
    std::swap(choose_k, choose_k1);
  }
}

// Gaussian elimination with partial pivoting; skips structurally zero work
// by tracking the rightmost nonzero column of each row.
std::vector<BigFloat> solve_at(const Params& params, mpfr_prec_t bits) {
  const std::uint32_t n = params.n();
  BigMatrix a(n, bits);
  build_dense_system(params, a, bits);
  auto b = make_vector(n, bits);
  std::vector<std::uint32_t> rightmost(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    mpfr_set_ui(b[k].get(), 1, MPFR_RNDN);
    rightmost[k] = std::min(k + 1, n - 1);
  }

  BigFloat factor(bits);
  for (std::uint32_t c = 0; c < n; ++c) {
    std::uint32_t best = c;
    for (std::uint32_t r = c + 1; r < n; ++r) {
      if (mpfr_cmpabs(a(r, c), a(best, c)) > 0) best = r;
    }
    if (mpfr_zero_p(a(best, c))) throw std::runtime_error("dense oracle: singular system");
    if (best != c) {
      a.swap_rows(best, c);
      mpfr_swap(b[best].get(), b[c].get());
      std::swap(rightmost[best], rightmost[c]);
    }
    for (std::uint32_t r = c + 1; r < n; ++r) {
      if (mpfr_zero_p(a(r, c))) continue;
      mpfr_div(factor.get(), a(r, c), a(c, c), MPFR_RNDN);
      mpfr_neg(factor.get(), factor.get(), MPFR_RNDN);
      for (std::uint32_t j = c + 1; j <= rightmost[c]; ++j) {
        mpfr_fma(a(r, j), factor.get(), a(c, j), a(r, j), MPFR_RNDN);
      }
      mpfr_set_zero(a(r, c), 1);
      mpfr_fma(b[r].get(), factor.get(), b[c].get(), b[r].get(), MPFR_RNDN);
      rightmost[r] = std::max(rightmost[r], rightmost[c]);
    }
  }

  auto h = make_vector(n, bits);
  BigFloat acc(bits);
  for (std::uint32_t k = n; k-- > 0;) {
    mpfr_set(acc.get(), b[k].get(), MPFR_RNDN);
    for (std::uint32_t j = k + 1; j <= rightmost[k] && j < n; ++j) {
      mpfr_neg(factor.get(), a(k, j), MPFR_RNDN);
      mpfr_fma(acc.get(), factor.get(), h[j].get(), acc.get(), MPFR_RNDN);
    }
    mpfr_div(h[k].get(), acc.get(), a(k, k), MPFR_RNDN);
  }
  return h;
}

bool all_positive(const std::vector<BigFloat>& h) {
  return std::all_of(h.begin(), h.end(), [](const BigFloat& v) {
    return mpfr_number_p(v.get()) && mpfr_sgn(v.get()) > 0;
  });
}

mpfr_exp_t max_exponent(const std::vector<BigFloat>& h) {
  mpfr_exp_t e = std::numeric_limits<mpfr_exp_t>::min();
  for (const auto& v : h) e = std::max(e, mpfr_get_exp(v.get()));
  return e;
}

bool agree(const std::vector<BigFloat>& x, const std::vector<BigFloat>& y, mpfr_prec_t bits) {
  BigFloat diff(bits);
  for (std::size_t i = 0; i < x.size(); ++i) {
    mpfr_sub(diff.get(), x[i].get(), y[i].get(), MPFR_RNDN);
    if (mpfr_zero_p(diff.get())) continue;
    // |x - y| <= 2^-80 |y|
    if (mpfr_get_exp(diff.get()) > mpfr_get_exp(y[i].get()) - 80) return false;
  }
  return true;
}

}  // namespace

HittingSolution dense_oracle_solve(const Params& params) {
  if (params.never_completes()) throw NonAbsorbingError();
  if (params.n() > kMaxOracleStates) throw DomainError("dense oracle is limited to n <= 2000");

  HittingSolution out;
  out.method = SolveMethod::DenseOracle;
  out.h.assign(params.n(), std::numeric_limits<double>::infinity());

  mpfr_prec_t bits = kStartBits;
  while (bits <= kMaxBits) {
    auto h = solve_at(params, bits);
    if (!all_positive(h)) {
      bits *= 2;
      continue;
    }
    // Below the guard, a solution of magnitude 2^e is resolved only once the
    // precision exceeds e. Beyond double range the exact value is not needed:
    // resolving up to 2^kBeyondDouble is enough to tell it is out of range.
    const mpfr_exp_t magnitude = max_exponent(h);
    const mpfr_prec_t needed =
        static_cast<mpfr_prec_t>(std::clamp<mpfr_exp_t>(magnitude, 0, kBeyondDouble)) + kGuardBits;
    if (bits < needed) {
      bits = needed + 32;
      continue;
    }
    if (magnitude > kBeyondDouble) {
      out.overflow = true;
      out.residual_inf = std::numeric_limits<double>::infinity();
      return out;
    }
    auto check = solve_at(params, bits + kCheckBits);
    if (!all_positive(check) || !agree(h, check, bits + kCheckBits)) {
      bits *= 2;
      continue;
    }
    for (std::size_t k = 0; k < h.size(); ++k) out.h[k] = mpfr_get_d(check[k].get(), MPFR_RNDN);
    out.overflow = std::any_of(out.h.begin(), out.h.end(), [](double v) { return !std::isfinite(v); });
    out.residual_inf = out.overflow ? std::numeric_limits<double>::infinity() : residual_inf(params, out.h);
    return out;
  }
  throw std::runtime_error("dense oracle: precision limit reached without convergence");
}

}  // namespace cccp
