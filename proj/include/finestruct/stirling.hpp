#pragma once

#include <finestruct/real.hpp>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace finestruct {

// Exact value of the order-l forward difference of the power sequence j^n,
// evaluated at j = i, via the alternating binomial sum
// sum_{k=0..l} C(l,k) (-1)^{l-k} (i+k)^n in arbitrary-size integers.
inline Int diff_power_exact(int l, int i, int n) {
    if (l < 0 || i < 0 || n < 0)
        throw std::invalid_argument("diff_power_exact: arguments must be non-negative");
    Int acc = 0;
    for (int k = 0; k <= l; ++k) {
        Int term = binomial_int(static_cast<unsigned>(l), static_cast<unsigned>(k)) *
                   pow(Int(i + k), static_cast<unsigned>(n));
        if ((l - k) % 2 == 0)
            acc += term;
        else
            acc -= term;
    }
    return acc;
}

// Same value by dynamic programming over the one-step recurrence
//   D(l, n+1) = (l+i) D(l, n) + l D(l-1, n)     (i fixed),
// with bases D(0, n) = i^n and D(l, 0) = [l == 0]. Independent of the
// binomial route, so the two serve as cross-checks.
inline Int diff_power_recurrence(int l, int i, int n) {
    if (l < 0 || i < 0 || n < 0)
        throw std::invalid_argument("diff_power_recurrence: arguments must be non-negative");
    std::vector<std::vector<Int>> dp(static_cast<std::size_t>(l) + 1,
                                     std::vector<Int>(static_cast<std::size_t>(n) + 1));
    for (int nu = 0; nu <= n; ++nu)
        dp[0][static_cast<std::size_t>(nu)] = pow(Int(i), static_cast<unsigned>(nu));
    for (int lam = 1; lam <= l; ++lam) {
        dp[static_cast<std::size_t>(lam)][0] = 0;
        for (int nu = 1; nu <= n; ++nu)
            dp[static_cast<std::size_t>(lam)][static_cast<std::size_t>(nu)] =
                Int(lam + i) * dp[static_cast<std::size_t>(lam)][static_cast<std::size_t>(nu - 1)] +
                Int(lam) * dp[static_cast<std::size_t>(lam - 1)][static_cast<std::size_t>(nu - 1)];
    }
    return dp[static_cast<std::size_t>(l)][static_cast<std::size_t>(n)];
}

// Generalized Stirling number: the order-l power difference at offset i,
// divided by l!. The division is always exact; a nonzero remainder means an
// arithmetic bug, not bad input.
inline Int gen_stirling(int n, int l, int i) {
    if (l < 0 || i < 0 || n < 0)
        throw std::invalid_argument("gen_stirling: arguments must be non-negative");
    Int q;
    Int r;
    divide_qr(diff_power_exact(l, i, n), factorial_int(static_cast<unsigned>(l)), q, r);
    if (r != 0)
        throw std::logic_error("gen_stirling: difference not divisible by l!");
    return q;
}

// Ordinary Stirling number of the second kind: offset-0 reduction.
inline Int stirling2(int n, int l) { return gen_stirling(n, l, 0); }

// Combinatorial oracle: the number of maps from n labeled objects to l+i
// labeled cells that cover all l marked cells. Counts object-by-object over
// the coverage state, so every map is counted exactly once; memoization on
// (objects remaining, covered subset) collapses identical futures.
inline Int placement_oracle(int n, int l, int i) {
    if (n < 0 || l < 0 || i < 0)
        throw std::invalid_argument("placement_oracle: arguments must be non-negative");
    if (n > 12 || l > 12 || l + i > 16)
        throw std::invalid_argument("placement_oracle: beyond brute-force scale");
    const std::uint32_t full = l == 0 ? 0u : (1u << l) - 1u;
    std::vector<std::vector<Int>> memo(static_cast<std::size_t>(n) + 1,
                                       std::vector<Int>(full + 1u, Int(-1)));
    auto rec = [&](auto&& self, int r, std::uint32_t mask) -> Int {
        if (r == 0)
            return Int(mask == full ? 1 : 0);
        Int& slot = memo[static_cast<std::size_t>(r)][mask];
        if (slot >= 0)
            return slot;
        Int total = Int(i) * self(self, r - 1, mask);
        for (int j = 0; j < l; ++j)
            total += self(self, r - 1, mask | (1u << j));
        slot = total;
        return slot;
    };
    return rec(rec, n, 0u);
}

// Leading-order approximation l^n / l! for the ordinary numbers, valid for
// n >> l. Exact rational evaluated with one correctly rounded division.
inline Real riordan_approx(int n, int l) {
    if (l < 1)
        throw std::invalid_argument("riordan_approx: need l >= 1");
    if (n < 0)
        throw std::invalid_argument("riordan_approx: need n >= 0");
    return to_real(Rat(pow(Int(l), static_cast<unsigned>(n)),
                       factorial_int(static_cast<unsigned>(l))));
}

// Bounded-excess approximation C(l+k,k) (i + l/2)^k with k = n-l. At k = 1
// this is exact (see the tests); for larger k it is asymptotic in l.
inline Real asymp_bounded_k(int n, int l, int i) {
    if (l < 1)
        throw std::invalid_argument("asymp_bounded_k: need l >= 1");
    if (i < 0)
        throw std::invalid_argument("asymp_bounded_k: need i >= 0");
    if (n < l)
        throw std::invalid_argument("asymp_bounded_k: defined for n >= l only");
    const unsigned k = static_cast<unsigned>(n - l);
    Rat v(binomial_int(static_cast<unsigned>(n), k));
    v *= Rat(pow(Int(2 * i + l), k), pow(Int(2), k));
    return to_real(v);
}

// Dense table of power-sequence differences over a box of (l, i, n), built
// with the one-step recurrence. Construction is single-writer; a finished
// table is immutable and safe to share across threads.
class StirlingTable {
  public:
    StirlingTable(int n_max, int l_max, int i_max)
        : n_max_(n_max), l_max_(l_max), i_max_(i_max) {
        if (n_max < 0 || l_max < 0 || i_max < 0)
            throw std::invalid_argument("StirlingTable: bounds must be non-negative");
        diffs_.resize(static_cast<std::size_t>(l_max + 1) * static_cast<std::size_t>(i_max + 1) *
                      static_cast<std::size_t>(n_max + 1));
        for (int i = 0; i <= i_max; ++i)
            for (int n = 0; n <= n_max; ++n)
                slot(0, i, n) = pow(Int(i), static_cast<unsigned>(n));
        for (int l = 1; l <= l_max; ++l)
            for (int i = 0; i <= i_max; ++i) {
                slot(l, i, 0) = 0;
                for (int n = 1; n <= n_max; ++n)
                    slot(l, i, n) = Int(l + i) * slot(l, i, n - 1) + Int(l) * slot(l - 1, i, n - 1);
            }
        for (int l = 0; l <= l_max; ++l)
            for (int i = 0; i <= i_max; ++i)
                for (int n = 0; n <= n_max; ++n) {
                    if (diff_value(l, i, n) < 0)
                        throw std::logic_error("StirlingTable: negative entry");
                    // Growth in n holds whenever some cell exists (l+i >= 1);
                    // the degenerate (l=0, i=0) row is 1, 0, 0, ...
                    if (n >= 1 && l + i >= 1 && diff_value(l, i, n) < diff_value(l, i, n - 1))
                        throw std::logic_error("StirlingTable: entries must grow with n");
                }
    }

    int n_max() const { return n_max_; }
    int l_max() const { return l_max_; }
    int i_max() const { return i_max_; }

    const Int& diff_value(int l, int i, int n) const {
        check_range(l, i, n);
        return diffs_[index(l, i, n)];
    }

    Int stirling_value(int n, int l, int i) const {
        Int q;
        Int r;
        divide_qr(diff_value(l, i, n), factorial_int(static_cast<unsigned>(l)), q, r);
        if (r != 0)
            throw std::logic_error("StirlingTable: difference not divisible by l!");
        return q;
    }

  private:
    std::size_t index(int l, int i, int n) const {
        return (static_cast<std::size_t>(l) * static_cast<std::size_t>(i_max_ + 1) +
                static_cast<std::size_t>(i)) *
                   static_cast<std::size_t>(n_max_ + 1) +
               static_cast<std::size_t>(n);
    }
    Int& slot(int l, int i, int n) { return diffs_[index(l, i, n)]; }
    void check_range(int l, int i, int n) const {
        if (l < 0 || l > l_max_ || i < 0 || i > i_max_ || n < 0 || n > n_max_)
            throw std::out_of_range("StirlingTable: query outside the built box");
    }

    int n_max_;
    int l_max_;
    int i_max_;
    std::vector<Int> diffs_;
};

}  // namespace finestruct
