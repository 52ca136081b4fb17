#pragma once

#include <finestruct/real.hpp>
#include <finestruct/sequence.hpp>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace finestruct {

namespace detail {

template <class T>
T value_from_int(const Int& v) {
    if constexpr (std::is_integral_v<T>)
        return v.template convert_to<T>();
    else
        return T(v);
}

template <class T>
T abs_value(const T& x) {
    using std::abs;
    return abs(x);
}

}  // namespace detail

// One forward-difference pass: entry at ambient index i becomes
// s(i+1) - s(i). The window shrinks by one on the right; `offset` (the left
// endpoint) is unchanged.
template <class T>
Sequence<T> forward_diff(const Sequence<T>& s) {
    if (s.size() < 2)
        throw std::invalid_argument("forward_diff: difference of a single sample is undefined");
    std::vector<T> out;
    out.reserve(s.size() - 1);
    for (std::size_t j = 0; j + 1 < s.size(); ++j)
        out.push_back(s.values[j + 1] - s.values[j]);
    return Sequence<T>(std::move(out), s.offset);
}

// Order-l difference by iterated pairwise subtraction; order 0 is the
// identity. Iteration is the primary evaluator (one cancellation per step);
// the one-shot binomial form below serves as a cross-check.
template <class T>
Sequence<T> diff_order(Sequence<T> s, int l) {
    if (l < 0)
        throw std::invalid_argument("diff_order: order must be non-negative");
    if (static_cast<std::size_t>(l) + 1 > s.size())
        throw std::invalid_argument("diff_order: order exceeds sample count minus one");
    for (int k = 0; k < l; ++k)
        s = forward_diff(s);
    return s;
}

// Binomial expansion of the order-l difference at one ambient index:
// sum_{k=0..l} C(l,k) (-1)^{l-k} s(i+k). Exact over integer values; over
// reals it must agree with diff_order to certified digits.
template <class T>
T diff_binomial(const Sequence<T>& s, int l, long i) {
    if (l < 0)
        throw std::invalid_argument("diff_binomial: order must be non-negative");
    if (i < s.first_index() || i + l > s.last_index())
        throw std::out_of_range("diff_binomial: window [i, i+l] outside the sampled range");
    T acc = s.at(i + l);
    for (int k = l - 1; k >= 0; --k) {
        T term = detail::value_from_int<T>(binomial_int(static_cast<unsigned>(l),
                                                        static_cast<unsigned>(k))) *
                 s.at(i + k);
        if ((l - k) % 2 == 0)
            acc += term;
        else
            acc -= term;
    }
    return acc;
}

// Two-factor discrete Leibniz rule:
//   nabla^l (f g)(i) = sum_{k=0..l} C(l,k) nabla^k f(i) * nabla^{l-k} g(i+k).
// Note the shift on the second factor; without it the identity fails.
template <class T>
T leibniz_pair(const Sequence<T>& f, const Sequence<T>& g, int l, long i) {
    if (l < 0)
        throw std::invalid_argument("leibniz_pair: order must be non-negative");
    if (i < f.first_index() || i + l > f.last_index() || i < g.first_index() ||
        i + l > g.last_index())
        throw std::invalid_argument("leibniz_pair: factors too short for the window [i, i+l]");
    std::vector<Sequence<T>> df{f};
    std::vector<Sequence<T>> dg{g};
    df.reserve(static_cast<std::size_t>(l) + 1);
    dg.reserve(static_cast<std::size_t>(l) + 1);
    for (int k = 1; k <= l; ++k) {
        df.push_back(forward_diff(df.back()));
        dg.push_back(forward_diff(dg.back()));
    }
    T acc(0);
    for (int k = 0; k <= l; ++k) {
        acc += detail::value_from_int<T>(binomial_int(static_cast<unsigned>(l),
                                                      static_cast<unsigned>(k))) *
               df[static_cast<std::size_t>(k)].at(i) *
               dg[static_cast<std::size_t>(l - k)].at(i + k);
    }
    return acc;
}

// Uniform upper bound for |nabla^l (f_1 ... f_n)| over every index where the
// difference is defined:
//   sum over compositions l_1+...+l_n = l of l!/(l_1!...l_n!) *
//   gamma_1(l_1)...gamma_n(l_n),
// where gamma_k(q) = max over the valid window of |nabla^q f_k|. Taking the
// window maximum absorbs the shifts appearing in the exact expansion.
template <class T>
T leibniz_bound(const std::vector<Sequence<T>>& factors, int l) {
    if (factors.empty())
        throw std::invalid_argument("leibniz_bound: need at least one factor");
    if (l < 0)
        throw std::invalid_argument("leibniz_bound: order must be non-negative");
    for (const Sequence<T>& f : factors)
        if (f.size() < static_cast<std::size_t>(l) + 1)
            throw std::invalid_argument("leibniz_bound: factor too short for order-l differences");

    std::vector<std::vector<T>> gamma;  // gamma[k][q]
    gamma.reserve(factors.size());
    for (const Sequence<T>& f : factors) {
        std::vector<T> g;
        g.reserve(static_cast<std::size_t>(l) + 1);
        Sequence<T> d = f;
        for (int q = 0; q <= l; ++q) {
            T m = detail::abs_value(d.values[0]);
            for (const T& v : d.values) {
                T a = detail::abs_value(v);
                if (a > m)
                    m = a;
            }
            g.push_back(m);
            if (q < l)
                d = forward_diff(d);
        }
        gamma.push_back(std::move(g));
    }

    T total(0);
    std::vector<int> parts(factors.size(), 0);
    auto rec = [&](auto&& self, std::size_t idx, int rem) -> void {
        if (idx + 1 == parts.size()) {
            parts[idx] = rem;
            Int coef = factorial_int(static_cast<unsigned>(l));
            for (int p : parts)
                coef /= factorial_int(static_cast<unsigned>(p));
            T term = detail::value_from_int<T>(coef);
            for (std::size_t k = 0; k < parts.size(); ++k)
                term *= gamma[k][static_cast<std::size_t>(parts[k])];
            total += term;
            return;
        }
        for (int p = 0; p <= rem; ++p) {
            parts[idx] = p;
            self(self, idx + 1, rem - p);
        }
    };
    rec(rec, 0, l);
    return total;
}

// Distribution pattern of d differencings over m product factors: q[k] is
// the number of factors receiving exactly k, so sum q_k = m and
// sum k*q_k = d.
struct MultiIndex {
    std::vector<int> q;  // length d+1
    int m = 0;
    int d = 0;
};

// All admissible patterns, in ascending lexicographic order of
// (q_0, q_1, ..., q_d). Deterministic order keeps dumps reproducible.
inline std::vector<MultiIndex> admissible_arrays(int m, int d) {
    if (m < 1 || d < 0)
        throw std::invalid_argument("admissible_arrays: need m >= 1 and d >= 0");
    std::vector<MultiIndex> out;
    std::vector<int> q(static_cast<std::size_t>(d) + 1, 0);
    auto rec = [&](auto&& self, int k, int m_rem, int d_rem) -> void {
        if (k > d) {
            if (m_rem == 0 && d_rem == 0)
                out.push_back(MultiIndex{q, m, d});
            return;
        }
        int cap = (k == 0) ? m_rem : std::min(m_rem, d_rem / k);
        for (int v = 0; v <= cap; ++v) {
            q[static_cast<std::size_t>(k)] = v;
            self(self, k + 1, m_rem - v, d_rem - k * v);
        }
        q[static_cast<std::size_t>(k)] = 0;
    };
    rec(rec, 0, m, d);
    return out;
}

// Number of ways to realize a pattern: choose which factors receive k
// differencings each (m!/prod q_k!), then deal the d labeled differencings
// into those groups (d!/prod (k!)^{q_k}). Every division below is exact.
inline Int multinomial_constant(const MultiIndex& Q) {
    long msum = 0;
    long dsum = 0;
    for (std::size_t k = 0; k < Q.q.size(); ++k) {
        if (Q.q[k] < 0)
            throw std::invalid_argument("multinomial_constant: negative multiplicity");
        msum += Q.q[k];
        dsum += static_cast<long>(k) * Q.q[k];
    }
    if (static_cast<int>(Q.q.size()) != Q.d + 1 || msum != Q.m || dsum != Q.d)
        throw std::invalid_argument("multinomial_constant: array is not admissible");
    Int choose_factors = factorial_int(static_cast<unsigned>(Q.m));
    for (int qk : Q.q)
        choose_factors /= factorial_int(static_cast<unsigned>(qk));
    Int deal_diffs = factorial_int(static_cast<unsigned>(Q.d));
    for (std::size_t k = 0; k < Q.q.size(); ++k) {
        Int kf = factorial_int(static_cast<unsigned>(k));
        for (int j = 0; j < Q.q[k]; ++j)
            deal_diffs /= kf;
    }
    return choose_factors * deal_diffs;
}

}  // namespace finestruct
