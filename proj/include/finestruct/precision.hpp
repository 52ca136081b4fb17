#pragma once

#include "real.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace finestruct {

// Working-precision policy for one problem instance. mantissa_bits is the
// certified floor (a multiple of 64); allocations may exceed it slightly.
// Immutable after construction and safe to share across threads.
struct PrecisionContext {
    int n_points = 0;
    int l_max = 0;
    long mantissa_bits = 0;
    Real solver_tol;
    bool probe = false;  // deliberately under-sized, for necessity demos
};

// Difference orders lose ~log2(n) bits each; reserve (l_max + 2) of them
// plus a fixed 128-bit guard band.
inline long sizing_bits(int n_points, int l_max) {
    double raw = (l_max + 2) * std::log2(static_cast<double>(n_points));
    return static_cast<long>(std::ceil(raw)) + 128;
}

inline long round_up_64(long bits) { return ((bits + 63) / 64) * 64; }

inline PrecisionContext make_context(int n_points, int l_max, long requested_bits = 0) {
    if (n_points < 2)
        throw std::invalid_argument("make_context: n_points must be >= 2");
    if (l_max < 1)
        throw std::invalid_argument("make_context: l_max must be >= 1");
    if (requested_bits != 0 && requested_bits < 64)
        throw std::invalid_argument("make_context: requested_bits must be >= 64");
    long bits = round_up_64(std::max(requested_bits, sizing_bits(n_points, l_max)));
    PrecisionScope scope(bits);
    PrecisionContext ctx;
    ctx.n_points = n_points;
    ctx.l_max = l_max;
    ctx.mantissa_bits = bits;
    ctx.solver_tol = pow2(-(bits - 48));
    return ctx;
}

// Deliberately under-sized context for precision-necessity demonstrations.
// Bypasses the sizing rule and the 64-bit floor; the tolerance must be given
// explicitly because 2^-(bits-48) is above roundoff only for sized contexts.
inline PrecisionContext make_probe_context(int n_points, int l_max, long bits, const Real& tol) {
    if (n_points < 2 || l_max < 1 || bits < 8)
        throw std::invalid_argument("make_probe_context: bad arguments");
    if (tol <= 0)
        throw std::invalid_argument("make_probe_context: tolerance must be positive");
    PrecisionContext ctx;
    ctx.n_points = n_points;
    ctx.l_max = l_max;
    ctx.mantissa_bits = bits;
    ctx.solver_tol = tol;
    ctx.probe = true;
    return ctx;
}

// Decimal digits representable at `bits` mantissa bits: floor(bits*log10 2).
// Significant digits that make a decimal string reproduce its value exactly
// when re-read at the same mantissa width.
inline std::size_t round_trip_digits(long bits) {
    return static_cast<std::size_t>((bits * 3011 + 9999) / 10000) + 5;
}

inline int digit_capacity(long bits) {
    long cap = bits * 30103L / 100000L;
    return static_cast<int>(cap < 1 ? 1 : cap);
}

// Leading significant decimal digits on which two values agree: 0 if signs
// or decimal exponents differ, the digit capacity of the lower precision if
// the values are identical, otherwise the common prefix length of the
// truncated decimal expansions. Used to certify results by recomputation at
// doubled precision.
inline int agreed_digits(const Real& value_lo, const Real& value_hi) {
    const long p = std::min(real_bits(value_lo), real_bits(value_hi));
    const int cap = digit_capacity(p);
    const auto* a = value_lo.backend().data();
    const auto* b = value_hi.backend().data();
    if (mpfr_equal_p(a, b))
        return cap;
    const int sa = mpfr_sgn(a), sb = mpfr_sgn(b);
    if (sa == 0 || sb == 0 || (sa > 0) != (sb > 0))
        return 0;
    DecimalParts da = decimal_parts(value_lo, static_cast<std::size_t>(cap), MPFR_RNDZ);
    DecimalParts db = decimal_parts(value_hi, static_cast<std::size_t>(cap), MPFR_RNDZ);
    if (da.exp10 != db.exp10)
        return 0;
    int n = 0;
    const std::size_t m = std::min(da.digits.size(), db.digits.size());
    while (static_cast<std::size_t>(n) < m && da.digits[n] == db.digits[n])
        ++n;
    return std::min(n, cap);
}

}  // namespace finestruct
