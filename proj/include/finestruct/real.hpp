#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <mpfr.h>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace finestruct {

// Arbitrary-precision real with runtime-selected mantissa width. Expression
// templates are disabled so every operation yields a plain value whose
// precision follows the max of its operands (temporaries pick up the active
// scope precision).
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Smallest digits10 request whose underlying bit allocation is >= bits.
// The backend accepts decimal digit counts only, so allocations may exceed
// the nominal bit width by a few bits; they never fall below it.
inline unsigned scope_digits10(long bits) {
    if (bits < 2)
        throw std::invalid_argument("scope_digits10: need at least 2 bits");
    auto alloc = [](unsigned long d10) {
        return (d10 * 1000uL) / 301uL + ((d10 * 1000uL) % 301uL ? 2u : 1u);
    };
    unsigned long d10 = (static_cast<unsigned long>(bits) * 301uL) / 1000uL;
    if (d10 == 0)
        d10 = 1;
    while (alloc(d10) < static_cast<unsigned long>(bits))
        ++d10;
    return static_cast<unsigned>(d10);
}

// RAII guard: values constructed inside the scope carry at least `bits`
// mantissa bits. The underlying default is process-global, so concurrent
// scopes must agree on the precision (see the sweep scheduler).
class PrecisionScope {
  public:
    explicit PrecisionScope(long bits) : saved_(Real::default_precision()) {
        Real::default_precision(scope_digits10(bits));
    }
    ~PrecisionScope() { Real::default_precision(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

  private:
    unsigned saved_;
};

inline long real_bits(const Real& x) {
    return static_cast<long>(mpfr_get_prec(x.backend().data()));
}

inline Real to_real(const Int& v) { return Real(v); }

// Boost 1.74's direct rational conversion is lossy; divide exact integers
// instead (correctly rounded at the active precision).
inline Real to_real(const Rat& q) {
    return Real(numerator(q)) / Real(denominator(q));
}

inline Int factorial_int(unsigned n) {
    Int r = 1;
    for (unsigned k = 2; k <= n; ++k)
        r *= k;
    return r;
}

inline Int binomial_int(unsigned n, unsigned k) {
    if (k > n)
        return 0;
    k = std::min(k, n - k);
    Int r = 1;
    for (unsigned j = 1; j <= k; ++j) {
        r *= n - k + j;
        r /= j;
    }
    return r;
}

inline Real const_pi() {
    Real r;
    mpfr_const_pi(r.backend().data(), MPFR_RNDN);
    return r;
}

inline Real const_e() { return exp(Real(1)); }

inline Real pow2(long e) { return ldexp(Real(1), static_cast<int>(e)); }

struct DecimalParts {
    bool zero = false;
    int sign = 0;
    std::string digits;  // significand digits, no sign, no point
    long exp10 = 0;      // value = sign * 0.digits * 10^exp10
};

inline DecimalParts decimal_parts(const Real& x, std::size_t ndigits, mpfr_rnd_t rnd) {
    DecimalParts p;
    const auto* d = x.backend().data();
    if (mpfr_zero_p(d)) {
        p.zero = true;
        return p;
    }
    if (!mpfr_number_p(d))
        throw std::invalid_argument("decimal_parts: value is not finite");
    p.sign = mpfr_sgn(d) > 0 ? 1 : -1;
    mpfr_exp_t e = 0;
    char* s = mpfr_get_str(nullptr, &e, 10, ndigits, d, rnd);
    if (s == nullptr)
        throw std::runtime_error("decimal_parts: mpfr_get_str failed");
    p.digits = (s[0] == '-') ? s + 1 : s;
    mpfr_free_str(s);
    p.exp10 = static_cast<long>(e);
    return p;
}

// Canonical scientific form, e.g. "-1.234567e-9"; exact zero prints "0".
inline std::string to_decimal(const Real& x, std::size_t sig_digits) {
    if (sig_digits == 0)
        throw std::invalid_argument("to_decimal: need at least one digit");
    DecimalParts p = decimal_parts(x, sig_digits, MPFR_RNDN);
    if (p.zero)
        return "0";
    std::string out;
    if (p.sign < 0)
        out += '-';
    out += p.digits[0];
    if (p.digits.size() > 1) {
        out += '.';
        out += p.digits.substr(1);
    }
    out += 'e';
    long e = p.exp10 - 1;
    out += (e < 0) ? '-' : '+';
    out += std::to_string(e < 0 ? -e : e);
    return out;
}

}  // namespace finestruct
