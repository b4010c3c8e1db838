#pragma once

// Arbitrary-precision real arithmetic on top of MPFR.
//
// Every value carries its own binary precision; a PrecisionContext maps a
// requested decimal precision (dps) plus guard digits onto that binary
// precision. All operations round to nearest and are deterministic: the same
// inputs under the same context produce bit-identical results.

#include <mpfr.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>
#include <utility>

namespace anharm {

/// Decimal working precision: `dps` requested digits plus `guard` extra
/// working digits absorbed by intermediate rounding.
class PrecisionContext {
public:
    explicit PrecisionContext(int dps, int guard = 30) : dps_(dps), guard_(guard) {
        if (dps < 1) throw std::invalid_argument("PrecisionContext: dps must be positive");
        if (guard < 0) throw std::invalid_argument("PrecisionContext: guard must be non-negative");
    }

    int dps() const { return dps_; }
    int guard() const { return guard_; }
    int effective_dps() const { return dps_ + guard_; }

    /// Binary precision backing effective_dps() decimal digits.
    mpfr_prec_t bits() const { return bits_for_digits(effective_dps()); }

    static mpfr_prec_t bits_for_digits(int digits) {
        // log2(10) = 3.3219..., rounded up plus a small pad so that decimal
        // round-trips at `digits` are never precision-limited.
        return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 16;
    }

    friend bool operator==(const PrecisionContext& a, const PrecisionContext& b) {
        return a.dps_ == b.dps_ && a.guard_ == b.guard_;
    }

private:
    int dps_;
    int guard_;
};

/// Immutable-by-convention arbitrary-precision real. Copies preserve the
/// source precision; arithmetic results take the larger operand precision.
class BigReal {
public:
    BigReal() { mpfr_init2(v_, MPFR_PREC_MIN); }

    explicit BigReal(mpfr_prec_t bits) { mpfr_init2(v_, bits); }

    BigReal(long n, const PrecisionContext& ctx) {
        mpfr_init2(v_, ctx.bits());
        mpfr_set_si(v_, n, MPFR_RNDN);
    }

    BigReal(const std::string& decimal, const PrecisionContext& ctx) {
        mpfr_init2(v_, ctx.bits());
        set_from_string(decimal);
    }

    BigReal(const BigReal& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }

    BigReal(BigReal&& o) noexcept {
        mpfr_init2(v_, MPFR_PREC_MIN);
        mpfr_swap(v_, o.v_);
    }

    BigReal& operator=(const BigReal& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }

    BigReal& operator=(BigReal&& o) noexcept {
        if (this != &o) mpfr_swap(v_, o.v_);
        return *this;
    }

    ~BigReal() { mpfr_clear(v_); }

    static BigReal parse(const std::string& decimal, mpfr_prec_t bits) {
        BigReal r(bits);
        r.set_from_string(decimal);
        return r;
    }

    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
    int sign() const { return mpfr_sgn(v_); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_nan() const { return mpfr_nan_p(v_) != 0; }
    bool is_integer() const { return mpfr_integer_p(v_) != 0; }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }

    /// Scientific form with `digits` significant digits, e.g. "-1.2345e-3".
    std::string to_string(int digits) const { return format(digits); }

    /// Shortest decimal string that reads back bit-identically at this
    /// value's precision (round-to-nearest both ways).
    std::string to_string_exact() const { return format(0); }

    friend bool operator==(const BigReal& a, const BigReal& b) { return mpfr_equal_p(a.v_, b.v_) != 0; }
    friend bool operator!=(const BigReal& a, const BigReal& b) { return !(a == b); }
    friend bool operator<(const BigReal& a, const BigReal& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
    friend bool operator<=(const BigReal& a, const BigReal& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
    friend bool operator>(const BigReal& a, const BigReal& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
    friend bool operator>=(const BigReal& a, const BigReal& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

private:
    void set_from_string(const std::string& s) {
        // mpfr_set_str returns nonzero whenever the string is not entirely a
        // valid number (the value may still have been partially consumed)
        if (mpfr_set_str(v_, s.c_str(), 10, MPFR_RNDN) != 0) {
            throw std::invalid_argument("BigReal: unparseable decimal string: " + s);
        }
    }

    std::string format(int digits) const {
        if (mpfr_nan_p(v_)) return "nan";
        if (mpfr_inf_p(v_)) return mpfr_sgn(v_) < 0 ? "-inf" : "inf";
        if (mpfr_zero_p(v_)) return "0";
        mpfr_exp_t exp = 0;
        char* raw = mpfr_get_str(nullptr, &exp, 10, static_cast<size_t>(digits), v_, MPFR_RNDN);
        std::string mant(raw);
        mpfr_free_str(raw);
        std::string sign;
        if (!mant.empty() && mant[0] == '-') {
            sign = "-";
            mant.erase(0, 1);
        }
        // mpfr convention: value = 0.mant * 10^exp
        std::string out = sign + mant.substr(0, 1);
        if (mant.size() > 1) out += "." + mant.substr(1);
        out += "e" + std::to_string(static_cast<long>(exp - 1));
        return out;
    }

    mpfr_t v_;
};

namespace detail {

inline mpfr_prec_t join_prec(const BigReal& a, const BigReal& b) {
    return std::max(a.precision(), b.precision());
}

}  // namespace detail

inline BigReal operator+(const BigReal& a, const BigReal& b) {
    BigReal r(detail::join_prec(a, b));
    mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}

inline BigReal operator-(const BigReal& a, const BigReal& b) {
    BigReal r(detail::join_prec(a, b));
    mpfr_sub(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}

inline BigReal operator*(const BigReal& a, const BigReal& b) {
    BigReal r(detail::join_prec(a, b));
    mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}

inline BigReal operator/(const BigReal& a, const BigReal& b) {
    BigReal r(detail::join_prec(a, b));
    mpfr_div(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}

inline BigReal operator-(const BigReal& a) {
    BigReal r(a.precision());
    mpfr_neg(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

inline BigReal operator*(const BigReal& a, long b) {
    BigReal r(a.precision());
    mpfr_mul_si(r.raw(), a.raw(), b, MPFR_RNDN);
    return r;
}

inline BigReal operator*(long a, const BigReal& b) { return b * a; }

inline BigReal operator/(const BigReal& a, long b) {
    BigReal r(a.precision());
    mpfr_div_si(r.raw(), a.raw(), b, MPFR_RNDN);
    return r;
}

inline BigReal abs(const BigReal& a) {
    BigReal r(a.precision());
    mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

inline BigReal sqrt(const BigReal& a) {
    BigReal r(a.precision());
    mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

inline BigReal exp(const BigReal& a) {
    BigReal r(a.precision());
    mpfr_exp(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

inline BigReal log(const BigReal& a) {
    BigReal r(a.precision());
    mpfr_log(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

inline BigReal sin(const BigReal& a) {
    BigReal r(a.precision());
    mpfr_sin(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

inline BigReal pow_si(const BigReal& a, long e) {
    BigReal r(a.precision());
    mpfr_pow_si(r.raw(), a.raw(), e, MPFR_RNDN);
    return r;
}

inline BigReal pow(const BigReal& a, const BigReal& e) {
    BigReal r(detail::join_prec(a, e));
    mpfr_pow(r.raw(), a.raw(), e.raw(), MPFR_RNDN);
    return r;
}

/// Round a value to a (usually lower) target precision.
inline BigReal round_to(const BigReal& a, mpfr_prec_t bits) {
    BigReal r(bits);
    mpfr_set(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}

/// Keeps the leading `digits` significand digits and drops the rest
/// (truncation toward zero, no rounding).
inline BigReal truncate_digits(const BigReal& v, int digits, mpfr_prec_t bits) {
    if (digits <= 0 || v.is_zero() || v.is_nan()) return round_to(v, bits);
    mpfr_exp_t e = 0;
    char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits + 2), v.raw(), MPFR_RNDZ);
    std::string m(raw);
    mpfr_free_str(raw);
    std::string sign;
    if (!m.empty() && m[0] == '-') {
        sign = "-";
        m.erase(0, 1);
    }
    m = m.substr(0, static_cast<size_t>(digits));
    std::string s = sign + "0." + m + "e" + std::to_string(static_cast<long>(e));
    return BigReal::parse(s, bits);
}

inline BigReal pi(const PrecisionContext& ctx) {
    BigReal r(ctx.bits());
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}

}  // namespace anharm
