#pragma once

// Exact rational arithmetic (GMP-backed). Values are kept canonical at all
// times: lowest terms, positive denominator.

#include <gmpxx.h>

#include <stdexcept>
#include <string>

#include "anharm/precision.hpp"

namespace anharm {

class BigRational {
public:
    BigRational() : q_(0) {}

    BigRational(long num, long den = 1) : q_(num, den) {
        if (den == 0) throw std::invalid_argument("BigRational: zero denominator");
        q_.canonicalize();
    }

    BigRational(const mpz_class& num, const mpz_class& den) : q_(num, den) {
        if (den == 0) throw std::invalid_argument("BigRational: zero denominator");
        q_.canonicalize();
    }

    explicit BigRational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

    /// Parses "num", "num/den", or a plain decimal integer string.
    static BigRational parse(const std::string& s) {
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("BigRational: unparseable: " + s);
        if (q.get_den() == 0) throw std::invalid_argument("BigRational: zero denominator: " + s);
        q.canonicalize();
        return BigRational(std::move(q));
    }

    const mpz_class& num() const { return q_.get_num(); }
    const mpz_class& den() const { return q_.get_den(); }
    const mpq_class& value() const { return q_; }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sgn(q_) == 0; }

    std::string to_string() const {
        if (q_.get_den() == 1) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    friend BigRational operator+(const BigRational& a, const BigRational& b) { return BigRational(mpq_class(a.q_ + b.q_)); }
    friend BigRational operator-(const BigRational& a, const BigRational& b) { return BigRational(mpq_class(a.q_ - b.q_)); }
    friend BigRational operator*(const BigRational& a, const BigRational& b) { return BigRational(mpq_class(a.q_ * b.q_)); }
    friend BigRational operator/(const BigRational& a, const BigRational& b) {
        if (b.is_zero()) throw std::domain_error("BigRational: division by zero");
        return BigRational(mpq_class(a.q_ / b.q_));
    }
    friend BigRational operator-(const BigRational& a) { return BigRational(mpq_class(-a.q_)); }

    friend bool operator==(const BigRational& a, const BigRational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const BigRational& a, const BigRational& b) { return a.q_ != b.q_; }
    friend bool operator<(const BigRational& a, const BigRational& b) { return a.q_ < b.q_; }
    friend bool operator>(const BigRational& a, const BigRational& b) { return a.q_ > b.q_; }

private:
    mpq_class q_;
};

/// Correctly rounded conversion at the context's working precision.
inline BigReal to_real(const BigRational& q, const PrecisionContext& ctx) {
    BigReal r(ctx.bits());
    mpfr_set_q(r.raw(), q.value().get_mpq_t(), MPFR_RNDN);
    return r;
}

inline BigReal to_real(const BigRational& q, mpfr_prec_t bits) {
    BigReal r(bits);
    mpfr_set_q(r.raw(), q.value().get_mpq_t(), MPFR_RNDN);
    return r;
}

inline BigReal to_real(const mpz_class& z, mpfr_prec_t bits) {
    BigReal r(bits);
    mpfr_set_z(r.raw(), z.get_mpz_t(), MPFR_RNDN);
    return r;
}

}  // namespace anharm
