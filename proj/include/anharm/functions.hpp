#pragma once

// Special functions and the handful of integer-arithmetic helpers the
// extraction and recognition stages rely on. Gamma-family results are
// digits-correct at ctx.dps(): evaluation runs with extra internal bits and
// rounds once at the end.

#include <gmpxx.h>
#include <mpfr.h>

#include <stdexcept>
#include <vector>

#include "anharm/precision.hpp"
#include "anharm/rational.hpp"

namespace anharm {

namespace detail {
constexpr mpfr_prec_t kSpecialFnPad = 32;
}

/// Gamma(x). Poles at non-positive integers are rejected.
inline BigReal gamma(const BigReal& x, const PrecisionContext& ctx) {
    if (x.is_integer() && x.sign() <= 0) {
        throw std::domain_error("gamma: pole at non-positive integer argument");
    }
    BigReal work(ctx.bits() + detail::kSpecialFnPad);
    mpfr_gamma(work.raw(), x.raw(), MPFR_RNDN);
    return round_to(work, ctx.bits());
}

/// log Gamma(x) for x > 0. exp(log_gamma(x)) agrees with gamma(x).
inline BigReal log_gamma(const BigReal& x, const PrecisionContext& ctx) {
    if (x.sign() <= 0) throw std::domain_error("log_gamma: argument must be positive");
    BigReal work(ctx.bits() + detail::kSpecialFnPad);
    mpfr_lngamma(work.raw(), x.raw(), MPFR_RNDN);
    return round_to(work, ctx.bits());
}

/// Euler Beta function B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b) for a, b > 0.
inline BigReal beta(const BigReal& a, const BigReal& b, const PrecisionContext& ctx) {
    if (a.sign() <= 0 || b.sign() <= 0) {
        throw std::domain_error("beta: arguments must be positive");
    }
    mpfr_prec_t wbits = ctx.bits() + detail::kSpecialFnPad;
    BigReal la(wbits), lb(wbits), lab(wbits), sum(wbits);
    mpfr_lngamma(la.raw(), a.raw(), MPFR_RNDN);
    mpfr_lngamma(lb.raw(), b.raw(), MPFR_RNDN);
    mpfr_add(sum.raw(), a.raw(), b.raw(), MPFR_RNDN);
    mpfr_lngamma(lab.raw(), sum.raw(), MPFR_RNDN);
    mpfr_add(la.raw(), la.raw(), lb.raw(), MPFR_RNDN);
    mpfr_sub(la.raw(), la.raw(), lab.raw(), MPFR_RNDN);
    mpfr_exp(la.raw(), la.raw(), MPFR_RNDN);
    return round_to(la, ctx.bits());
}

inline BigReal ln2(const PrecisionContext& ctx) {
    BigReal r(ctx.bits());
    mpfr_const_log2(r.raw(), MPFR_RNDN);
    return r;
}

inline BigReal ln(long n, const PrecisionContext& ctx) {
    if (n <= 0) throw std::domain_error("ln: argument must be positive");
    BigReal work(ctx.bits() + detail::kSpecialFnPad);
    mpfr_set_si(work.raw(), n, MPFR_RNDN);
    mpfr_log(work.raw(), work.raw(), MPFR_RNDN);
    return round_to(work, ctx.bits());
}

/// n!! as an exact integer (0!! = 1!! = 1).
inline mpz_class double_factorial(long n) {
    if (n < 0) throw std::invalid_argument("double_factorial: negative argument");
    mpz_class r = 1;
    for (long k = n; k > 1; k -= 2) r *= k;
    return r;
}

/// Euler totient phi(n), by trial-division factorization.
inline long totient(long n) {
    if (n < 1) throw std::invalid_argument("totient: argument must be >= 1");
    long result = n;
    long m = n;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            result -= result / p;
            while (m % p == 0) m /= p;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

/// Ascending residues a in [1, n) with gcd(a, n) = 1; length phi(n).
inline std::vector<long> coprime_residues(long n) {
    if (n < 2) throw std::invalid_argument("coprime_residues: argument must be >= 2");
    std::vector<long> out;
    mpz_class nz = n;
    for (long a = 1; a < n; ++a) {
        mpz_class g;
        mpz_class az = a;
        mpz_gcd(g.get_mpz_t(), az.get_mpz_t(), nz.get_mpz_t());
        if (g == 1) out.push_back(a);
    }
    return out;
}

/// Count of algebraically independent Gamma(a/n) transcendentals used for
/// basis sizing: phi(n)/2 for n >= 3, and 0 for n = 1, 2 (where Gamma at
/// the coprime arguments degenerates to 1 and sqrt(pi)).
inline long gamma_independent_count(long n) {
    if (n < 1) throw std::invalid_argument("gamma_independent_count: argument must be >= 1");
    if (n <= 2) return 0;
    return totient(n) / 2;
}

}  // namespace anharm
