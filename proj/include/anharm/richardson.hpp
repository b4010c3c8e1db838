#pragma once

// Richardson extrapolation for sequences s_k = s + c1/k + c2/k^2 + ...
//
//   R_N = sum_{j=0}^{N} (-1)^{N-j} C(N,j) (k0+j)^N / N! * s_{k0+j}
//
// annihilates the first N inverse-power corrections. The binomial weights are
// built exactly as rationals; the weighted sum is evaluated with enough extra
// working bits to absorb the cancellation among the large alternating terms,
// whose size is known exactly from the weights themselves.

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "anharm/precision.hpp"
#include "anharm/rational.hpp"

namespace anharm {

/// A real-valued sequence defined at consecutive indices first_k() ... last_k().
struct NumericSequence {
    int first_k = 1;
    std::vector<BigReal> values;

    int last_k() const { return first_k + static_cast<int>(values.size()) - 1; }
    bool contains(int k) const { return k >= first_k && k <= last_k(); }

    const BigReal& at(int k) const {
        if (!contains(k)) {
            throw std::out_of_range("NumericSequence: index " + std::to_string(k) +
                                    " outside [" + std::to_string(first_k) + ", " +
                                    std::to_string(last_k()) + "]");
        }
        return values[static_cast<size_t>(k - first_k)];
    }
};

/// Exact weights w_j = (-1)^{N-j} C(N,j) (k0+j)^N / N!, j = 0..N.
/// They sum to 1 identically.
inline std::vector<BigRational> richardson_weights(int k0, int N) {
    if (N < 0 || k0 < 0) throw std::invalid_argument("richardson_weights: bad window");
    mpz_class nfact;
    mpz_fac_ui(nfact.get_mpz_t(), static_cast<unsigned long>(N));
    std::vector<BigRational> w;
    w.reserve(static_cast<size_t>(N) + 1);
    for (int j = 0; j <= N; ++j) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(N), static_cast<unsigned long>(j));
        mpz_class powkj;
        mpz_ui_pow_ui(powkj.get_mpz_t(), static_cast<unsigned long>(k0 + j), static_cast<unsigned long>(N));
        mpz_class num = binom * powkj;
        if ((N - j) % 2 != 0) num = -num;
        w.emplace_back(num, nfact);
    }
    return w;
}

/// Decimal digits consumed by weight cancellation: ceil(log10(sum |w_j|)).
inline int richardson_cancellation_digits(int k0, int N) {
    auto w = richardson_weights(k0, N);
    BigRational total;
    for (const auto& wj : w) total = total + BigRational(mpq_class(::abs(wj.value())));
    if (total.is_zero()) return 0;
    // size in base 10 overestimates log10 by at most 1 per operand
    auto digits10 = [](const mpz_class& z) {
        return static_cast<int>(mpz_sizeinbase(z.get_mpz_t(), 10));
    };
    int d = digits10(total.num()) - digits10(total.den()) + 1;
    return d > 0 ? d : 0;
}

/// Order-N extrapolation of seq starting at k0. Requires entries at
/// k0 ... k0+N. Result is rounded to ctx precision.
inline BigReal richardson(const NumericSequence& seq, int k0, int N, const PrecisionContext& ctx) {
    if (N < 0) throw std::invalid_argument("richardson: negative order");
    if (!seq.contains(k0) || !seq.contains(k0 + N)) {
        throw std::out_of_range("richardson: window [" + std::to_string(k0) + ", " +
                                std::to_string(k0 + N) + "] not covered by sequence [" +
                                std::to_string(seq.first_k) + ", " + std::to_string(seq.last_k()) + "]");
    }
    auto weights = richardson_weights(k0, N);
    int loss = richardson_cancellation_digits(k0, N);
    mpfr_prec_t work_bits = ctx.bits() + PrecisionContext::bits_for_digits(loss + 10);

    BigReal acc(work_bits);
    mpfr_set_zero(acc.raw(), 1);
    BigReal wj(work_bits);
    for (int j = 0; j <= N; ++j) {
        mpfr_set_q(wj.raw(), weights[static_cast<size_t>(j)].value().get_mpq_t(), MPFR_RNDN);
        mpfr_fma(acc.raw(), wj.raw(), seq.at(k0 + j).raw(), acc.raw(), MPFR_RNDN);
    }
    return round_to(acc, ctx.bits());
}

}  // namespace anharm
