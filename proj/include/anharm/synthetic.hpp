#pragma once

// Synthetic series with exactly known large-order parameters. For injected
// (A, b, C, c1),
//
//   a_k = -C * (-1)^{k+1} * A^{-k} * Gamma((M-1)k + b + 1) * (1 + c1/k),
//
// so the Stokes-multiplier sequence evaluates to C * (1 + c1/k) identically
// (and to the constant C when c1 = 0). Turns asymptotic statements into exact
// unit tests.

#include "anharm/functions.hpp"
#include "anharm/precision.hpp"
#include "anharm/series.hpp"

namespace anharm {

inline SeriesCoefficients synthetic_series(int M, int K, const BigReal& A, const BigReal& b,
                                           const BigReal& C, const BigReal& c1,
                                           const PrecisionContext& ctx) {
    if (M < 2) throw std::invalid_argument("synthetic_series: M must be >= 2");
    if (K < 1) throw std::invalid_argument("synthetic_series: K must be >= 1");
    SeriesCoefficients out;
    out.M = M;
    out.dps_used = ctx.dps();
    out.guard_used = ctx.guard();
    out.coeffs.reserve(static_cast<size_t>(K) + 1);

    BigReal half(ctx.bits());
    mpfr_set_d(half.raw(), 0.5, MPFR_RNDN);
    out.coeffs.push_back(half);  // a_0 plays no role in the asymptotics

    BigReal inv_a = BigReal(1, ctx) / A;
    BigReal pow_inv_a(1, ctx);
    for (int k = 1; k <= K; ++k) {
        pow_inv_a = pow_inv_a * inv_a;
        BigReal arg = BigReal(static_cast<long>(M - 1) * k, ctx) + b + BigReal(1, ctx);
        BigReal term = -C * gamma(arg, ctx) * pow_inv_a;
        if (k % 2 == 0) term = -term;  // (-1)^{k+1}
        term = term * (BigReal(1, ctx) + c1 / static_cast<long>(k));
        out.coeffs.push_back(term);
    }
    return out;
}

}  // namespace anharm
