#pragma once

// Large-order asymptotics of the perturbation coefficients,
//
//   a_k ~ C_M * (-1)^{k+1} * A_M^{-k} * Gamma((M-1)k + b + 1) * (1 + c1/k + ...),
//
// with b = -1/2. Provides the exact instanton action A_M, the ratio-based
// extraction sequences for (A, b, C, c1), and multi-window Richardson
// stability assessment.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "anharm/functions.hpp"
#include "anharm/precision.hpp"
#include "anharm/rational.hpp"
#include "anharm/richardson.hpp"
#include "anharm/series.hpp"

namespace anharm {

/// Extracted asymptotic parameters for one oscillator degree. C is signed
/// (negative in this family); reports usually display |C| alongside.
struct LargeOrderParams {
    int M = 0;
    BigReal A;
    BigReal b;
    BigReal C;
    std::optional<BigReal> c1;
};

/// Known closed forms of the signed Stokes multiplier (negative throughout
/// this family): M = 2, 3, 5, 7. Returns nullopt otherwise.
inline std::optional<BigReal> exact_stokes_multiplier(int M, const PrecisionContext& ctx) {
    PrecisionContext wide(ctx.dps(), ctx.guard() + 10);
    BigReal p = pi(wide);
    switch (M) {
        case 2:  // |C|^2 pi^3 = 6
            return round_to(-sqrt(BigReal(6, wide) / pow_si(p, 3)), ctx.bits());
        case 3:  // |C|^2 pi^4 = 32
            return round_to(-(BigReal(4, wide) * sqrt(BigReal(2, wide))) / pow_si(p, 2), ctx.bits());
        case 5: {  // |C|^4 Gamma(1/4)^4 pi^5 = 2^12 3^2
            BigReal g = gamma(BigReal(1, wide) / 4, wide);
            BigReal num = BigReal(8, wide) * sqrt(BigReal(3, wide));
            BigReal p54 = pow(p, BigReal(5, wide) / 4);
            return round_to(-(num / (g * p54)), ctx.bits());
        }
        case 7: {  // |C|^6 Gamma(1/3)^9 pi^6 = 2^20 3^3
            BigReal g = gamma(BigReal(1, wide) / 3, wide);
            BigReal rhs = pow_si(BigReal(2, wide), 20) * pow_si(BigReal(3, wide), 3);
            BigReal sixth = rhs / (pow_si(g, 9) * pow_si(p, 6));
            return round_to(-pow(sixth, BigReal(1, wide) / 6), ctx.bits());
        }
        default:
            return std::nullopt;
    }
}

/// S0(M) = 2^{-1/(M-1)} * B(1/(M-1), 3/2) / (M-1): the coupling-independent
/// prefactor of the classical bounce action.
inline BigReal classical_action_prefactor(int M, const PrecisionContext& ctx) {
    if (M < 2) throw std::invalid_argument("classical_action_prefactor: M must be >= 2");
    PrecisionContext wide(ctx.dps(), ctx.guard() + 10);
    long n = M - 1;
    BigReal inv_n = BigReal(1, wide) / n;
    BigReal three_half("1.5", wide);
    BigReal b = beta(inv_n, three_half, wide);
    BigReal two(2, wide);
    BigReal scale = pow(two, -inv_n);
    return round_to(scale * b / n, ctx.bits());
}

/// A_M = S0(M)^{M-1}.
inline BigReal instanton_action_exact(int M, const PrecisionContext& ctx) {
    PrecisionContext wide(ctx.dps(), ctx.guard() + 10);
    return round_to(pow_si(classical_action_prefactor(M, wide), M - 1), ctx.bits());
}

namespace detail {

/// prod_{j=0}^{M-2} ((M-1)k - j), exact.
inline mpz_class falling_product(int M, int k) {
    mpz_class p = 1;
    for (int j = 0; j <= M - 2; ++j) p *= static_cast<long>(M - 1) * k - j;
    return p;
}

inline void require_orders(const SeriesCoefficients& s, int need) {
    if (s.max_order() < need) {
        throw std::invalid_argument("series has only " + std::to_string(s.max_order()) +
                                    " orders; need at least " + std::to_string(need));
    }
}

inline void require_nonzero(const BigReal& a, int k) {
    if (a.is_zero()) {
        throw std::domain_error("malformed series: zero coefficient at order " + std::to_string(k));
    }
}

}  // namespace detail

/// Ratio sequence converging to the instanton action:
///   A~_k = prod_{j=0}^{M-2}((M-1)k - j) / (-r_k),  r_k = a_k / a_{k-1}.
/// Defined for k = 2 ... K.
inline NumericSequence action_sequence(const SeriesCoefficients& series) {
    detail::require_orders(series, 2);
    NumericSequence seq;
    seq.first_k = 2;
    for (int k = 2; k <= series.max_order(); ++k) {
        detail::require_nonzero(series.a(k), k);
        mpfr_prec_t bits = series.a(k).precision();
        BigReal p = to_real(detail::falling_product(series.M, k), bits);
        seq.values.push_back(-(p * series.a(k - 1)) / series.a(k));
    }
    return seq;
}

/// First-order solve for the Gamma shift b. With
/// P_k(b) = prod_{j=0}^{M-2}((M-1)k - j + b) the leading ansatz gives
/// -r_k A_M = P_k(b); linearizing in b,
///   b~_k = (-r_k A_M - P_k(0)) / (P_k(0) * sum_j 1/((M-1)k - j)),
/// which converges to b with O(1/k) error. Defined for k = 2 ... K.
inline NumericSequence shift_sequence(const SeriesCoefficients& series, const BigReal& A_exact) {
    detail::require_orders(series, 2);
    NumericSequence seq;
    seq.first_k = 2;
    for (int k = 2; k <= series.max_order(); ++k) {
        detail::require_nonzero(series.a(k - 1), k - 1);
        mpfr_prec_t bits = std::max(series.a(k).precision(), A_exact.precision());
        BigReal p0 = to_real(detail::falling_product(series.M, k), bits);
        BigRational inv_sum;
        for (int j = 0; j <= series.M - 2; ++j) {
            inv_sum = inv_sum + BigRational(1, static_cast<long>(series.M - 1) * k - j);
        }
        BigReal denom = p0 * to_real(inv_sum, bits);
        BigReal lhs = -(series.a(k) / series.a(k - 1)) * A_exact - p0;
        seq.values.push_back(lhs / denom);
    }
    return seq;
}

/// Stokes-multiplier sequence (with b fixed at -1/2):
///   C~_k = a_k * (-A_M)^k / Gamma((M-1)k + 1/2),
/// converging to the signed C_M. Defined for k = 1 ... K.
inline NumericSequence stokes_sequence(const SeriesCoefficients& series, const BigReal& A_exact,
                                       const PrecisionContext& ctx) {
    detail::require_orders(series, 1);
    const int M = series.M;
    mpfr_prec_t bits = std::max(A_exact.precision(), ctx.bits());

    NumericSequence seq;
    seq.first_k = 1;
    BigReal neg_a(bits);
    mpfr_neg(neg_a.raw(), A_exact.raw(), MPFR_RNDN);
    BigReal pow_neg_a(1, ctx);
    // G = Gamma((M-1)k + 1/2), advanced by the recurrence
    // Gamma(z + M - 1) = Gamma(z) * prod_{t=0}^{M-2} (z + t).
    BigReal g = gamma(BigReal("0.5", ctx), PrecisionContext(ctx.dps(), ctx.guard() + 10));
    BigReal factor(bits);
    for (int k = 1; k <= series.max_order(); ++k) {
        for (int t = 0; t <= M - 2; ++t) {
            // (M-1)(k-1) + 1/2 + t, exact half-integer
            mpfr_set_si(factor.raw(), 2 * (static_cast<long>(M - 1) * (k - 1) + t) + 1, MPFR_RNDN);
            mpfr_div_2ui(factor.raw(), factor.raw(), 1, MPFR_RNDN);
            g = g * factor;
        }
        pow_neg_a = pow_neg_a * neg_a;
        seq.values.push_back(series.a(k) * pow_neg_a / g);
    }
    return seq;
}

/// Subleading-correction sequence c~_{1,k} = k (C~_k / C - 1) -> c1.
inline NumericSequence c1_sequence(const NumericSequence& stokes_seq, const BigReal& C_exact) {
    if (C_exact.is_zero()) throw std::invalid_argument("c1_sequence: C must be nonzero");
    NumericSequence seq;
    seq.first_k = stokes_seq.first_k;
    for (int k = stokes_seq.first_k; k <= stokes_seq.last_k(); ++k) {
        mpfr_prec_t bits = std::max(stokes_seq.at(k).precision(), C_exact.precision());
        BigReal ratio(bits);
        mpfr_div(ratio.raw(), stokes_seq.at(k).raw(), C_exact.raw(), MPFR_RNDN);
        mpfr_sub_si(ratio.raw(), ratio.raw(), 1, MPFR_RNDN);
        mpfr_mul_si(ratio.raw(), ratio.raw(), k, MPFR_RNDN);
        seq.values.push_back(std::move(ratio));
    }
    return seq;
}

struct Window {
    int k0;
    int N;
    friend bool operator==(const Window&, const Window&) = default;
};

/// Per-window Richardson estimates plus the digit count on which they agree.
struct ExtrapolationResult {
    BigReal limit;
    std::vector<std::tuple<int, int, BigReal>> windows;  // (k0, N, estimate)
    int reliable_digits = 0;
};

namespace detail {

/// Longest common prefix of the decimal representations (sign, exponent and
/// leading digits must all match), capped at max_digits.
inline int common_decimal_prefix(const std::vector<BigReal>& values, int max_digits) {
    if (values.empty()) return 0;
    std::vector<std::string> mantissas;
    long exp0 = 0;
    int sign0 = 0;
    for (size_t idx = 0; idx < values.size(); ++idx) {
        const BigReal& v = values[idx];
        if (v.is_zero() || v.is_nan()) return 0;
        mpfr_exp_t e = 0;
        char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(max_digits), v.raw(), MPFR_RNDN);
        std::string m(raw);
        mpfr_free_str(raw);
        int sgn = 1;
        if (!m.empty() && m[0] == '-') {
            sgn = -1;
            m.erase(0, 1);
        }
        if (idx == 0) {
            exp0 = e;
            sign0 = sgn;
        } else if (e != exp0 || sgn != sign0) {
            return 0;
        }
        mantissas.push_back(std::move(m));
    }
    int common = max_digits;
    for (size_t idx = 1; idx < mantissas.size(); ++idx) {
        int match = 0;
        const std::string& a = mantissas[0];
        const std::string& b = mantissas[idx];
        while (match < static_cast<int>(std::min(a.size(), b.size())) &&
               a[static_cast<size_t>(match)] == b[static_cast<size_t>(match)]) {
            ++match;
        }
        common = std::min(common, match);
    }
    return common;
}

}  // namespace detail

/// Evaluates the sequence limit on each window and counts the digits shared
/// by all estimates. The reported limit comes from the window with the
/// largest k0*N, truncated at the agreed digits.
inline ExtrapolationResult assess_stability(const NumericSequence& seq,
                                            const std::vector<Window>& windows,
                                            const PrecisionContext& ctx) {
    if (windows.size() < 2) {
        throw std::invalid_argument("assess_stability: need at least two windows");
    }
    ExtrapolationResult out;
    std::vector<BigReal> estimates;
    long best_score = -1;
    size_t best_idx = 0;
    for (const auto& w : windows) {
        BigReal est = richardson(seq, w.k0, w.N, ctx);
        long score = static_cast<long>(w.k0) * w.N;
        if (score > best_score) {
            best_score = score;
            best_idx = estimates.size();
        }
        estimates.push_back(est);
        out.windows.emplace_back(w.k0, w.N, est);
    }
    out.reliable_digits = detail::common_decimal_prefix(estimates, ctx.dps());
    if (out.reliable_digits > 0) {
        out.limit = truncate_digits(estimates[best_idx], out.reliable_digits, ctx.bits());
    } else {
        out.limit = estimates[best_idx];
    }
    return out;
}

/// Default window policy: {(0.5K, N), (0.6K, N), (0.7K - N, N)}, clipped to
/// the sequence range and deduplicated.
inline std::vector<Window> default_windows(int max_order, int N, int first_k) {
    int K = max_order;
    N = std::min(N, std::max(1, (K - first_k) / 2));
    auto clip = [&](int k0) {
        k0 = std::max(k0, first_k);
        k0 = std::min(k0, K - N);
        return k0;
    };
    std::vector<Window> w;
    auto push_unique = [&](Window cand) {
        for (const auto& seen : w) {
            if (seen == cand) return;
        }
        w.push_back(cand);
    };
    push_unique({clip(K / 2), N});
    push_unique({clip(6 * K / 10), N});
    push_unique({clip(7 * K / 10 - N), N});
    if (w.size() < 2) {
        int alt = std::max(first_k, w.front().k0 - std::max(1, N / 2));
        if (alt != w.front().k0) {
            w.push_back(Window{alt, N});
        } else {
            w.push_back(Window{w.front().k0, std::max(1, N - 1)});
        }
    }
    return w;
}

}  // namespace anharm
