#pragma once

// PSLQ integer-relation detection.
//
// Given reals v_0..v_{n-1}, searches for a nonzero integer vector m with
// sum_i m_i v_i = 0. Uses the standard two-matrix formulation with
// gamma = 2/sqrt(3): lower-trapezoidal H, integer change-of-basis B, row
// swaps chosen by the gamma-weighted diagonal, corner Givens rotations, and
// full Hermite reduction each round. At every iteration 1/max_j |H_jj| is a
// rigorous lower bound on the Euclidean norm of any relation, which is what
// certifies exclusion reports.
//
// A candidate is accepted only if its coefficients fit the requested bound
// and its residual against the *original* values stays below
// 10^{-(dps-10)} * max|v_i|. A detection whose residual check fails (or an
// exhausted iteration budget) yields an inconclusive outcome, never a
// certified exclusion.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <vector>

#include "anharm/precision.hpp"

namespace anharm {

struct IntegerRelation {
    std::vector<mpz_class> coefficients;  // aligned with the input values
    BigReal residual;                     // |sum_i m_i v_i|
    mpz_class max_abs_coeff;
};

enum class PslqStatus {
    found,                // relation returned, within bound, residual verified
    no_relation_in_bound, // certified: no relation with max|m_i| <= maxcoeff
    inconclusive,         // precision or iteration budget exhausted first
};

struct PslqResult {
    PslqStatus status = PslqStatus::inconclusive;
    std::optional<IntegerRelation> relation;
    BigReal norm_bound;  // certified lower bound on max|m_i| of any relation
    long iterations = 0;
};

namespace detail {

inline BigReal pslq_residual(const std::vector<BigReal>& values,
                             const std::vector<mpz_class>& m, mpfr_prec_t bits) {
    BigReal acc(bits), t(bits);
    mpfr_set_zero(acc.raw(), 1);
    for (size_t i = 0; i < values.size(); ++i) {
        mpfr_set_z(t.raw(), m[i].get_mpz_t(), MPFR_RNDN);
        mpfr_fma(acc.raw(), t.raw(), values[i].raw(), acc.raw(), MPFR_RNDN);
    }
    mpfr_abs(acc.raw(), acc.raw(), MPFR_RNDN);
    return acc;
}

inline void primitivize(std::vector<mpz_class>& m) {
    mpz_class g = 0;
    for (const auto& c : m) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (g > 1) {
        for (auto& c : m) c /= g;
    }
}

}  // namespace detail

inline PslqResult pslq(const std::vector<BigReal>& values, long maxcoeff,
                       const PrecisionContext& ctx, long maxsteps = 0) {
    const int n = static_cast<int>(values.size());
    if (n < 2) throw std::invalid_argument("pslq: need at least two values");
    if (ctx.dps() < 15) throw std::invalid_argument("pslq: ctx.dps must be >= 15");
    if (maxcoeff < 1) throw std::invalid_argument("pslq: maxcoeff must be >= 1");
    for (const auto& v : values) {
        if (v.is_zero() || v.is_nan()) throw std::invalid_argument("pslq: values must be nonzero");
    }
    if (maxsteps <= 0) maxsteps = 50L * ctx.dps() * ctx.dps() + 1000;

    const mpfr_prec_t bits = ctx.bits();
    auto mk = [&] {
        BigReal r(bits);
        mpfr_set_zero(r.raw(), 1);
        return r;
    };

    // Detection threshold on the normalized y-vector. A genuine relation m
    // has |sum m_i v_i| <= ||m||_1 * (input error) ~ maxcoeff * 10^{-dps}, so
    // the threshold scales with maxcoeff; anything looser starts detecting
    // best-fit noise at low precision. 10^{-(dps-10)} is the outer cap.
    BigReal tol = mk(), noise = mk(), ten(bits);
    mpfr_set_si(ten.raw(), 10, MPFR_RNDN);
    {
        BigReal cap = mk(), scaled = mk();
        mpfr_pow_si(cap.raw(), ten.raw(), -(ctx.dps() - 10), MPFR_RNDN);
        mpfr_pow_si(scaled.raw(), ten.raw(), -(ctx.dps() - 2), MPFR_RNDN);
        mpfr_mul_si(scaled.raw(), scaled.raw(), maxcoeff, MPFR_RNDN);
        tol = scaled < cap ? scaled : cap;
    }
    mpfr_pow_si(noise.raw(), ten.raw(), -(ctx.effective_dps() - 5), MPFR_RNDN);

    BigReal max_abs_v = mk();
    for (const auto& v : values) {
        BigReal a = abs(v);
        if (a > max_abs_v) max_abs_v = a;
    }
    BigReal accept_threshold = tol * max_abs_v;

    // partial sums s_k = sqrt(sum_{j>=k} v_j^2); y = v / s_0
    std::vector<BigReal> s(static_cast<size_t>(n), mk());
    {
        BigReal run = mk();
        for (int k = n - 1; k >= 0; --k) {
            mpfr_fma(run.raw(), values[static_cast<size_t>(k)].raw(),
                     values[static_cast<size_t>(k)].raw(), run.raw(), MPFR_RNDN);
            mpfr_sqrt(s[static_cast<size_t>(k)].raw(), run.raw(), MPFR_RNDN);
        }
    }
    BigReal s0 = s[0];
    std::vector<BigReal> y;
    y.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        y.push_back(values[static_cast<size_t>(k)] / s0);
        s[static_cast<size_t>(k)] = s[static_cast<size_t>(k)] / s0;
    }

    std::vector<std::vector<BigReal>> H(static_cast<size_t>(n),
                                        std::vector<BigReal>(static_cast<size_t>(n - 1), mk()));
    for (int i = 0; i < n; ++i) {
        if (i < n - 1) {
            H[i][i] = s[static_cast<size_t>(i) + 1] / s[static_cast<size_t>(i)];
        }
        for (int j = 0; j < i && j < n - 1; ++j) {
            H[i][j] = -(y[static_cast<size_t>(i)] * y[static_cast<size_t>(j)]) /
                      (s[static_cast<size_t>(j)] * s[static_cast<size_t>(j) + 1]);
        }
    }

    std::vector<std::vector<mpz_class>> B(static_cast<size_t>(n),
                                          std::vector<mpz_class>(static_cast<size_t>(n)));
    for (int i = 0; i < n; ++i) B[i][i] = 1;

    BigReal q(bits), tmp(bits), tf(bits);
    mpz_class t;

    auto hermite_reduce = [&] {
        for (int i = 1; i < n; ++i) {
            for (int j = std::min(i - 1, n - 2); j >= 0; --j) {
                if (mpfr_zero_p(H[j][j].raw())) continue;
                mpfr_div(q.raw(), H[i][j].raw(), H[j][j].raw(), MPFR_RNDN);
                mpfr_get_z(t.get_mpz_t(), q.raw(), MPFR_RNDN);
                if (t == 0) continue;
                mpfr_set_z(tf.raw(), t.get_mpz_t(), MPFR_RNDN);
                mpfr_fma(y[static_cast<size_t>(j)].raw(), tf.raw(), y[static_cast<size_t>(i)].raw(),
                         y[static_cast<size_t>(j)].raw(), MPFR_RNDN);
                for (int k = 0; k <= j; ++k) {
                    mpfr_mul(tmp.raw(), tf.raw(), H[j][k].raw(), MPFR_RNDN);
                    mpfr_sub(H[i][k].raw(), H[i][k].raw(), tmp.raw(), MPFR_RNDN);
                }
                for (int k = 0; k < n; ++k) {
                    mpz_addmul(B[k][j].get_mpz_t(), t.get_mpz_t(), B[k][i].get_mpz_t());
                }
            }
        }
    };

    hermite_reduce();

    PslqResult result;
    result.norm_bound = BigReal(1, ctx);

    BigReal gamma_w(bits);
    mpfr_set_si(gamma_w.raw(), 4, MPFR_RNDN);
    mpfr_div_si(gamma_w.raw(), gamma_w.raw(), 3, MPFR_RNDN);
    mpfr_sqrt(gamma_w.raw(), gamma_w.raw(), MPFR_RNDN);

    BigReal sqrt_n(bits);
    mpfr_set_si(sqrt_n.raw(), n, MPFR_RNDN);
    mpfr_sqrt(sqrt_n.raw(), sqrt_n.raw(), MPFR_RNDN);

    BigReal maxcoeff_r(bits);
    mpfr_set_si(maxcoeff_r.raw(), maxcoeff, MPFR_RNDN);

    for (long step = 0; step < maxsteps; ++step) {
        result.iterations = step;

        // candidate check: small normalized residual
        int small_idx = -1;
        for (int i = 0; i < n; ++i) {
            BigReal a = abs(y[static_cast<size_t>(i)]);
            if (a < tol && (small_idx < 0 || a < abs(y[static_cast<size_t>(small_idx)]))) {
                small_idx = i;
            }
        }
        if (small_idx >= 0) {
            std::vector<mpz_class> m(static_cast<size_t>(n));
            for (int j = 0; j < n; ++j) m[static_cast<size_t>(j)] = B[j][small_idx];
            detail::primitivize(m);
            mpz_class maxc = 0;
            for (const auto& c : m) {
                mpz_class a = ::abs(c);
                if (a > maxc) maxc = a;
            }
            BigReal resid = detail::pslq_residual(values, m, bits);
            if (maxc != 0 && maxc <= maxcoeff && resid < accept_threshold) {
                IntegerRelation rel;
                rel.coefficients = std::move(m);
                rel.residual = resid;
                rel.max_abs_coeff = maxc;
                result.status = PslqStatus::found;
                result.relation = std::move(rel);
                return result;
            }
            // y has collapsed but the candidate is unacceptable: precision
            // (or the basis) is exhausted at this working accuracy
            if (abs(y[static_cast<size_t>(small_idx)]) < noise) {
                result.status = PslqStatus::inconclusive;
                return result;
            }
        }

        // certified bound: any relation has 2-norm >= 1/max_j |H_jj|
        BigReal maxdiag = mk();
        for (int j = 0; j < n - 1; ++j) {
            BigReal a = abs(H[j][j]);
            if (a > maxdiag) maxdiag = a;
        }
        if (!maxdiag.is_zero()) {
            BigReal bound = BigReal(1, ctx) / maxdiag / sqrt_n;  // infinity-norm bound
            result.norm_bound = bound;
            if (bound > maxcoeff_r) {
                result.status = PslqStatus::no_relation_in_bound;
                return result;
            }
        }

        // row choice: maximize gamma^i |H_ii|
        int m_row = 0;
        {
            BigReal best = mk(), w(bits), cand(bits);
            mpfr_set_si(w.raw(), 1, MPFR_RNDN);
            for (int i = 0; i < n - 1; ++i) {
                mpfr_mul(cand.raw(), w.raw(), H[i][i].raw(), MPFR_RNDN);
                mpfr_abs(cand.raw(), cand.raw(), MPFR_RNDN);
                if (cand > best) {
                    best = cand;
                    m_row = i;
                }
                mpfr_mul(w.raw(), w.raw(), gamma_w.raw(), MPFR_RNDN);
            }
        }

        std::swap(y[static_cast<size_t>(m_row)], y[static_cast<size_t>(m_row) + 1]);
        std::swap(H[static_cast<size_t>(m_row)], H[static_cast<size_t>(m_row) + 1]);
        for (int k = 0; k < n; ++k) {
            std::swap(B[static_cast<size_t>(k)][static_cast<size_t>(m_row)],
                      B[static_cast<size_t>(k)][static_cast<size_t>(m_row) + 1]);
        }

        if (m_row <= n - 3) {
            // Givens rotation restoring the trapezoidal shape of columns m, m+1
            BigReal t0(bits), t1(bits), t2(bits), t3(bits), t4(bits);
            mpfr_hypot(t0.raw(), H[m_row][m_row].raw(), H[m_row][m_row + 1].raw(), MPFR_RNDN);
            if (!mpfr_zero_p(t0.raw())) {
                mpfr_div(t1.raw(), H[m_row][m_row].raw(), t0.raw(), MPFR_RNDN);
                mpfr_div(t2.raw(), H[m_row][m_row + 1].raw(), t0.raw(), MPFR_RNDN);
                for (int i = m_row; i < n; ++i) {
                    mpfr_set(t3.raw(), H[i][m_row].raw(), MPFR_RNDN);
                    mpfr_set(t4.raw(), H[i][m_row + 1].raw(), MPFR_RNDN);
                    mpfr_mul(tmp.raw(), t2.raw(), t4.raw(), MPFR_RNDN);
                    mpfr_fma(H[i][m_row].raw(), t1.raw(), t3.raw(), tmp.raw(), MPFR_RNDN);
                    mpfr_mul(tmp.raw(), t2.raw(), t3.raw(), MPFR_RNDN);
                    mpfr_neg(tmp.raw(), tmp.raw(), MPFR_RNDN);
                    mpfr_fma(H[i][m_row + 1].raw(), t1.raw(), t4.raw(), tmp.raw(), MPFR_RNDN);
                }
            }
        }

        hermite_reduce();
    }

    result.status = PslqStatus::inconclusive;
    return result;
}

}  // namespace anharm
