#include <catch2/catch_amalgamated.hpp>

#include "anharm/asymptotics.hpp"
#include "anharm/synthetic.hpp"
#include "anharm/verification.hpp"

using namespace anharm;

namespace {

BigReal pow10_neg(int e, const PrecisionContext& ctx) {
    BigReal t(ctx.bits());
    mpfr_set_si(t.raw(), 10, MPFR_RNDN);
    mpfr_pow_si(t.raw(), t.raw(), -e, MPFR_RNDN);
    return t;
}

}  // namespace

TEST_CASE("classical action prefactor closed cases") {
    PrecisionContext ctx(50);
    // M=2: S0 = 1/3
    REQUIRE(abs(classical_action_prefactor(2, ctx) - BigReal(1, ctx) / 3) < pow10_neg(45, ctx));
    // M=3: S0 = pi/(4 sqrt(2)), i.e. S0^2 = pi^2/32
    BigReal s3 = classical_action_prefactor(3, ctx);
    REQUIRE(abs(s3 - pi(ctx) / (BigReal(4, ctx) * sqrt(BigReal(2, ctx)))) < pow10_neg(45, ctx));
    // M=5: S0 = Gamma(1/4) sqrt(pi) / (8 * 2^{1/4} * Gamma(7/4))
    BigReal g14 = gamma(BigReal(1, ctx) / 4, ctx);
    BigReal g74 = gamma(BigReal(7, ctx) / 4, ctx);
    BigReal expected = g14 * sqrt(pi(ctx)) /
                       (BigReal(8, ctx) * pow(BigReal(2, ctx), BigReal(1, ctx) / 4) * g74);
    REQUIRE(abs(classical_action_prefactor(5, ctx) / expected - BigReal(1, ctx)) < pow10_neg(45, ctx));
}

TEST_CASE("instanton action matches the reference table to 1e-24") {
    for (const auto& chk : verify_instanton_actions(50, 24)) {
        INFO("M = " << chk.M << " rel err " << chk.rel_err);
        REQUIRE(chk.pass);
    }
}

TEST_CASE("instanton action decreases in M") {
    PrecisionContext ctx(30);
    BigReal prev = instanton_action_exact(2, ctx);
    for (int M = 3; M <= 11; ++M) {
        BigReal cur = instanton_action_exact(M, ctx);
        REQUIRE(cur < prev);
        REQUIRE(cur.sign() > 0);
        prev = cur;
    }
}

TEST_CASE("exact stokes multipliers are negative and satisfy their identities") {
    PrecisionContext ctx(40);
    for (int M : {2, 3, 5, 7}) {
        auto c = exact_stokes_multiplier(M, ctx);
        REQUIRE(c.has_value());
        REQUIRE(c->sign() < 0);
    }
    REQUIRE(!exact_stokes_multiplier(4, ctx).has_value());
    for (const auto& chk : verify_reference_identities(40, 20)) {
        INFO(chk.description << " residual " << chk.residual);
        REQUIRE(chk.pass);
    }
}

TEST_CASE("action sequence on a pure-ansatz synthetic series") {
    PrecisionContext ctx(60);
    BigReal A = BigReal(1, ctx) / 3;
    BigReal b(ctx.bits());
    mpfr_set_d(b.raw(), -0.5, MPFR_RNDN);
    BigReal C(ctx.bits());
    mpfr_set_d(C.raw(), -0.25, MPFR_RNDN);
    SeriesCoefficients syn = synthetic_series(2, 60, A, b, C, BigReal(0, ctx), ctx);

    NumericSequence a_seq = action_sequence(syn);
    // closed form of the ratio: A~_k = A * k / (k - 1/2)
    for (int k : {2, 10, 37}) {
        BigReal expected = A * BigReal(2 * k, ctx) / (2 * k - 1);
        REQUIRE(abs(a_seq.at(k) / expected - BigReal(1, ctx)) < pow10_neg(50, ctx));
    }
    // O(1/k) convergence toward A
    BigReal err10 = abs(a_seq.at(10) - A);
    BigReal err40 = abs(a_seq.at(40) - A);
    REQUIRE(err40 * 3 < err10);
    // Richardson accelerates by many orders
    REQUIRE(abs(richardson(a_seq, 30, 12, ctx) - A) < pow10_neg(20, ctx));
}

TEST_CASE("action sequence needs at least two orders") {
    PrecisionContext ctx(40);
    SeriesCoefficients s;
    s.M = 2;
    s.dps_used = 40;
    s.guard_used = 30;
    s.coeffs.emplace_back(1, ctx);
    REQUIRE_THROWS_AS(action_sequence(s), std::invalid_argument);
    s.coeffs.emplace_back(1, ctx);
    REQUIRE_THROWS_AS(action_sequence(s), std::invalid_argument);
}

TEST_CASE("zero coefficients are reported as malformed") {
    PrecisionContext ctx(40);
    SeriesCoefficients s;
    s.M = 2;
    s.dps_used = 40;
    s.guard_used = 30;
    for (int k = 0; k <= 5; ++k) s.coeffs.emplace_back(k == 3 ? 0 : 1, ctx);
    REQUIRE_THROWS_AS(action_sequence(s), std::domain_error);
}

TEST_CASE("shift sequence recovers b") {
    PrecisionContext ctx(60);
    BigReal minus_half(ctx.bits());
    mpfr_set_d(minus_half.raw(), -0.5, MPFR_RNDN);
    BigReal C(ctx.bits());
    mpfr_set_d(C.raw(), -1.5, MPFR_RNDN);

    // M=2: the estimator is exact on the pure ansatz
    BigReal A2 = BigReal(1, ctx) / 3;
    SeriesCoefficients syn2 = synthetic_series(2, 50, A2, minus_half, C, BigReal(0, ctx), ctx);
    NumericSequence b2 = shift_sequence(syn2, A2);
    for (int k : {2, 9, 33}) {
        REQUIRE(abs(b2.at(k) - minus_half) < pow10_neg(45, ctx));
    }

    // M=3: first-order estimator with O(1/k) error; Richardson converges to b
    BigReal A3 = instanton_action_exact(3, ctx);
    SeriesCoefficients syn3 = synthetic_series(3, 60, A3, minus_half, C, BigReal(0, ctx), ctx);
    NumericSequence b3 = shift_sequence(syn3, A3);
    REQUIRE(abs(richardson(b3, 20, 10, ctx) - minus_half) < pow10_neg(12, ctx));
    REQUIRE(abs(b3.at(50) - minus_half) < abs(b3.at(5) - minus_half));
}

TEST_CASE("stokes sequence is constant on the pure ansatz") {
    PrecisionContext ctx(60);
    BigReal minus_half(ctx.bits());
    mpfr_set_d(minus_half.raw(), -0.5, MPFR_RNDN);
    for (int M : {2, 4}) {
        BigReal A = instanton_action_exact(M, ctx);
        BigReal C(ctx.bits());
        mpfr_set_d(C.raw(), -0.75, MPFR_RNDN);
        SeriesCoefficients syn = synthetic_series(M, 40, A, minus_half, C, BigReal(0, ctx), ctx);
        NumericSequence c_seq = stokes_sequence(syn, A, ctx);
        for (int k = 1; k <= 40; ++k) {
            REQUIRE(abs(c_seq.at(k) - C) < pow10_neg(45, ctx));
        }
    }
}

TEST_CASE("c1 sequence recovers an injected subleading correction") {
    PrecisionContext ctx(60);
    BigReal minus_half(ctx.bits());
    mpfr_set_d(minus_half.raw(), -0.5, MPFR_RNDN);
    BigReal A = BigReal(1, ctx) / 3;
    BigReal C(ctx.bits());
    mpfr_set_d(C.raw(), -0.43989, MPFR_RNDN);

    // gamma = 2
    SeriesCoefficients syn = synthetic_series(2, 50, A, minus_half, C, BigReal(2, ctx), ctx);
    NumericSequence c_seq = stokes_sequence(syn, A, ctx);
    NumericSequence c1_seq = c1_sequence(c_seq, C);
    for (int k : {1, 10, 50}) {
        REQUIRE(abs(c1_seq.at(k) - BigReal(2, ctx)) < pow10_neg(45, ctx));
    }

    // no subleading correction: c1 = 0
    SeriesCoefficients flat = synthetic_series(2, 30, A, minus_half, C, BigReal(0, ctx), ctx);
    NumericSequence flat_c1 = c1_sequence(stokes_sequence(flat, A, ctx), C);
    for (int k : {1, 15, 30}) {
        REQUIRE(abs(flat_c1.at(k)) < pow10_neg(45, ctx));
    }
}

TEST_CASE("stability assessment across windows") {
    PrecisionContext ctx(50);
    BigReal minus_half(ctx.bits());
    mpfr_set_d(minus_half.raw(), -0.5, MPFR_RNDN);
    BigReal A = BigReal(1, ctx) / 3;
    BigReal C(ctx.bits());
    mpfr_set_d(C.raw(), -0.5625, MPFR_RNDN);
    SeriesCoefficients syn = synthetic_series(2, 60, A, minus_half, C, BigReal(1, ctx) / 4, ctx);
    NumericSequence c_seq = stokes_sequence(syn, A, ctx);

    ExtrapolationResult res = assess_stability(c_seq, {{20, 10}, {30, 10}, {40, 10}}, ctx);
    REQUIRE(res.windows.size() == 3);
    REQUIRE(res.reliable_digits > 10);
    REQUIRE(abs(res.limit - C) < pow10_neg(res.reliable_digits - 1, ctx));

    // identical windows agree to full precision
    ExtrapolationResult dup = assess_stability(c_seq, {{30, 10}, {30, 10}}, ctx);
    REQUIRE(dup.reliable_digits == ctx.dps());

    REQUIRE_THROWS_AS(assess_stability(c_seq, {{20, 10}}, ctx), std::invalid_argument);
    REQUIRE_THROWS_AS(assess_stability(c_seq, {{20, 10}, {55, 10}}, ctx), std::out_of_range);
}

TEST_CASE("default window policy stays in range") {
    for (int K : {60, 300, 1200}) {
        for (int N : {10, 40, 100}) {
            auto windows = default_windows(K, N, 1);
            REQUIRE(windows.size() >= 2);
            for (const auto& w : windows) {
                REQUIRE(w.k0 >= 1);
                REQUIRE(w.k0 + w.N <= K);
            }
        }
    }
}
