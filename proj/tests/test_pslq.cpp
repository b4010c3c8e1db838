#include <catch2/catch_amalgamated.hpp>

#include <numeric>
#include <random>

#include "anharm/functions.hpp"
#include "anharm/pslq.hpp"

using namespace anharm;

namespace {

BigReal pow10_neg(int e, const PrecisionContext& ctx) {
    BigReal t(ctx.bits());
    mpfr_set_si(t.raw(), 10, MPFR_RNDN);
    mpfr_pow_si(t.raw(), t.raw(), -e, MPFR_RNDN);
    return t;
}

// compares up to overall sign
bool same_relation(const std::vector<mpz_class>& got, const std::vector<long>& expected) {
    if (got.size() != expected.size()) return false;
    bool direct = true, flipped = true;
    for (size_t i = 0; i < got.size(); ++i) {
        direct = direct && (got[i] == expected[i]);
        flipped = flipped && (got[i] == -expected[i]);
    }
    return direct || flipped;
}

}  // namespace

TEST_CASE("ln 6 = ln 2 + ln 3") {
    PrecisionContext ctx(40);
    std::vector<BigReal> v{ln2(ctx), ln(3, ctx), ln(6, ctx)};
    PslqResult r = pslq(v, 100, ctx);
    REQUIRE(r.status == PslqStatus::found);
    REQUIRE(same_relation(r.relation->coefficients, {1, 1, -1}));
    REQUIRE(r.relation->max_abs_coeff == 1);
}

TEST_CASE("exact rational ratio") {
    PrecisionContext ctx(30);
    std::vector<BigReal> v{BigReal(1, ctx), BigReal(2, ctx)};
    PslqResult r = pslq(v, 10, ctx);
    REQUIRE(r.status == PslqStatus::found);
    REQUIRE(same_relation(r.relation->coefficients, {2, -1}));
}

TEST_CASE("quartic multiplier relation (2, 3, -1, -1)") {
    PrecisionContext ctx(40);
    // |C| = sqrt(6/pi^3): 2 ln|C| + 3 ln pi - ln 2 - ln 3 = 0
    BigReal c = sqrt(BigReal(6, ctx) / pow_si(pi(ctx), 3));
    std::vector<BigReal> v{log(c), log(pi(ctx)), ln2(ctx), ln(3, ctx)};
    PslqResult r = pslq(v, 200, ctx);
    REQUIRE(r.status == PslqStatus::found);
    REQUIRE(same_relation(r.relation->coefficients, {2, 3, -1, -1}));
}

TEST_CASE("found relations satisfy the soundness contract") {
    PrecisionContext ctx(40);
    std::vector<BigReal> v{ln2(ctx), ln(3, ctx), ln(12, ctx)};  // 2 ln2 + ln3 - ln12 = 0
    PslqResult r = pslq(v, 50, ctx);
    REQUIRE(r.status == PslqStatus::found);
    REQUIRE(same_relation(r.relation->coefficients, {2, 1, -1}));
    REQUIRE(r.relation->max_abs_coeff <= 50);

    // residual recomputed against the inputs stays below 10^{-(dps-10)} * max|v|
    BigReal acc(ctx.bits()), t(ctx.bits());
    mpfr_set_zero(acc.raw(), 1);
    for (size_t i = 0; i < v.size(); ++i) {
        mpfr_set_z(t.raw(), r.relation->coefficients[i].get_mpz_t(), MPFR_RNDN);
        mpfr_fma(acc.raw(), t.raw(), v[i].raw(), acc.raw(), MPFR_RNDN);
    }
    BigReal max_v = ln(12, ctx);
    REQUIRE(abs(acc) < pow10_neg(ctx.dps() - 10, ctx) * max_v);

    // returned vector is primitive
    mpz_class g = 0;
    for (const auto& c : r.relation->coefficients) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    }
    REQUIRE(g == 1);
}

TEST_CASE("planted relations are recovered") {
    PrecisionContext ctx(40);
    std::mt19937 rng(20240917);
    std::uniform_int_distribution<long> coeff(-50, 50);
    std::uniform_real_distribution<double> val(0.5, 3.0);

    const int trials = 100;
    int recovered = 0;
    for (int trial = 0; trial < trials; ++trial) {
        const size_t n = 6;
        std::vector<long> planted(n);
        do {
            for (auto& c : planted) c = coeff(rng);
        } while (planted[n - 1] == 0);
        {  // primitive form of the planted vector
            long g = 0;
            for (long c : planted) g = std::gcd(g, c);
            for (auto& c : planted) c /= g;
        }
        std::vector<BigReal> v;
        for (size_t i = 0; i + 1 < n; ++i) {
            BigReal x(ctx.bits());
            mpfr_set_d(x.raw(), val(rng), MPFR_RNDN);
            v.push_back(log(BigReal(1, ctx) + exp(x)));  // generic value in (0.7, 3.1)
        }
        BigReal solved(0, ctx);
        for (size_t i = 0; i + 1 < n; ++i) solved = solved + planted[i] * v[i];
        solved = -(solved / planted[n - 1]);
        if (solved.is_zero()) continue;
        v.push_back(solved);

        PslqResult r = pslq(v, 10000, ctx);
        if (r.status == PslqStatus::found && same_relation(r.relation->coefficients, planted)) {
            ++recovered;
        }
    }
    INFO("recovered " << recovered << "/" << trials);
    REQUIRE(recovered >= 99);
}

TEST_CASE("independent values yield a certified exclusion") {
    PrecisionContext ctx(30);
    std::vector<BigReal> v{BigReal(1, ctx), sqrt(BigReal(2, ctx)), sqrt(BigReal(3, ctx))};
    PslqResult r = pslq(v, 50, ctx);
    REQUIRE(r.status == PslqStatus::no_relation_in_bound);
    REQUIRE(r.norm_bound > BigReal(50, ctx));
    REQUIRE(!r.relation.has_value());
}

TEST_CASE("over-ambitious bounds at low precision come back inconclusive") {
    PrecisionContext ctx(15);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> val(0.5, 3.0);
    std::vector<BigReal> v;
    for (int i = 0; i < 5; ++i) {
        BigReal x(ctx.bits());
        mpfr_set_d(x.raw(), val(rng), MPFR_RNDN);
        v.push_back(x);
    }
    // detection limit at 15 digits over 5 values is ~10^3; asking for 10^8
    // must not produce a certified exclusion
    PslqResult r = pslq(v, 100000000L, ctx, 4000);
    REQUIRE(r.status != PslqStatus::no_relation_in_bound);
}

TEST_CASE("input validation") {
    PrecisionContext ctx(30);
    REQUIRE_THROWS_AS(pslq({BigReal(1, ctx)}, 10, ctx), std::invalid_argument);
    REQUIRE_THROWS_AS(pslq({BigReal(1, ctx), BigReal(0, ctx)}, 10, ctx), std::invalid_argument);
    PrecisionContext low(10);
    REQUIRE_THROWS_AS(pslq({BigReal(1, low), BigReal(2, low)}, 10, low), std::invalid_argument);
    REQUIRE_THROWS_AS(pslq({BigReal(1, ctx), BigReal(2, ctx)}, 0, ctx), std::invalid_argument);
}

TEST_CASE("pslq is deterministic") {
    PrecisionContext ctx(35);
    std::vector<BigReal> v{ln2(ctx), ln(5, ctx), ln(10, ctx), log(pi(ctx))};
    PslqResult r1 = pslq(v, 500, ctx);
    PslqResult r2 = pslq(v, 500, ctx);
    REQUIRE(r1.status == r2.status);
    REQUIRE(r1.iterations == r2.iterations);
    REQUIRE(r1.relation.has_value() == r2.relation.has_value());
    if (r1.relation) {
        REQUIRE(r1.relation->coefficients == r2.relation->coefficients);
    }
}
