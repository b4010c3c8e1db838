#include <catch2/catch_amalgamated.hpp>

#include "anharm/asymptotics.hpp"
#include "anharm/recognition.hpp"

using namespace anharm;

namespace {

BigReal pow10_neg(int e, const PrecisionContext& ctx) {
    BigReal t(ctx.bits());
    mpfr_set_si(t.raw(), 10, MPFR_RNDN);
    mpfr_pow_si(t.raw(), t.raw(), -e, MPFR_RNDN);
    return t;
}

bool same_relation(const std::vector<long long>& got, const std::vector<long long>& expected) {
    if (got.size() != expected.size()) return false;
    bool direct = true, flipped = true;
    for (size_t i = 0; i < got.size(); ++i) {
        direct = direct && (got[i] == expected[i]);
        flipped = flipped && (got[i] == -expected[i]);
    }
    return direct || flipped;
}

}  // namespace

TEST_CASE("basis layout per degree") {
    PrecisionContext ctx(40);
    BigReal c(ctx.bits());
    mpfr_set_d(c.raw(), -0.9, MPFR_RNDN);

    LogBasis b5 = build_basis(5, c, ctx);
    REQUIRE(b5.labels() == std::vector<std::string>{"ln|C_5|", "lnGamma(1/4)", "ln(pi)", "ln(2)",
                                                    "ln(3)", "1"});

    // Gamma(1) and Gamma(1/2) degenerate away for M = 2, 3
    LogBasis b2 = build_basis(2, c, ctx);
    REQUIRE(b2.labels() == std::vector<std::string>{"ln|C_2|", "ln(pi)", "ln(2)", "ln(3)", "1"});
    LogBasis b3 = build_basis(3, c, ctx);
    REQUIRE(b3.labels() == std::vector<std::string>{"ln|C_3|", "ln(pi)", "ln(2)", "ln(3)", "1"});

    LogBasis b11 = build_basis(11, c, ctx);
    REQUIRE(b11.labels() == std::vector<std::string>{"ln|C_11|", "lnGamma(1/10)", "lnGamma(3/10)",
                                                     "ln(pi)", "ln(2)", "ln(3)", "1"});

    LogBasis b4 = build_basis(4, c, ctx, /*include_unit=*/false);
    REQUIRE(b4.labels() == std::vector<std::string>{"ln|C_4|", "lnGamma(1/3)", "ln(pi)", "ln(2)",
                                                    "ln(3)"});

    for (const auto& e : b11.entries) {
        if (e.kind != BasisKind::unit) REQUIRE(!e.value.is_zero());
    }

    // basis sizes across the production range: 1 + phi(M-1)/2 + 3 (+ unit)
    std::vector<std::pair<int, size_t>> expected_sizes{
        {2, 5}, {3, 5}, {5, 6}, {6, 7}, {7, 6}, {8, 8}, {9, 7}, {10, 8}, {11, 7}};
    for (auto [M, size] : expected_sizes) {
        REQUIRE(build_basis(M, c, ctx).entries.size() == size);
    }
    REQUIRE(build_basis(4, c, ctx, false).entries.size() == 5);
}

TEST_CASE("search finds the decic relation [-4,-4,-5,12,2,0]") {
    PrecisionContext ctx(45);
    BigReal c5 = *exact_stokes_multiplier(5, ctx);
    SearchReport report = search_closed_form(5, c5, 40, {200});
    REQUIRE(report.found());
    REQUIRE(report.relation.has_value());
    REQUIRE(same_relation(*report.relation, {-4, -4, -5, 12, 2, 0}));
    REQUIRE(report.form.has_value());
    REQUIRE(report.form->c_exp == 4);
    REQUIRE(report.form->gamma_exps.at(GammaArg{1, 4}) == 4);
    REQUIRE(report.form->pi_exp == 5);
    REQUIRE(report.form->two_exp == 12);
    REQUIRE(report.form->three_exp == 2);
    REQUIRE(report.form->unit_exp == 0);
}

TEST_CASE("search finds the raw degree-seven relation [24,18,33,-74,-21,0]") {
    PrecisionContext ctx(45);
    BigReal c7 = *exact_stokes_multiplier(7, ctx);
    SearchReport report = search_closed_form(7, c7, 40, {200});
    REQUIRE(report.found());
    REQUIRE(same_relation(*report.relation, {24, 18, 33, -74, -21, 0}));
}

TEST_CASE("search finds the quartic relation") {
    PrecisionContext ctx(45);
    BigReal c2 = *exact_stokes_multiplier(2, ctx);
    SearchReport report = search_closed_form(2, c2, 40, {200});
    REQUIRE(report.found());
    REQUIRE(same_relation(*report.relation, {2, 3, -1, -1, 0}));
    ClosedForm f = *report.form;
    REQUIRE(f.c_exp == 2);
    REQUIRE(f.pi_exp == 3);
    REQUIRE(f.two_exp == 1);
    REQUIRE(f.three_exp == 1);
}

TEST_CASE("gamma reduction maps the raw degree-seven form to the reduced one") {
    ClosedForm raw;
    raw.c_exp = 24;
    raw.gamma_exps[GammaArg{1, 6}] = 18;
    raw.pi_exp = 33;
    raw.two_exp = 74;
    raw.three_exp = 21;

    ClosedForm red = reduce_gamma(raw);
    REQUIRE(red.c_exp == 6);
    REQUIRE(red.gamma_exps.size() == 1);
    REQUIRE(red.gamma_exps.at(GammaArg{1, 3}) == 9);
    REQUIRE(red.pi_exp == 6);
    REQUIRE(red.two_exp == 20);
    REQUIRE(red.three_exp == 3);

    // numerically identical at the exact multiplier
    PrecisionContext ctx(45);
    BigReal c7 = *exact_stokes_multiplier(7, ctx);
    REQUIRE(verify_identity(raw, c7, ctx) < pow10_neg(30, ctx));
    REQUIRE(verify_identity(red, c7, ctx) < pow10_neg(30, ctx));
}

TEST_CASE("reflection pair rewrites Gamma(1/3)Gamma(2/3)") {
    // Gamma(1/3)^2 Gamma(2/3)^2 pi^{-2} = 2^2 3^{-1}
    ClosedForm form;
    form.gamma_exps[GammaArg{1, 3}] = 2;
    form.gamma_exps[GammaArg{2, 3}] = 2;
    form.pi_exp = -2;
    form.two_exp = 2;
    form.three_exp = -1;

    PrecisionContext ctx(40);
    BigReal any_c(ctx.bits());
    mpfr_set_d(any_c.raw(), -0.5, MPFR_RNDN);
    REQUIRE(verify_identity(form, any_c, ctx) < pow10_neg(35, ctx));

    ClosedForm red = reduce_gamma(form);
    REQUIRE(red.gamma_exps.empty());
    REQUIRE(red.trivial());  // the identity collapses to 1 = 1
}

TEST_CASE("gamma reduction leaves non-matching forms unchanged") {
    ClosedForm form;
    form.c_exp = 3;
    form.gamma_exps[GammaArg{1, 5}] = 2;
    form.pi_exp = 1;
    form.two_exp = 4;
    ClosedForm out = reduce_gamma(form);
    REQUIRE(out.c_exp == form.c_exp);
    REQUIRE(out.gamma_exps == form.gamma_exps);
    REQUIRE(out.pi_exp == form.pi_exp);
    REQUIRE(out.two_exp == form.two_exp);

    ClosedForm no_gamma;
    no_gamma.c_exp = 2;
    no_gamma.pi_exp = 3;
    no_gamma.two_exp = 1;
    no_gamma.three_exp = 1;
    ClosedForm out2 = reduce_gamma(no_gamma);
    REQUIRE(out2.c_exp == 2);
    REQUIRE(out2.pi_exp == 3);
}

TEST_CASE("identity verification residuals") {
    PrecisionContext ctx(40);
    // |C_2|^2 pi^3 = 6
    {
        ClosedForm f;
        f.c_exp = 2;
        f.pi_exp = 3;
        f.two_exp = 1;
        f.three_exp = 1;
        REQUIRE(verify_identity(f, *exact_stokes_multiplier(2, ctx), ctx) < pow10_neg(37, ctx));
    }
    // |C_3|^2 pi^4 = 32
    {
        ClosedForm f;
        f.c_exp = 2;
        f.pi_exp = 4;
        f.two_exp = 5;
        REQUIRE(verify_identity(f, *exact_stokes_multiplier(3, ctx), ctx) < pow10_neg(37, ctx));
    }
    // |C_5|^4 Gamma(1/4)^4 pi^5 = 36864
    {
        ClosedForm f;
        f.c_exp = 4;
        f.gamma_exps[GammaArg{1, 4}] = 4;
        f.pi_exp = 5;
        f.two_exp = 12;
        f.three_exp = 2;
        REQUIRE(verify_identity(f, *exact_stokes_multiplier(5, ctx), ctx) < pow10_neg(37, ctx));
        // and a wrong right-hand side is caught
        f.three_exp = 3;
        REQUIRE(verify_identity(f, *exact_stokes_multiplier(5, ctx), ctx) > pow10_neg(2, ctx));
    }
}

TEST_CASE("detection limit") {
    PrecisionContext ctx(30);
    REQUIRE(abs(detection_limit(30, 5) - BigReal(1000000, ctx)) < pow10_neg(20, ctx));
    REQUIRE(abs(detection_limit(10, 10) - BigReal(10, ctx)) < pow10_neg(25, ctx));
    BigReal d = detection_limit(20, 7);  // 10^{20/7} ~ 719.69
    REQUIRE(d > BigReal(719, ctx));
    REQUIRE(d < BigReal(720, ctx));
    REQUIRE_THROWS_AS(detection_limit(30, 1), std::invalid_argument);
}

TEST_CASE("the octic value is excluded, not explained") {
    // 30 digits of the extracted multiplier
    PrecisionContext ctx(40);
    BigReal c4("-0.740051498259358506401511491622", ctx);
    SearchReport report = search_closed_form(4, c4, 30, {100}, /*include_unit=*/false, {15});
    REQUIRE(report.excluded());
    REQUIRE(report.cells.size() == 1);
    REQUIRE(report.cells[0].status == PslqStatus::no_relation_in_bound);
    REQUIRE(report.basis_labels ==
            std::vector<std::string>{"ln|C_4|", "lnGamma(1/3)", "ln(pi)", "ln(2)", "ln(3)"});
}

TEST_CASE("exclusion is never reported from inconclusive cells") {
    PrecisionContext ctx(40);
    BigReal c4("-0.740051498259358506401511491622", ctx);
    // a bound far past the 15-digit detection limit cannot be certified
    SearchReport report = search_closed_form(4, c4, 30, {100000000L}, false, {15});
    REQUIRE(!report.excluded());
    REQUIRE(!report.found());
    REQUIRE(report.outcome == "inconclusive");
}

TEST_CASE("searches are deterministic and serialize stably") {
    PrecisionContext ctx(45);
    BigReal c5 = *exact_stokes_multiplier(5, ctx);
    SearchReport r1 = search_closed_form(5, c5, 40, {200});
    SearchReport r2 = search_closed_form(5, c5, 40, {200});
    REQUIRE(r1.serialize() == r2.serialize());
    REQUIRE(r1.serialize().find("search-report v1") == 0);
    REQUIRE(r1.serialize().find("outcome: found") != std::string::npos);
}

TEST_CASE("search input validation") {
    PrecisionContext ctx(40);
    BigReal c(ctx.bits());
    mpfr_set_d(c.raw(), -0.5, MPFR_RNDN);
    REQUIRE_THROWS_AS(search_closed_form(2, c, 12, {100}), std::invalid_argument);
    REQUIRE_THROWS_AS(search_closed_form(2, c, 30, {}), std::invalid_argument);
}

TEST_CASE("a unit-entry exponent multiplies the right-hand side by e^u") {
    PrecisionContext ctx(40);
    BigReal any_c(ctx.bits());
    mpfr_set_d(any_c.raw(), -0.5, MPFR_RNDN);
    ClosedForm f;
    f.unit_exp = 1;  // claims 1 = e
    BigReal resid = verify_identity(f, any_c, ctx);
    BigReal expected = BigReal(1, ctx) - BigReal(1, ctx) / exp(BigReal(1, ctx));
    REQUIRE(abs(resid - expected) < pow10_neg(35, ctx));
}

TEST_CASE("closed form rendering") {
    ClosedForm f;
    f.c_exp = 4;
    f.gamma_exps[GammaArg{1, 4}] = 4;
    f.pi_exp = 5;
    f.two_exp = 12;
    f.three_exp = 2;
    REQUIRE(f.to_string() == "|C|^4 * Gamma(1/4)^4 * pi^5 = 2^12 * 3^2");

    ClosedForm bare;
    bare.c_exp = 2;
    bare.pi_exp = 3;
    bare.two_exp = 1;
    bare.three_exp = 1;
    REQUIRE(bare.to_string() == "|C|^2 * pi^3 = 2 * 3");
}
