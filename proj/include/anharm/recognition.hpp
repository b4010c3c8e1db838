#pragma once

// Closed-form recognition for Stokes multipliers: logarithmic basis
// construction, PSLQ-driven search with a (maxcoeff x precision) schedule,
// monomial identities of the shape
//
//   |C|^p * prod_j Gamma(a_j/n)^{q_j} * pi^r = 2^s * 3^t,
//
// numerical verification, and Gamma-identity reduction (duplication at 1/6,
// reflection pairs at denominators 2, 3, 4, 6).

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "anharm/functions.hpp"
#include "anharm/precision.hpp"
#include "anharm/pslq.hpp"

namespace anharm {

struct GammaArg {
    long num;
    long den;
    friend auto operator<=>(const GammaArg&, const GammaArg&) = default;
};

enum class BasisKind { log_c, log_gamma, log_pi, log_two, log_three, unit };

struct BasisEntry {
    BasisKind kind;
    std::string label;
    BigReal value;
    GammaArg arg{0, 1};  // meaningful for log_gamma entries only
};

struct LogBasis {
    int M = 0;
    std::vector<BasisEntry> entries;

    std::vector<BigReal> values() const {
        std::vector<BigReal> v;
        v.reserve(entries.size());
        for (const auto& e : entries) v.push_back(e.value);
        return v;
    }

    std::vector<std::string> labels() const {
        std::vector<std::string> l;
        l.reserve(entries.size());
        for (const auto& e : entries) l.push_back(e.label);
        return l;
    }
};

/// Basis (ln|C|, lnGamma(a/(M-1)) for the first phi(M-1)/2 coprime residues,
/// ln pi, ln 2, ln 3, 1). Degenerate Gamma entries are pruned: for M-1 = 1
/// Gamma(1) = 1 drops out, for M-1 = 2 Gamma(1/2) = sqrt(pi) is absorbed by
/// the pi entry.
inline LogBasis build_basis(int M, const BigReal& C_value, const PrecisionContext& ctx,
                            bool include_unit = true) {
    if (M < 2) throw std::invalid_argument("build_basis: M must be >= 2");
    if (C_value.is_zero()) throw std::invalid_argument("build_basis: C must be nonzero");
    LogBasis basis;
    basis.M = M;

    BigReal lc = log(abs(C_value));
    if (lc.is_zero()) throw std::invalid_argument("build_basis: ln|C| degenerates to zero");
    basis.entries.push_back({BasisKind::log_c, "ln|C_" + std::to_string(M) + "|", lc});

    long n = M - 1;
    if (n >= 3) {
        long count = gamma_independent_count(n);
        auto residues = coprime_residues(n);
        for (long idx = 0; idx < count && idx < static_cast<long>(residues.size()); ++idx) {
            long a = residues[static_cast<size_t>(idx)];
            BigReal arg = BigReal(a, ctx) / n;
            basis.entries.push_back({BasisKind::log_gamma,
                                     "lnGamma(" + std::to_string(a) + "/" + std::to_string(n) + ")",
                                     log_gamma(arg, ctx),
                                     GammaArg{a, n}});
        }
    }
    basis.entries.push_back({BasisKind::log_pi, "ln(pi)", log(pi(ctx))});
    basis.entries.push_back({BasisKind::log_two, "ln(2)", ln2(ctx)});
    basis.entries.push_back({BasisKind::log_three, "ln(3)", ln(3, ctx)});
    if (include_unit) {
        basis.entries.push_back({BasisKind::unit, "1", BigReal(1, ctx)});
    }
    return basis;
}

/// Monomial identity |C|^p * prod Gamma^q * pi^r = 2^s * 3^t * e^u.
/// u is zero for every genuine closed form; it absorbs the unit basis entry.
struct ClosedForm {
    long long c_exp = 0;
    std::map<GammaArg, long long> gamma_exps;
    long long pi_exp = 0;
    long long two_exp = 0;
    long long three_exp = 0;
    long long unit_exp = 0;

    bool trivial() const {
        if (c_exp != 0 || pi_exp != 0 || two_exp != 0 || three_exp != 0 || unit_exp != 0) return false;
        for (const auto& [arg, q] : gamma_exps) {
            if (q != 0) return false;
        }
        return true;
    }

    std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        auto emit = [&](const std::string& sym, long long e) {
            if (e == 0) return;
            if (!first) os << " * ";
            os << sym;
            if (e != 1) os << "^" << e;
            first = false;
        };
        emit("|C|", c_exp);
        for (const auto& [arg, q] : gamma_exps) {
            emit("Gamma(" + std::to_string(arg.num) + "/" + std::to_string(arg.den) + ")", q);
        }
        emit("pi", pi_exp);
        if (first) os << "1";
        os << " = ";
        std::ostringstream rhs;
        bool rfirst = true;
        auto remit = [&](const std::string& sym, long long e) {
            if (e == 0) return;
            if (!rfirst) rhs << " * ";
            rhs << sym;
            if (e != 1) rhs << "^" << e;
            rfirst = false;
        };
        remit("2", two_exp);
        remit("3", three_exp);
        remit("e", unit_exp);
        os << (rfirst ? "1" : rhs.str());
        return os.str();
    }
};

/// Translates a PSLQ relation over `basis` into a ClosedForm, normalized so
/// the |C| exponent is positive.
inline ClosedForm closed_form_from_relation(const LogBasis& basis,
                                            const std::vector<mpz_class>& coeffs) {
    if (coeffs.size() != basis.entries.size()) {
        throw std::invalid_argument("closed_form_from_relation: size mismatch");
    }
    ClosedForm form;
    for (size_t i = 0; i < coeffs.size(); ++i) {
        long long c = coeffs[i].get_si();
        const BasisEntry& e = basis.entries[i];
        switch (e.kind) {
            case BasisKind::log_c: form.c_exp = c; break;
            case BasisKind::log_gamma: form.gamma_exps[e.arg] += c; break;
            case BasisKind::log_pi: form.pi_exp = c; break;
            case BasisKind::log_two: form.two_exp = -c; break;
            case BasisKind::log_three: form.three_exp = -c; break;
            case BasisKind::unit: form.unit_exp = -c; break;
        }
    }
    if (form.c_exp < 0) {
        form.c_exp = -form.c_exp;
        for (auto& [arg, q] : form.gamma_exps) q = -q;
        form.pi_exp = -form.pi_exp;
        form.two_exp = -form.two_exp;
        form.three_exp = -form.three_exp;
        form.unit_exp = -form.unit_exp;
    }
    return form;
}

/// |lhs/rhs - 1| of the identity evaluated at ctx precision.
inline BigReal verify_identity(const ClosedForm& form, const BigReal& C_value,
                               const PrecisionContext& ctx) {
    PrecisionContext wide(ctx.dps(), ctx.guard() + 20);
    mpfr_prec_t bits = wide.bits();
    BigReal lhs = pow_si(abs(round_to(C_value, bits)), form.c_exp);
    for (const auto& [arg, q] : form.gamma_exps) {
        if (q == 0) continue;
        BigReal g = gamma(BigReal(arg.num, wide) / arg.den, wide);
        lhs = lhs * pow_si(g, q);
    }
    lhs = lhs * pow_si(pi(wide), form.pi_exp);
    BigReal rhs = pow_si(BigReal(2, wide), form.two_exp) * pow_si(BigReal(3, wide), form.three_exp);
    if (form.unit_exp != 0) rhs = rhs * exp(BigReal(form.unit_exp, wide));
    BigReal resid = abs(lhs / rhs - BigReal(1, wide));
    return round_to(resid, ctx.bits());
}

namespace detail {

inline long long form_gcd(const ClosedForm& f) {
    long long g = 0;
    auto acc = [&](long long v) { g = std::gcd(g, v); };
    acc(f.c_exp);
    for (const auto& [arg, q] : f.gamma_exps) acc(q);
    acc(f.pi_exp);
    acc(f.two_exp);
    acc(f.three_exp);
    acc(f.unit_exp);
    return g == 0 ? 1 : g;
}

inline void form_scale(ClosedForm& f, long long m) {
    f.c_exp *= m;
    for (auto& [arg, q] : f.gamma_exps) q *= m;
    f.pi_exp *= m;
    f.two_exp *= m;
    f.three_exp *= m;
    f.unit_exp *= m;
}

inline void form_divide(ClosedForm& f, long long g) {
    f.c_exp /= g;
    for (auto& [arg, q] : f.gamma_exps) q /= g;
    f.pi_exp /= g;
    f.two_exp /= g;
    f.three_exp /= g;
    f.unit_exp /= g;
}

}  // namespace detail

/// Rewrites Gamma factors using the reflection pairs
/// Gamma(a/n) Gamma((n-a)/n) = pi / sin(pi a/n) at denominators 2, 3, 4, 6
/// (where sin(pi a/n) is a power product of 2 and 3) and the duplication
/// identity Gamma(1/6) = Gamma(1/3)^2 sqrt(3) / (2^{1/3} sqrt(pi)).
/// Exponents are rescaled as needed and re-primitivized; the numerical value
/// of the identity is unchanged. Returns the input when no rule applies.
inline ClosedForm reduce_gamma(const ClosedForm& input) {
    bool applicable = false;
    for (const auto& [arg, q] : input.gamma_exps) {
        if (q == 0) continue;
        if (arg.den == 2 && arg.num == 1) applicable = true;
        if (arg.den == 6 && arg.num == 1) applicable = true;
        GammaArg partner{arg.den - arg.num, arg.den};
        if ((arg.den == 3 || arg.den == 4 || arg.den == 6) && arg.num < partner.num) {
            auto it = input.gamma_exps.find(partner);
            if (it != input.gamma_exps.end() && it->second != 0 &&
                (it->second > 0) == (q > 0)) {
                applicable = true;
            }
        }
    }
    if (!applicable) return input;

    // scale by 6 so every fractional exponent below lands on an integer
    ClosedForm f = input;
    detail::form_scale(f, 6);

    // reflection pairs (same-sign exponents only; transferring against the
    // sign would grow the remaining exponent)
    for (auto& [arg, q] : f.gamma_exps) {
        if (q == 0) continue;
        if (arg.den == 2 && arg.num == 1) {
            // Gamma(1/2)^q = pi^{q/2}
            f.pi_exp += q / 2;
            q = 0;
            continue;
        }
        GammaArg partner{arg.den - arg.num, arg.den};
        if (arg.num >= partner.num) continue;
        auto it = f.gamma_exps.find(partner);
        if (it == f.gamma_exps.end() || it->second == 0) continue;
        if ((it->second > 0) != (q > 0)) continue;
        long long m = (q > 0) ? std::min(q, it->second) : std::max(q, it->second);
        // Gamma(a/n)^m Gamma((n-a)/n)^m = pi^m / sin(pi a/n)^m
        if (arg.den == 3 && arg.num == 1) {
            // sin(pi/3) = sqrt(3)/2: factor 2^m 3^{-m/2} moves to the rhs
            f.pi_exp += m;
            f.two_exp -= m;
            f.three_exp += m / 2;
        } else if (arg.den == 4 && arg.num == 1) {
            // sin(pi/4) = 1/sqrt(2)
            f.pi_exp += m;
            f.two_exp -= m / 2;
        } else if (arg.den == 6 && arg.num == 1) {
            // sin(pi/6) = 1/2
            f.pi_exp += m;
            f.two_exp -= m;
        } else {
            continue;
        }
        q -= m;
        it->second -= m;
    }

    // duplication at 1/6: Gamma(1/6)^e = Gamma(1/3)^{2e} 3^{e/2} 2^{-e/3} pi^{-e/2}
    {
        auto it = f.gamma_exps.find(GammaArg{1, 6});
        if (it != f.gamma_exps.end() && it->second != 0) {
            long long e = it->second;
            f.gamma_exps[GammaArg{1, 3}] += 2 * e;
            f.pi_exp -= e / 2;
            f.three_exp -= e / 2;
            f.two_exp += e / 3;
            it->second = 0;
        }
    }

    for (auto it = f.gamma_exps.begin(); it != f.gamma_exps.end();) {
        if (it->second == 0) {
            it = f.gamma_exps.erase(it);
        } else {
            ++it;
        }
    }
    long long g = detail::form_gcd(f);
    if (g > 1) detail::form_divide(f, g);
    return f;
}

/// PSLQ detection limit 10^{dps/basis_size}: the largest coefficient
/// magnitude certifiable at dps digits over a basis of that size.
inline BigReal detection_limit(int dps, int basis_size) {
    if (basis_size < 2) throw std::invalid_argument("detection_limit: basis_size must be >= 2");
    PrecisionContext ctx(30);
    BigReal e = BigReal(dps, ctx) / basis_size;
    BigReal r(ctx.bits());
    mpfr_ui_pow(r.raw(), 10, e.raw(), MPFR_RNDN);
    return r;
}

struct SearchCell {
    long maxcoeff = 0;
    int dps = 0;
    PslqStatus status = PslqStatus::inconclusive;
    std::vector<long long> relation;  // populated when status == found
    std::string norm_bound;           // certified bound at exit
    long iterations = 0;
};

/// Full record of one closed-form search: every (maxcoeff, dps) cell tried,
/// with a stable text serialization for golden-file comparison.
struct SearchReport {
    int M = 0;
    std::vector<std::string> basis_labels;
    std::string value_used;  // the truncated |C| the search actually saw
    int reliable_digits = 0;
    std::vector<SearchCell> cells;
    std::string outcome;  // "found" | "excluded" | "inconclusive"
    std::optional<ClosedForm> form;
    std::optional<std::vector<long long>> relation;
    std::string residual;         // verification residual for a found form
    std::string detection_limit;  // 10^{D/N} at the strongest dps level tried

    bool found() const { return outcome == "found"; }
    bool excluded() const { return outcome == "excluded"; }

    std::string serialize() const {
        std::ostringstream os;
        os << "search-report v1\n";
        os << "M: " << M << "\n";
        os << "value: " << value_used << "\n";
        os << "reliable-digits: " << reliable_digits << "\n";
        os << "basis:";
        for (const auto& l : basis_labels) os << " " << l;
        os << "\n";
        for (const auto& c : cells) {
            os << "cell: maxcoeff=" << c.maxcoeff << " dps=" << c.dps << " status=";
            switch (c.status) {
                case PslqStatus::found: os << "found"; break;
                case PslqStatus::no_relation_in_bound: os << "no-relation"; break;
                case PslqStatus::inconclusive: os << "inconclusive"; break;
            }
            if (!c.relation.empty()) {
                os << " relation=[";
                for (size_t i = 0; i < c.relation.size(); ++i) {
                    if (i) os << ",";
                    os << c.relation[i];
                }
                os << "]";
            }
            if (!c.norm_bound.empty()) os << " bound=" << c.norm_bound;
            os << "\n";
        }
        os << "detection-limit: " << detection_limit << "\n";
        os << "outcome: " << outcome << "\n";
        if (relation) {
            os << "relation: [";
            for (size_t i = 0; i < relation->size(); ++i) {
                if (i) os << ",";
                os << (*relation)[i];
            }
            os << "]\n";
        }
        if (form) os << "closed-form: " << form->to_string() << "\n";
        if (!residual.empty()) os << "residual: " << residual << "\n";
        return os.str();
    }
};

/// Runs the search schedule. For each maxcoeff level (ascending) and each
/// precision level, the basis is rebuilt from C truncated to that precision
/// and PSLQ is run. A hit must re-verify against a basis recomputed with ten
/// extra digits before it is accepted. "excluded" is reported only when
/// every cell certified its bound; any inconclusive cell downgrades the
/// outcome to "inconclusive".
inline SearchReport search_closed_form(int M, const BigReal& C_value, int reliable_digits,
                                       const std::vector<long>& maxcoeff_schedule,
                                       bool include_unit = true,
                                       std::vector<int> dps_levels = {}) {
    if (reliable_digits < 15) {
        throw std::invalid_argument("search_closed_form: need at least 15 reliable digits");
    }
    if (maxcoeff_schedule.empty()) {
        throw std::invalid_argument("search_closed_form: empty schedule");
    }
    if (dps_levels.empty()) {
        for (int level : {30, 35, 40}) {
            if (level <= reliable_digits) dps_levels.push_back(level);
        }
        if (dps_levels.empty()) dps_levels.push_back(reliable_digits);
    }

    SearchReport report;
    report.M = M;
    report.reliable_digits = reliable_digits;
    report.value_used =
        truncate_digits(C_value, reliable_digits, PrecisionContext::bits_for_digits(reliable_digits + 4))
            .to_string(reliable_digits);

    int top_dps = *std::max_element(dps_levels.begin(), dps_levels.end());
    bool all_certified = true;

    for (long maxcoeff : maxcoeff_schedule) {
        for (int dps : dps_levels) {
            PrecisionContext cell_ctx(dps, 30);
            BigReal c_cell = truncate_digits(C_value, std::min(dps, reliable_digits), cell_ctx.bits());
            LogBasis basis = build_basis(M, c_cell, cell_ctx, include_unit);
            if (report.basis_labels.empty()) report.basis_labels = basis.labels();

            PslqResult r = pslq(basis.values(), maxcoeff, cell_ctx);
            SearchCell cell;
            cell.maxcoeff = maxcoeff;
            cell.dps = dps;
            cell.status = r.status;
            cell.iterations = r.iterations;
            cell.norm_bound = r.norm_bound.to_string(3);

            if (r.status == PslqStatus::found) {
                // re-verify against an independently recomputed basis
                int dps2 = dps + 10;
                PrecisionContext ver_ctx(dps2, 30);
                BigReal c_ver = truncate_digits(C_value, std::min(dps2, reliable_digits), ver_ctx.bits());
                LogBasis ver_basis = build_basis(M, c_ver, ver_ctx, include_unit);
                BigReal resid = detail::pslq_residual(ver_basis.values(), r.relation->coefficients,
                                                      ver_ctx.bits());
                BigReal max_v(ver_ctx.bits());
                mpfr_set_zero(max_v.raw(), 1);
                for (const auto& v : ver_basis.values()) {
                    BigReal a = abs(v);
                    if (a > max_v) max_v = a;
                }
                int effective = std::min(dps2, reliable_digits);
                BigReal thresh(ver_ctx.bits()), ten(ver_ctx.bits());
                mpfr_set_si(ten.raw(), 10, MPFR_RNDN);
                mpfr_pow_si(thresh.raw(), ten.raw(), -(effective - 10), MPFR_RNDN);
                thresh = thresh * max_v;

                for (const auto& c : r.relation->coefficients) {
                    cell.relation.push_back(c.get_si());
                }
                if (resid < thresh) {
                    report.cells.push_back(cell);
                    report.outcome = "found";
                    report.relation = cell.relation;
                    report.form = closed_form_from_relation(basis, r.relation->coefficients);
                    report.residual = resid.to_string(3);
                    report.detection_limit =
                        detection_limit(dps, static_cast<int>(basis.entries.size())).to_string(3);
                    return report;
                }
                cell.status = PslqStatus::inconclusive;  // failed re-verification
                cell.relation.clear();
            }
            if (cell.status != PslqStatus::no_relation_in_bound) all_certified = false;
            report.cells.push_back(cell);
        }
    }
    report.outcome = all_certified ? "excluded" : "inconclusive";
    {
        PrecisionContext cell_ctx(top_dps, 30);
        BigReal c_cell = truncate_digits(C_value, std::min(top_dps, reliable_digits), cell_ctx.bits());
        LogBasis basis = build_basis(M, c_cell, cell_ctx, include_unit);
        report.detection_limit =
            detection_limit(top_dps, static_cast<int>(basis.entries.size())).to_string(3);
    }
    return report;
}

}  // namespace anharm
