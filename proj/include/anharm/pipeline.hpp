#pragma once

// Batch orchestration of the full compute -> extract -> recognize pipeline
// across a range of M, with per-M parameter defaults, a flat key-value config
// format, coefficient caching, optional parallel per-M scheduling, and
// deterministic report emission (no timestamps; all numbers as decimal
// strings so replayed runs are byte-identical).

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "anharm/asymptotics.hpp"
#include "anharm/cache.hpp"
#include "anharm/functions.hpp"
#include "anharm/oracle.hpp"
#include "anharm/recognition.hpp"
#include "anharm/series.hpp"

namespace anharm {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PerMParams {
    int M = 2;
    int max_order = 250;
    int dps = 160;
    int guard = 30;
    int rich_order = 50;
    long maxcoeff = 200;
    bool include_unit = true;
};

/// Production defaults per oscillator degree (orders, working precision,
/// Richardson order, PSLQ coefficient bound, unit entry usage).
inline PerMParams default_params(int M) {
    PerMParams p;
    p.M = M;
    switch (M) {
        case 2: p = {M, 500, 200, 30, 40, 200, true}; break;
        case 3: p = {M, 500, 200, 30, 60, 200, true}; break;
        case 4: p = {M, 1200, 300, 30, 100, 2000, false}; break;
        case 5: p = {M, 600, 200, 30, 80, 200, true}; break;
        case 6: p = {M, 500, 200, 30, 80, 200, true}; break;
        case 7: p = {M, 400, 180, 30, 80, 200, true}; break;
        case 8: p = {M, 300, 180, 30, 60, 200, true}; break;
        case 9: p = {M, 300, 180, 30, 60, 200, true}; break;
        case 10: p = {M, 250, 160, 30, 50, 300, true}; break;
        case 11: p = {M, 250, 160, 30, 50, 200, true}; break;
        default: p = {M, 250, 160, 30, 50, 200, true}; break;
    }
    return p;
}

struct OverrideSet {
    std::optional<int> max_order;
    std::optional<int> dps;
    std::optional<int> guard;
    std::optional<int> rich_order;
    std::optional<long> maxcoeff;
};

struct RunConfig {
    std::vector<int> M_values;
    OverrideSet global;
    std::map<int, OverrideSet> per_m;
    std::filesystem::path out_dir = "anharm-out";
    int parallelism = 1;
    bool desk_scale = false;
    int flush_interval = 10;

    /// Defaults, desk scaling (orders/4, dps/2 with floors 50/60), then
    /// explicit overrides; the Richardson order is clamped to the usable
    /// window range.
    PerMParams resolve(int M) const {
        PerMParams p = default_params(M);
        if (desk_scale) {
            p.max_order = std::max(50, p.max_order / 4);
            p.dps = std::max(60, p.dps / 2);
        }
        auto apply = [&p](const OverrideSet& o) {
            if (o.max_order) p.max_order = *o.max_order;
            if (o.dps) p.dps = *o.dps;
            if (o.guard) p.guard = *o.guard;
            if (o.rich_order) p.rich_order = *o.rich_order;
            if (o.maxcoeff) p.maxcoeff = *o.maxcoeff;
        };
        apply(global);
        auto it = per_m.find(M);
        if (it != per_m.end()) apply(it->second);
        p.rich_order = std::min(p.rich_order, std::max(4, p.max_order / 3));
        return p;
    }

    void validate() const {
        for (int M : M_values) {
            if (M < 2) throw ConfigError("config: M must be >= 2 (got " + std::to_string(M) + ")");
            PerMParams p = resolve(M);
            if (p.dps < 15) throw ConfigError("config: dps must be >= 15 for M=" + std::to_string(M));
            if (p.max_order < 10) {
                throw ConfigError("config: max_order must be >= 10 for M=" + std::to_string(M));
            }
            if (p.guard < 0) throw ConfigError("config: guard must be >= 0");
        }
        if (parallelism < 1) throw ConfigError("config: parallelism must be >= 1");
        if (flush_interval < 1) throw ConfigError("config: flush interval must be >= 1");
    }
};

/// "2-5" or "2,3,7" or combinations "2-4,7".
inline std::vector<int> parse_m_range(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        auto dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoi(part));
            } else {
                int lo = std::stoi(part.substr(0, dash));
                int hi = std::stoi(part.substr(dash + 1));
                if (hi < lo) throw ConfigError("config: bad M range '" + part + "'");
                for (int m = lo; m <= hi; ++m) out.push_back(m);
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError("config: unparseable M range element '" + part + "'");
        } catch (const std::out_of_range&) {
            throw ConfigError("config: M range element out of range '" + part + "'");
        }
    }
    return out;
}

/// Flat key-value config with [M=<n>] override sections:
///
///   M-range = 2-11
///   orders = 500
///   [M=4]
///   orders = 1200
inline void parse_config_file(const std::filesystem::path& file, RunConfig& cfg) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config: cannot open " + file.string());
    OverrideSet* target = &cfg.global;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            size_t e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        std::string where = file.string() + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']' || line.substr(1, 2) != "M=") {
                throw ConfigError("config: bad section header at " + where);
            }
            int M = 0;
            try {
                M = std::stoi(line.substr(3, line.size() - 4));
            } catch (...) {
                throw ConfigError("config: bad section header at " + where);
            }
            target = &cfg.per_m[M];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config: expected key = value at " + where);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "orders") target->max_order = std::stoi(val);
            else if (key == "dps") target->dps = std::stoi(val);
            else if (key == "guard") target->guard = std::stoi(val);
            else if (key == "richardson-order") target->rich_order = std::stoi(val);
            else if (key == "maxcoeff") target->maxcoeff = std::stol(val);
            else if (key == "M-range" || key == "M") cfg.M_values = parse_m_range(val);
            else if (key == "parallelism") cfg.parallelism = std::stoi(val);
            else if (key == "out-dir") cfg.out_dir = val;
            else if (key == "desk-scale") cfg.desk_scale = (val == "true" || val == "1" || val == "yes");
            else if (key == "flush-interval") cfg.flush_interval = std::stoi(val);
            else throw ConfigError("config: unknown key '" + key + "' at " + where);
        } catch (const ConfigError&) {
            throw;
        } catch (...) {
            throw ConfigError("config: bad value for '" + key + "' at " + where);
        }
    }
}

inline std::filesystem::path cache_path(const std::filesystem::path& out_dir, const PerMParams& p) {
    return out_dir / ("coeffs_M" + std::to_string(p.M) + "_dps" + std::to_string(p.dps) + "_g" +
                      std::to_string(p.guard) + "_" + kCacheSchema + ".txt");
}

struct PerMResult {
    PerMParams params;
    bool ok = false;
    std::string error;

    std::optional<LargeOrderParams> large_order;  // numeric extraction results

    bool a1_exact = false;
    std::string A_exact;
    std::string A_extracted;
    int A_match_digits = 0;
    std::string b_extracted;
    int b_reliable = 0;
    std::string C_signed;
    std::string C_abs;
    int C_reliable = 0;
    std::vector<std::tuple<int, int, std::string>> C_windows;
    std::optional<std::string> c1;
    long phi_half = 0;
    std::optional<SearchReport> search;
    std::string closed_form;        // reduced, when found
    std::string identity_residual;  // verify_identity at the reported digits
};

struct PipelineReport {
    RunConfig config;
    std::vector<PerMResult> results;

    int failures() const {
        int n = 0;
        for (const auto& r : results) n += r.ok ? 0 : 1;
        return n;
    }
};

namespace detail {

inline std::vector<long> maxcoeff_schedule(long maxcoeff) {
    std::vector<long> sched;
    for (long v : {200L, 500L, 1000L, 2000L}) {
        if (v <= maxcoeff) sched.push_back(v);
    }
    if (sched.empty() || sched.back() != maxcoeff) sched.push_back(maxcoeff);
    return sched;
}

inline PerMResult run_single_m(const PerMParams& p, const std::filesystem::path& out_dir,
                               int flush_interval) {
    PerMResult res;
    res.params = p;
    try {
        PrecisionContext ctx(p.dps, p.guard);
        OscillatorSpec spec(p.M);

        ComputeOptions opt;
        opt.cache_file = cache_path(out_dir, p);
        opt.flush_interval = flush_interval;
        SeriesCoefficients series = compute_series(spec, p.max_order, ctx, opt);

        // first-order sanity: a_1 = (2M-1)!!/2^M
        {
            BigRational expected(double_factorial(2L * p.M - 1), mpz_class(1) << p.M);
            BigReal rel = abs(series.a(1) / to_real(expected, ctx) - BigReal(1, ctx));
            BigReal tol(ctx.bits());
            mpfr_set_si(tol.raw(), 10, MPFR_RNDN);
            mpfr_pow_si(tol.raw(), tol.raw(), -(p.dps + 10), MPFR_RNDN);
            res.a1_exact = rel < tol;
        }

        BigReal A_exact = instanton_action_exact(p.M, ctx);
        res.A_exact = A_exact.to_string(std::min(p.dps, 30));

        NumericSequence a_seq = action_sequence(series);
        auto a_windows = default_windows(p.max_order, p.rich_order, a_seq.first_k);
        ExtrapolationResult a_res = assess_stability(a_seq, a_windows, ctx);
        res.A_extracted = a_res.limit.to_string(std::min(p.dps, 30));
        res.A_match_digits = detail::common_decimal_prefix({A_exact, a_res.limit}, ctx.dps());

        NumericSequence b_seq = shift_sequence(series, A_exact);
        ExtrapolationResult b_res = assess_stability(b_seq, a_windows, ctx);
        res.b_extracted = b_res.limit.to_string(std::min(p.dps, 20));
        res.b_reliable = b_res.reliable_digits;

        NumericSequence c_seq = stokes_sequence(series, A_exact, ctx);
        auto c_windows = default_windows(p.max_order, p.rich_order, c_seq.first_k);
        ExtrapolationResult c_res = assess_stability(c_seq, c_windows, ctx);
        res.C_reliable = c_res.reliable_digits;
        int show = std::max(1, std::min(res.C_reliable, 30));
        res.C_signed = c_res.limit.to_string(show);
        res.C_abs = abs(c_res.limit).to_string(show);
        for (const auto& [k0, N, est] : c_res.windows) {
            res.C_windows.emplace_back(k0, N, est.to_string(std::min(p.dps, 30)));
        }

        LargeOrderParams lo;
        lo.M = p.M;
        lo.A = A_exact;
        lo.b = b_res.limit;
        lo.C = c_res.limit;
        if (p.M == 2) {
            BigReal c2 = *exact_stokes_multiplier(2, ctx);
            NumericSequence c1_seq_v = c1_sequence(c_seq, c2);
            ExtrapolationResult c1_res = assess_stability(c1_seq_v, c_windows, ctx);
            res.c1 = c1_res.limit.to_string(std::min(p.dps, 20));
            lo.c1 = c1_res.limit;
        }
        if (lo.A.sign() <= 0 || lo.C.sign() >= 0) {
            res.ok = false;
            res.error = "extracted parameters violate sign invariants (A > 0, C < 0)";
            return res;
        }
        res.large_order = std::move(lo);

        res.phi_half = gamma_independent_count(p.M - 1);

        if (res.C_reliable >= 15) {
            res.search = search_closed_form(p.M, c_res.limit, res.C_reliable,
                                            maxcoeff_schedule(p.maxcoeff), p.include_unit);
            if (res.search->found() && res.search->form) {
                ClosedForm reduced = reduce_gamma(*res.search->form);
                res.closed_form = reduced.to_string();
                PrecisionContext vctx(std::min(res.C_reliable, 40), p.guard);
                BigReal resid = verify_identity(reduced, c_res.limit, vctx);
                res.identity_residual = resid.to_string(3);
                BigReal bound(vctx.bits());
                mpfr_set_si(bound.raw(), 10, MPFR_RNDN);
                mpfr_pow_si(bound.raw(), bound.raw(), -(std::min(res.C_reliable, 40) - 10), MPFR_RNDN);
                if (!(resid < bound)) {
                    res.ok = false;
                    res.error = "closed form failed identity verification at reported precision";
                    return res;
                }
            }
        }
        res.ok = true;
    } catch (const std::exception& e) {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

}  // namespace detail

/// Runs the per-M pipelines (parallel up to config.parallelism; failures are
/// isolated per M) and assembles results in M order.
inline PipelineReport run_pipeline(const RunConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.out_dir);

    PipelineReport report;
    report.config = config;
    report.results.resize(config.M_values.size());

    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t idx = next.fetch_add(1);
            if (idx >= config.M_values.size()) break;
            PerMParams p = config.resolve(config.M_values[idx]);
            report.results[idx] = detail::run_single_m(p, config.out_dir, config.flush_interval);
        }
    };
    int threads = std::min<int>(config.parallelism, static_cast<int>(config.M_values.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return report;
}

namespace detail {

inline std::string pad(const std::string& s, size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

inline bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

}  // namespace detail

/// Writes report.txt (aligned text), report.json (machine-readable) and one
/// search_M<M>.txt per recognition search. Output is deterministic.
inline void emit_tables(const PipelineReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    {
        std::ofstream txt(out_dir / "report.txt", std::ios::trunc);
        txt << "anharm pipeline report\n";
        txt << "======================\n\n";

        txt << "resolved configuration\n";
        txt << detail::pad("M", 4) << detail::pad("orders", 8) << detail::pad("dps", 6)
            << detail::pad("guard", 7) << detail::pad("rich.N", 8) << detail::pad("maxcoeff", 10)
            << "unit-entry\n";
        for (const auto& r : report.results) {
            txt << detail::pad(std::to_string(r.params.M), 4)
                << detail::pad(std::to_string(r.params.max_order), 8)
                << detail::pad(std::to_string(r.params.dps), 6)
                << detail::pad(std::to_string(r.params.guard), 7)
                << detail::pad(std::to_string(r.params.rich_order), 8)
                << detail::pad(std::to_string(r.params.maxcoeff), 10)
                << (r.params.include_unit ? "yes" : "no") << "\n";
        }
        txt << "\n";

        txt << "instanton action (exact formula vs extraction)\n";
        txt << detail::pad("M", 4) << detail::pad("A_M (exact)", 36) << detail::pad("a1", 6)
            << "agree-digits\n";
        for (const auto& r : report.results) {
            if (!r.ok && r.A_exact.empty()) {
                txt << detail::pad(std::to_string(r.params.M), 4) << "FAILED: " << r.error << "\n";
                continue;
            }
            txt << detail::pad(std::to_string(r.params.M), 4) << detail::pad(r.A_exact, 36)
                << detail::pad(r.a1_exact ? "ok" : "BAD", 6) << r.A_match_digits << "\n";
        }
        txt << "\n";

        txt << "stokes multipliers\n";
        txt << detail::pad("M", 4) << detail::pad("C_M (signed)", 36) << detail::pad("|C_M|", 36)
            << detail::pad("digits", 8) << detail::pad("b", 26) << "closed form\n";
        for (const auto& r : report.results) {
            if (!r.ok && r.C_signed.empty()) {
                txt << detail::pad(std::to_string(r.params.M), 4) << "FAILED: " << r.error << "\n";
                continue;
            }
            txt << detail::pad(std::to_string(r.params.M), 4) << detail::pad(r.C_signed, 36)
                << detail::pad(r.C_abs, 36) << detail::pad(std::to_string(r.C_reliable), 8)
                << detail::pad(r.b_extracted, 26)
                << (r.closed_form.empty() ? "-" : r.closed_form) << "\n";
        }
        txt << "\n";

        txt << "totient correlation\n";
        txt << detail::pad("M", 4) << detail::pad("M-1", 5) << detail::pad("phi(M-1)/2", 12)
            << detail::pad("closed form?", 14) << detail::pad("M prime?", 10) << "basis\n";
        for (const auto& r : report.results) {
            std::string basis;
            if (r.search) {
                for (const auto& l : r.search->basis_labels) {
                    if (!basis.empty()) basis += " ";
                    basis += l;
                }
            } else {
                basis = "(search skipped)";
            }
            txt << detail::pad(std::to_string(r.params.M), 4)
                << detail::pad(std::to_string(r.params.M - 1), 5)
                << detail::pad(std::to_string(r.phi_half), 12)
                << detail::pad(r.closed_form.empty() ? "No" : "Yes", 14)
                << detail::pad(detail::is_prime(r.params.M) ? "Yes" : "No", 10) << basis << "\n";
        }
        txt << "\n";

        for (const auto& r : report.results) {
            if (r.c1) txt << "c1 (M=" << r.params.M << "): " << *r.c1 << "\n";
        }
        bool any_c1 = false;
        for (const auto& r : report.results) any_c1 = any_c1 || r.c1.has_value();
        if (any_c1) txt << "\n";

        for (const auto& r : report.results) {
            if (!r.ok) txt << "M=" << r.params.M << " FAILED: " << r.error << "\n";
        }
        txt << "status: " << (report.failures() == 0 ? "all-success" : "partial") << "\n";
    }

    {
        nlohmann::ordered_json j;
        j["config"]["out_dir"] = report.config.out_dir.string();
        j["config"]["parallelism"] = report.config.parallelism;
        j["config"]["desk_scale"] = report.config.desk_scale;
        j["config"]["flush_interval"] = report.config.flush_interval;
        j["results"] = nlohmann::ordered_json::array();
        for (const auto& r : report.results) {
            nlohmann::ordered_json e;
            e["M"] = r.params.M;
            e["params"] = {{"orders", r.params.max_order}, {"dps", r.params.dps},
                           {"guard", r.params.guard},      {"richardson_order", r.params.rich_order},
                           {"maxcoeff", r.params.maxcoeff}, {"unit_entry", r.params.include_unit}};
            e["ok"] = r.ok;
            if (!r.error.empty()) e["error"] = r.error;
            e["a1_exact"] = r.a1_exact;
            e["A_exact"] = r.A_exact;
            e["A_extracted"] = r.A_extracted;
            e["A_match_digits"] = r.A_match_digits;
            e["b"] = r.b_extracted;
            e["C_signed"] = r.C_signed;
            e["C_abs"] = r.C_abs;
            e["C_reliable_digits"] = r.C_reliable;
            {
                auto w = nlohmann::ordered_json::array();
                for (const auto& [k0, N, est] : r.C_windows) {
                    w.push_back({{"k0", k0}, {"N", N}, {"estimate", est}});
                }
                e["C_windows"] = w;
            }
            if (r.c1) e["c1"] = *r.c1;
            e["phi_half"] = r.phi_half;
            e["closed_form"] = r.closed_form;
            if (!r.identity_residual.empty()) e["identity_residual"] = r.identity_residual;
            if (r.search) e["search_outcome"] = r.search->outcome;
            j["results"].push_back(e);
        }
        std::ofstream js(out_dir / "report.json", std::ios::trunc);
        js << j.dump(2) << "\n";
    }

    for (const auto& r : report.results) {
        if (r.search) {
            std::ofstream sf(out_dir / ("search_M" + std::to_string(r.params.M) + ".txt"),
                             std::ios::trunc);
            sf << r.search->serialize();
        }
    }
}

/// Figure-style convergence export: a raw (k, C~_k) block followed by a
/// Richardson block (N, R_N) at fixed k0, comma-separated.
inline void emit_convergence(const SeriesCoefficients& series, const BigReal& A_exact, int k0,
                             const std::vector<int>& N_values, const PrecisionContext& ctx,
                             std::ostream& out) {
    NumericSequence c_seq = stokes_sequence(series, A_exact, ctx);
    for (int N : N_values) {
        if (!c_seq.contains(k0) || !c_seq.contains(k0 + N)) {
            throw std::out_of_range("emit_convergence: window k0=" + std::to_string(k0) + " N=" +
                                    std::to_string(N) + " not covered by " +
                                    std::to_string(series.max_order()) + " orders");
        }
    }
    int show = std::min(series.dps_used, 30);
    out << "k,C_k\n";
    for (int k = c_seq.first_k; k <= c_seq.last_k(); ++k) {
        out << k << "," << c_seq.at(k).to_string(show) << "\n";
    }
    out << "\n";
    out << "N,R_N\n";
    for (int N : N_values) {
        out << N << "," << richardson(c_seq, k0, N, ctx).to_string(show) << "\n";
    }
}

}  // namespace anharm
