// Command-line driver: series computation, parameter extraction, closed-form
// recognition, batch pipeline, standalone verification, and convergence
// export. All numeric output is printed as decimal strings.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "anharm/asymptotics.hpp"
#include "anharm/oracle.hpp"
#include "anharm/pipeline.hpp"
#include "anharm/recognition.hpp"
#include "anharm/series.hpp"
#include "anharm/verification.hpp"

namespace {

using namespace anharm;

int cmd_compute(int M, int orders, int dps, int guard, const std::string& out_dir) {
    PrecisionContext ctx(dps, guard);
    PerMParams p = default_params(M);
    p.max_order = orders;
    p.dps = dps;
    p.guard = guard;
    ComputeOptions opt;
    opt.cache_file = cache_path(out_dir, p);
    SeriesCoefficients series = compute_series(OscillatorSpec(M), orders, ctx, opt);
    std::cout << "M=" << M << " orders=" << orders << " dps=" << dps << " guard=" << guard << "\n";
    std::cout << "cache: " << opt.cache_file->string() << "\n";
    std::cout << "a_1 = " << series.a(1).to_string(std::min(dps, 30)) << "\n";
    std::cout << "a_" << orders << " = " << series.a(orders).to_string(std::min(dps, 30)) << "\n";
    return 0;
}

int cmd_extract(int M, int orders, int dps, int guard, int rich_order, int start_index,
                const std::string& out_dir) {
    PrecisionContext ctx(dps, guard);
    PerMParams p = default_params(M);
    p.max_order = orders;
    p.dps = dps;
    p.guard = guard;
    auto file = cache_path(out_dir, p);
    auto cached = load_coefficient_cache(file, M, dps, guard);
    if (!cached) {
        std::cerr << "no cache at " << file.string() << " (run `compute` first)\n";
        return 1;
    }
    SeriesCoefficients series;
    series.M = M;
    series.dps_used = dps;
    series.guard_used = guard;
    series.coeffs = std::move(cached->coeffs);
    if (orders > 0 && orders < series.max_order()) {
        series.coeffs.resize(static_cast<size_t>(orders) + 1);
    }
    int K = series.max_order();

    BigReal A_exact = instanton_action_exact(M, ctx);
    NumericSequence a_seq = action_sequence(series);
    NumericSequence b_seq = shift_sequence(series, A_exact);
    NumericSequence c_seq = stokes_sequence(series, A_exact, ctx);

    auto windows_a = default_windows(K, rich_order, a_seq.first_k);
    auto windows_c = default_windows(K, rich_order, c_seq.first_k);
    if (start_index > 0) {
        windows_a.insert(windows_a.begin(), Window{start_index, rich_order});
        windows_c.insert(windows_c.begin(), Window{start_index, rich_order});
    }

    ExtrapolationResult a_res = assess_stability(a_seq, windows_a, ctx);
    ExtrapolationResult b_res = assess_stability(b_seq, windows_a, ctx);
    ExtrapolationResult c_res = assess_stability(c_seq, windows_c, ctx);

    int show = std::min(dps, 36);
    std::cout << "M=" << M << " orders=" << K << " dps=" << dps << " N=" << rich_order << "\n";
    std::cout << "A (exact)     = " << A_exact.to_string(show) << "\n";
    std::cout << "A (extracted) = " << a_res.limit.to_string(show) << "  [" << a_res.reliable_digits
              << " digits stable]\n";
    std::cout << "b (extracted) = " << b_res.limit.to_string(std::min(show, 20)) << "  ["
              << b_res.reliable_digits << " digits stable]\n";
    std::cout << "C (signed)    = " << c_res.limit.to_string(show) << "  [" << c_res.reliable_digits
              << " digits stable]\n";
    std::cout << "|C|           = " << abs(c_res.limit).to_string(show) << "\n";
    for (const auto& [k0, N, est] : c_res.windows) {
        std::cout << "  window k0=" << k0 << " N=" << N << ": " << est.to_string(show) << "\n";
    }
    if (M == 2) {
        BigReal c2 = *exact_stokes_multiplier(2, ctx);
        ExtrapolationResult c1_res = assess_stability(c1_sequence(c_seq, c2), windows_c, ctx);
        std::cout << "c1 (M=2)      = " << c1_res.limit.to_string(std::min(show, 20)) << "  ["
                  << c1_res.reliable_digits << " digits stable]\n";
    }
    return 0;
}

int cmd_recognize(int M, const std::string& value, int reliable, long maxcoeff, bool no_unit,
                  const std::vector<int>& dps_levels) {
    if (reliable <= 0) {
        // default: count significant digits supplied
        reliable = 0;
        for (char ch : value) {
            if (ch >= '0' && ch <= '9') ++reliable;
        }
    }
    PrecisionContext parse_ctx(reliable + 10);
    BigReal c(value, parse_ctx);
    SearchReport report = search_closed_form(M, c, reliable, detail::maxcoeff_schedule(maxcoeff),
                                             !no_unit, dps_levels);
    std::cout << report.serialize();
    if (report.found() && report.form) {
        ClosedForm reduced = reduce_gamma(*report.form);
        std::cout << "reduced: " << reduced.to_string() << "\n";
    }
    return 0;
}

int cmd_verify() {
    bool all = true;
    for (const auto& chk : verify_instanton_actions()) {
        std::cout << (chk.pass ? "PASS" : "FAIL") << " A_" << chk.M << " = " << chk.computed
                  << " (rel err " << chk.rel_err << ")\n";
        all = all && chk.pass;
    }
    for (const auto& chk : verify_reference_identities()) {
        std::cout << (chk.pass ? "PASS" : "FAIL") << " " << chk.description << " (residual "
                  << chk.residual << ")\n";
        all = all && chk.pass;
    }
    std::cout << (all ? "verify: all checks passed" : "verify: FAILURES") << "\n";
    return all ? 0 : 1;
}

int cmd_convergence(int M, int orders, int dps, int guard, int start_index,
                    const std::string& n_list, const std::string& out_dir,
                    const std::string& out_file) {
    PrecisionContext ctx(dps, guard);
    PerMParams p = default_params(M);
    p.max_order = orders;
    p.dps = dps;
    p.guard = guard;
    ComputeOptions opt;
    opt.cache_file = cache_path(out_dir, p);
    SeriesCoefficients series = compute_series(OscillatorSpec(M), orders, ctx, opt);
    BigReal A_exact = instanton_action_exact(M, ctx);

    std::vector<int> Ns;
    std::stringstream ss(n_list);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (!part.empty()) Ns.push_back(std::stoi(part));
    }
    if (Ns.empty()) Ns = {20, 40, 60, 80, 100};
    if (start_index <= 0) start_index = orders / 2;

    std::filesystem::path target = out_file.empty()
        ? std::filesystem::path(out_dir) / ("convergence_M" + std::to_string(M) + ".csv")
        : std::filesystem::path(out_file);
    if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::trunc);
    emit_convergence(series, A_exact, start_index, Ns, ctx, out);
    std::cout << "wrote " << target.string() << "\n";
    return 0;
}

int cmd_pipeline(RunConfig cfg) {
    cfg.validate();
    PipelineReport report = run_pipeline(cfg);
    emit_tables(report, cfg.out_dir);
    std::cout << "report: " << (cfg.out_dir / "report.txt").string() << "\n";
    for (const auto& r : report.results) {
        std::cout << "M=" << r.params.M << ": " << (r.ok ? "ok" : ("FAILED (" + r.error + ")"))
                  << (r.closed_form.empty() ? "" : ("  closed form: " + r.closed_form)) << "\n";
    }
    if (report.results.empty()) return 0;
    return report.failures() == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anharmonic-oscillator large-order asymptotics toolkit"};
    app.require_subcommand(1);

    int M = 2, orders = 0, dps = 0, guard = 30, rich_order = 0, start_index = 0;
    long maxcoeff = 200;
    std::string out_dir = "anharm-out", value, n_list, out_file, m_range, config_file;
    bool no_unit = false, desk_scale = false;
    int parallelism = 1;
    std::vector<int> dps_levels;

    auto* c_compute = app.add_subcommand("compute", "compute perturbation coefficients");
    c_compute->add_option("--M", M, "oscillator degree (perturbation x^{2M})")->required();
    c_compute->add_option("--orders", orders, "number of orders")->required();
    c_compute->add_option("--dps", dps, "decimal working precision")->required();
    c_compute->add_option("--guard", guard, "guard digits");
    c_compute->add_option("--out-dir", out_dir, "cache/output directory");

    auto* c_extract = app.add_subcommand("extract", "extract (A, b, C) from a coefficient cache");
    c_extract->add_option("--M", M)->required();
    c_extract->add_option("--orders", orders, "truncate to this many orders (0 = all)");
    c_extract->add_option("--dps", dps)->required();
    c_extract->add_option("--guard", guard);
    c_extract->add_option("--richardson-order", rich_order, "Richardson order")->required();
    c_extract->add_option("--start-index", start_index, "extra window start k0");
    c_extract->add_option("--out-dir", out_dir);

    auto* c_recognize = app.add_subcommand("recognize", "PSLQ closed-form search on a value");
    c_recognize->add_option("--M", M)->required();
    c_recognize->add_option("--value", value, "decimal value of C (signed or |C|)")->required();
    c_recognize->add_option("--reliable", orders, "reliable digits (default: digits supplied)");
    c_recognize->add_option("--maxcoeff", maxcoeff, "coefficient bound");
    c_recognize->add_option("--dps-level", dps_levels, "explicit search precision levels");
    c_recognize->add_flag("--no-unit", no_unit, "drop the unit basis entry");

    auto* c_pipeline = app.add_subcommand("pipeline", "full compute/extract/recognize batch");
    c_pipeline->add_option("--M", m_range, "single M or range, e.g. 4 or 2-11");
    c_pipeline->add_option("--M-range", m_range, "alias of --M");
    c_pipeline->add_option("--orders", orders, "override max order for all M");
    c_pipeline->add_option("--dps", dps, "override dps for all M");
    c_pipeline->add_option("--richardson-order", rich_order, "override Richardson order");
    c_pipeline->add_option("--maxcoeff", maxcoeff, "override PSLQ coefficient bound");
    c_pipeline->add_option("--parallelism", parallelism, "concurrent per-M pipelines");
    c_pipeline->add_option("--out-dir", out_dir);
    c_pipeline->add_flag("--desk-scale", desk_scale, "orders/4 and dps/2 (floors 50/60)");
    c_pipeline->add_option("--config", config_file, "key-value config file");

    auto* c_verify = app.add_subcommand("verify", "check instanton actions and known identities");
    (void)c_verify;

    auto* c_conv = app.add_subcommand("convergence", "export raw and extrapolated C sequences");
    c_conv->add_option("--M", M)->required();
    c_conv->add_option("--orders", orders)->required();
    c_conv->add_option("--dps", dps)->required();
    c_conv->add_option("--guard", guard);
    c_conv->add_option("--start-index", start_index, "Richardson window start (default K/2)");
    c_conv->add_option("--N-list", n_list, "comma-separated Richardson orders");
    c_conv->add_option("--out-dir", out_dir);
    c_conv->add_option("--out", out_file, "output file (default <out-dir>/convergence_M<M>.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_compute->parsed()) return cmd_compute(M, orders, dps, guard, out_dir);
        if (c_extract->parsed()) return cmd_extract(M, orders, dps, guard, rich_order, start_index, out_dir);
        if (c_recognize->parsed()) return cmd_recognize(M, value, orders, maxcoeff, no_unit, dps_levels);
        if (c_verify->parsed()) return cmd_verify();
        if (c_conv->parsed())
            return cmd_convergence(M, orders, dps, guard, start_index, n_list, out_dir, out_file);
        if (c_pipeline->parsed()) {
            RunConfig cfg;
            if (!config_file.empty()) parse_config_file(config_file, cfg);
            if (!m_range.empty()) cfg.M_values = anharm::parse_m_range(m_range);
            if (cfg.M_values.empty() && m_range.empty()) {
                // default range when neither flag nor config provides one
                cfg.M_values = anharm::parse_m_range("2-11");
            }
            if (c_pipeline->count("--orders")) cfg.global.max_order = orders;
            if (c_pipeline->count("--dps")) cfg.global.dps = dps;
            if (c_pipeline->count("--richardson-order")) cfg.global.rich_order = rich_order;
            if (c_pipeline->count("--maxcoeff")) cfg.global.maxcoeff = maxcoeff;
            if (c_pipeline->count("--parallelism")) cfg.parallelism = parallelism;
            if (c_pipeline->count("--out-dir")) cfg.out_dir = out_dir;
            if (desk_scale) cfg.desk_scale = true;
            return cmd_pipeline(std::move(cfg));
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CacheError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
