#pragma once

// Rayleigh-Schroedinger perturbation series for the ground state of
//
//   H = p^2/2 + x^2/2 + g x^{2M},
//
// in the harmonic-oscillator basis. The perturbation V = x^{2M} is applied as
// 2M successive applications of the tridiagonal position operator
// x = (a + a^dagger)/sqrt(2). States are stored densely over the even levels
// n = 0, 2, ..., 2Mk that carry the ground-state corrections (the potential
// preserves parity). Energy denominators E_0 - E_n = -n are exact integers.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "anharm/cache.hpp"
#include "anharm/precision.hpp"

namespace anharm {

struct OscillatorSpec {
    int M;  // perturbation is x^{2M}

    explicit OscillatorSpec(int M_) : M(M_) {
        if (M < 2) throw std::invalid_argument("OscillatorSpec: M must be >= 2");
    }
};

/// k-th order wavefunction correction, stored over even levels only:
/// even[i] = <2i | psi^(k)>.
struct WavefunctionState {
    int order = 0;
    std::vector<BigReal> even;

    int support_max_level() const { return 2 * (static_cast<int>(even.size()) - 1); }

    /// Coefficient <level | psi>; zero at odd levels and outside the support.
    BigReal coefficient(int level) const {
        if (level < 0 || level % 2 != 0 || level / 2 >= static_cast<int>(even.size())) {
            BigReal z(even.empty() ? MPFR_PREC_MIN : even.front().precision());
            mpfr_set_zero(z.raw(), 1);
            return z;
        }
        return even[static_cast<size_t>(level / 2)];
    }
};

struct SeriesCoefficients {
    int M = 0;
    std::vector<BigReal> coeffs;  // a_0 ... a_K
    int dps_used = 0;
    int guard_used = 0;

    int max_order() const { return static_cast<int>(coeffs.size()) - 1; }
    const BigReal& a(int k) const { return coeffs.at(static_cast<size_t>(k)); }
};

namespace detail {

/// sqrt(t/2) for t = 0..max_t at the given precision (matrix elements of x).
inline std::vector<BigReal> sqrt_half_table(int max_t, mpfr_prec_t bits) {
    std::vector<BigReal> s;
    s.reserve(static_cast<size_t>(max_t) + 1);
    for (int t = 0; t <= max_t; ++t) {
        BigReal v(bits);
        mpfr_set_si(v.raw(), t, MPFR_RNDN);
        mpfr_div_2ui(v.raw(), v.raw(), 1, MPFR_RNDN);
        mpfr_sqrt(v.raw(), v.raw(), MPFR_RNDN);
        s.push_back(std::move(v));
    }
    return s;
}

inline void zero_fill(std::vector<BigReal>& v, size_t n, mpfr_prec_t bits) {
    v.clear();
    v.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        BigReal z(bits);
        mpfr_set_zero(z.raw(), 1);
        v.push_back(std::move(z));
    }
}

/// V |psi> with V = x^{2M}, on an even-level vector. `sqrt_half` must cover
/// indices up to 2*(even.size()) + 2M. Returns an even-level vector longer by
/// M entries. `mult_count`, when given, accumulates the number of
/// multiply-accumulate operations performed.
inline std::vector<BigReal> apply_x2m(const std::vector<BigReal>& even, int M,
                                      const std::vector<BigReal>& sqrt_half, mpfr_prec_t bits,
                                      std::uint64_t* mult_count = nullptr) {
    // odd[i] = <2i+1 | x phi_even>, even'[i] = <2i | x phi_odd>
    std::vector<BigReal> cur = even;
    std::vector<BigReal> next;
    std::uint64_t ops = 0;
    for (int pass = 0; pass < 2 * M; ++pass) {
        bool to_odd = (pass % 2 == 0);
        size_t in_len = cur.size();
        size_t out_len = to_odd ? in_len : in_len + 1;
        zero_fill(next, out_len, bits);
        if (to_odd) {
            // out[i] = s[2i+1]*in[i] + s[2i+2]*in[i+1]
            for (size_t i = 0; i < out_len; ++i) {
                mpfr_mul(next[i].raw(), sqrt_half[2 * i + 1].raw(), cur[i].raw(), MPFR_RNDN);
                if (i + 1 < in_len) {
                    mpfr_fma(next[i].raw(), sqrt_half[2 * i + 2].raw(), cur[i + 1].raw(),
                             next[i].raw(), MPFR_RNDN);
                }
                ops += 2;
            }
        } else {
            // out[i] = s[2i+1]*in[i] + s[2i]*in[i-1]
            for (size_t i = 0; i < out_len; ++i) {
                if (i < in_len) {
                    mpfr_mul(next[i].raw(), sqrt_half[2 * i + 1].raw(), cur[i].raw(), MPFR_RNDN);
                }
                if (i > 0) {
                    mpfr_fma(next[i].raw(), sqrt_half[2 * i].raw(), cur[i - 1].raw(), next[i].raw(),
                             MPFR_RNDN);
                }
                ops += 2;
            }
        }
        cur.swap(next);
    }
    if (mult_count) *mult_count += ops;
    return cur;
}

}  // namespace detail

/// V |state> with V = x^{2M}. Linear; grows the support by 2M levels.
inline WavefunctionState apply_potential(const WavefunctionState& state, int M,
                                         const PrecisionContext& ctx) {
    if (M < 2) throw std::invalid_argument("apply_potential: M must be >= 2");
    auto table = detail::sqrt_half_table(2 * static_cast<int>(state.even.size()) + 2 * M + 2, ctx.bits());
    WavefunctionState out;
    out.order = state.order;
    out.even = detail::apply_x2m(state.even, M, table, ctx.bits());
    return out;
}

/// Sequential engine for the recursion. Holds the wavefunction history
/// psi^(0..k) and energies a_0..a_k; step() advances one order.
class RsRecursion {
public:
    RsRecursion(OscillatorSpec spec, const PrecisionContext& ctx)
        : M_(spec.M), ctx_(ctx), bits_(ctx.bits()) {
        WavefunctionState ground;
        ground.order = 0;
        BigReal one(bits_);
        mpfr_set_si(one.raw(), 1, MPFR_RNDN);
        ground.even.push_back(std::move(one));
        psi_.push_back(std::move(ground));
        BigReal a0(bits_);
        mpfr_set_si(a0.raw(), 1, MPFR_RNDN);
        mpfr_div_2ui(a0.raw(), a0.raw(), 1, MPFR_RNDN);  // E_0 = 1/2, exact
        a_.push_back(std::move(a0));
    }

    int order() const { return static_cast<int>(a_.size()) - 1; }
    const std::vector<BigReal>& energies() const { return a_; }
    const std::vector<WavefunctionState>& history() const { return psi_; }
    std::uint64_t mult_count() const { return mults_; }

    /// Pre-sizes the matrix-element table for runs up to order K.
    void reserve_orders(int K) { ensure_table(2 * M_ * K + 2); }

    /// Computes (a_k, psi^(k)) for k = order()+1.
    void step() {
        int k = order() + 1;
        ensure_table(2 * M_ * k + 2);
        std::vector<BigReal> w =
            detail::apply_x2m(psi_.back().even, M_, sqrt_half_, bits_, &mults_);
        BigReal ak = w[0];

        // acc = V psi^(k-1) - sum_j a_j psi^(k-j); solved against E_0 - E_n = -n.
        BigReal neg_aj(bits_);
        for (int j = 1; j <= k - 1; ++j) {
            const auto& prev = psi_[static_cast<size_t>(k - j)].even;
            mpfr_neg(neg_aj.raw(), a_[static_cast<size_t>(j)].raw(), MPFR_RNDN);
            for (size_t i = 1; i < prev.size(); ++i) {
                mpfr_fma(w[i].raw(), neg_aj.raw(), prev[i].raw(), w[i].raw(), MPFR_RNDN);
            }
            mults_ += prev.size();
        }
        WavefunctionState next;
        next.order = k;
        next.even = std::move(w);
        mpfr_set_zero(next.even[0].raw(), 1);  // intermediate normalization <0|psi^(k)> = 0
        for (size_t i = 1; i < next.even.size(); ++i) {
            mpfr_div_si(next.even[i].raw(), next.even[i].raw(), -2 * static_cast<long>(i), MPFR_RNDN);
        }
        psi_.push_back(std::move(next));
        a_.push_back(std::move(ak));
    }

private:
    void ensure_table(int max_t) {
        if (static_cast<int>(sqrt_half_.size()) <= max_t) {
            int grown = std::max(max_t + 1, 2 * static_cast<int>(sqrt_half_.size()));
            sqrt_half_ = detail::sqrt_half_table(grown, bits_);
        }
    }

    int M_;
    PrecisionContext ctx_;
    mpfr_prec_t bits_;
    std::vector<WavefunctionState> psi_;
    std::vector<BigReal> a_;
    std::vector<BigReal> sqrt_half_;
    std::uint64_t mults_ = 0;
};

/// One recursion step from explicit history: returns (a_k, psi^(k)) where
/// k = history.size(). `energies` must hold a_1 ... a_{k-1}.
inline std::pair<BigReal, WavefunctionState> rs_step(const std::vector<WavefunctionState>& history,
                                                     const std::vector<BigReal>& energies, int M,
                                                     const PrecisionContext& ctx) {
    if (history.empty()) throw std::invalid_argument("rs_step: empty history");
    int k = static_cast<int>(history.size());
    for (int j = 0; j < k; ++j) {
        if (history[static_cast<size_t>(j)].order != j) {
            throw std::invalid_argument("rs_step: history orders are non-contiguous");
        }
    }
    if (static_cast<int>(energies.size()) != k - 1) {
        throw std::invalid_argument("rs_step: energies must hold a_1..a_{k-1}");
    }
    mpfr_prec_t bits = ctx.bits();
    auto table = detail::sqrt_half_table(2 * M * k + 2 * M + 2, bits);
    std::vector<BigReal> w = detail::apply_x2m(history.back().even, M, table, bits);
    BigReal ak = w[0];
    BigReal neg_aj(bits);
    for (int j = 1; j <= k - 1; ++j) {
        const auto& prev = history[static_cast<size_t>(k - j)].even;
        mpfr_neg(neg_aj.raw(), energies[static_cast<size_t>(j - 1)].raw(), MPFR_RNDN);
        for (size_t i = 1; i < prev.size(); ++i) {
            mpfr_fma(w[i].raw(), neg_aj.raw(), prev[i].raw(), w[i].raw(), MPFR_RNDN);
        }
    }
    WavefunctionState next;
    next.order = k;
    next.even = std::move(w);
    mpfr_set_zero(next.even[0].raw(), 1);
    for (size_t i = 1; i < next.even.size(); ++i) {
        mpfr_div_si(next.even[i].raw(), next.even[i].raw(), -2 * static_cast<long>(i), MPFR_RNDN);
    }
    return {std::move(ak), std::move(next)};
}

struct ComputeOptions {
    std::optional<std::filesystem::path> cache_file;
    int flush_interval = 10;
    std::uint64_t* mult_count = nullptr;  // optional cost instrumentation
};

/// Computes a_0 ... a_K. When a cache file is given: a complete cached prefix
/// is reloaded bit-exactly and no recomputation happens; an incomplete cache
/// is recomputed from scratch (deterministically) and rewritten, with records
/// flushed every `flush_interval` orders.
inline SeriesCoefficients compute_series(OscillatorSpec spec, int K, const PrecisionContext& ctx,
                                         const ComputeOptions& opt = {}) {
    if (K < 0) throw std::invalid_argument("compute_series: K must be >= 0");
    SeriesCoefficients out;
    out.M = spec.M;
    out.dps_used = ctx.dps();
    out.guard_used = ctx.guard();

    if (opt.cache_file) {
        auto cached = load_coefficient_cache(*opt.cache_file, spec.M, ctx.dps(), ctx.guard());
        if (cached && static_cast<int>(cached->coeffs.size()) >= K + 1) {
            cached->coeffs.resize(static_cast<size_t>(K) + 1);
            out.coeffs = std::move(cached->coeffs);
            return out;
        }
    }

    RsRecursion engine(spec, ctx);
    engine.reserve_orders(K);
    std::optional<CacheWriter> writer;
    if (opt.cache_file) {
        writer.emplace(*opt.cache_file, spec.M, ctx.dps(), ctx.guard(), opt.flush_interval);
        writer->put(0, engine.energies()[0]);
    }
    for (int k = 1; k <= K; ++k) {
        engine.step();
        if (writer) writer->put(k, engine.energies().back());
    }
    if (writer) writer->finish();
    if (opt.mult_count) *opt.mult_count += engine.mult_count();
    out.coeffs = engine.energies();
    return out;
}

}  // namespace anharm
