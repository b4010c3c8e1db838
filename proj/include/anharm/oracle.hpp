#pragma once

// Exact-rational validation path for the perturbation series.
//
// In the rescaled basis e_n = sqrt(n!) |n>, the position operator acts as
// x e_n = (e_{n+1} + n e_{n-1}) / sqrt(2), so x^{2M} = 2^{-M} T^{2M} with the
// integer tridiagonal map T e_n = e_{n+1} + n e_{n-1}. Every recursion
// quantity is then an exact rational: this path validates the floating-point
// recursion, never the reverse. Intended for modest orders (K up to ~50).

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

#include "anharm/rational.hpp"
#include "anharm/series.hpp"

namespace anharm {

struct RationalSeries {
    int M = 0;
    std::vector<BigRational> coeffs;  // a_0 ... a_K, exact

    int max_order() const { return static_cast<int>(coeffs.size()) - 1; }
    const BigRational& a(int k) const { return coeffs.at(static_cast<size_t>(k)); }
};

namespace detail {

// One application of T on an even-level vector (u[i] = coeff of e_{2i}),
// then one on the resulting odd-level vector; i.e. T^2 overall.
inline void oracle_t_squared(std::vector<mpq_class>& u) {
    size_t L = u.size();
    // odd v[i] = coeff of e_{2i+1} in T u = u[i] + (2i+2) u[i+1]
    std::vector<mpq_class> v(L);
    for (size_t i = 0; i < L; ++i) {
        v[i] = u[i];
        if (i + 1 < L) v[i] += mpq_class(2 * static_cast<long>(i) + 2) * u[i + 1];
    }
    // even u'[i] = coeff of e_{2i} in T v = v[i-1] + (2i+1) v[i]
    std::vector<mpq_class> w(L + 1);
    for (size_t i = 0; i <= L; ++i) {
        if (i < L) w[i] = mpq_class(2 * static_cast<long>(i) + 1) * v[i];
        if (i > 0) w[i] += v[i - 1];
    }
    u = std::move(w);
}

}  // namespace detail

/// Exact coefficients a_0 ... a_K of the ground-state series.
inline RationalSeries rational_oracle_series(OscillatorSpec spec, int K) {
    if (K < 0) throw std::invalid_argument("rational_oracle_series: K must be >= 0");
    const int M = spec.M;
    mpz_class two_pow_m = 1;
    two_pow_m <<= M;

    RationalSeries out;
    out.M = M;
    out.coeffs.emplace_back(1, 2);  // a_0 = 1/2

    // psi[k][i] = coefficient of e_{2i} in psi^(k); psi[k][0] = 0 for k >= 1.
    std::vector<std::vector<mpq_class>> psi;
    psi.push_back({mpq_class(1)});

    for (int k = 1; k <= K; ++k) {
        std::vector<mpq_class> w = psi.back();
        for (int pass = 0; pass < M; ++pass) detail::oracle_t_squared(w);
        mpq_class scale(mpz_class(1), two_pow_m);
        for (auto& c : w) c *= scale;  // V = 2^{-M} T^{2M}

        mpq_class ak = w[0];
        for (int j = 1; j <= k - 1; ++j) {
            const auto& prev = psi[static_cast<size_t>(k - j)];
            const mpq_class& aj = out.coeffs[static_cast<size_t>(j)].value();
            for (size_t i = 1; i < prev.size(); ++i) w[i] -= aj * prev[i];
        }
        w[0] = 0;
        for (size_t i = 1; i < w.size(); ++i) {
            w[i] /= mpq_class(-2 * static_cast<long>(i));
        }
        psi.push_back(std::move(w));
        out.coeffs.emplace_back(ak);
    }
    return out;
}

}  // namespace anharm
