#pragma once

// The PSD Gram family M = V V^T of the sign matrices. Rows of V are +-1
// vectors indexed by their binary encoding, so entries of M reduce to
// m - 2*popcount(i XOR j) and never require storing V or M.

#include "rkstab/common.hpp"
#include "rkstab/finite_norms.hpp"
#include "rkstab/sign_matrix.hpp"

#include <bit>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace rkstab {

struct GramSpec {
    SignMatrixSpec base;
    explicit GramSpec(int p) : base(p) {}

    /// M*u computed matrix-free as V (V^T u): two streaming passes,
    /// O(m 2^m) each; M itself is never formed.
    std::vector<double> apply(std::span<const double> u,
                              std::uint64_t cap = kRowMaterializeCap) const {
        const int m = base.m;
        if (!base.rows_fit_u64() || base.row_count_u64() > cap)
            throw budget_error("gram apply: 2^m exceeds cap " + std::to_string(cap));
        const std::uint64_t n = base.row_count_u64();
        if (u.size() != n) throw std::invalid_argument("gram apply: u must have length 2^m");
        std::vector<double> a(m, 0.0);
        for (std::uint64_t i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j)
                a[j] += ((i >> (m - 1 - j)) & 1u) ? -u[i] : u[i];
        std::vector<double> y(n, 0.0);
        for (std::uint64_t i = 0; i < n; ++i) {
            double dot = 0;
            for (int j = 0; j < m; ++j) dot += ((i >> (m - 1 - j)) & 1u) ? -a[j] : a[j];
            y[i] = dot;
        }
        return y;
    }
};

/// Dot product of rows i and j of V, via the XOR popcount identity.
inline std::int64_t entry(const GramSpec& g, std::uint64_t i, std::uint64_t j) {
    const int m = g.base.m;
    if (m < 64) {
        const std::uint64_t n = std::uint64_t{1} << m;
        if (i >= n || j >= n) throw std::out_of_range("gram entry: index out of range");
    }
    return static_cast<std::int64_t>(m) - 2 * std::popcount(i ^ j);
}

/// ||M||_1 = 2^m * ||V||_{inf,1}, exact.
inline BigInt l1_closed(const GramSpec& g) {
    return (BigInt(1) << g.base.m) * opnorm_inf1_closed(g.base);
}

/// ||M||_{inf,1} = (2^m)^2, exact.
inline BigInt opnorm_inf1_value(const GramSpec& g) { return BigInt(1) << (2 * g.base.m); }

struct MStarResult {
    BigInt exact;             // n^2
    bool numeric_ran = false;
    double numeric_best = 0;  // best n * sum_b |a^T b| found on the unit sphere
    double argmax_norm = 0;   // ||a||_2 of the best point (maximum lives on the boundary)
};

namespace detail {

// f(a) = sum over b in U_m of |a^T b|, with subgradient sum sign(a^T b) b.
inline double sphere_objective(std::span<const double> a, int m, std::vector<double>* grad) {
    const std::uint64_t n = std::uint64_t{1} << m;
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    double f = 0;
    for (std::uint64_t b = 0; b < n; ++b) {
        double dot = 0;
        for (int j = 0; j < m; ++j) dot += ((b >> (m - 1 - j)) & 1u) ? -a[j] : a[j];
        f += std::abs(dot);
        if (grad) {
            const double s = dot >= 0 ? 1.0 : -1.0;
            for (int j = 0; j < m; ++j)
                (*grad)[j] += ((b >> (m - 1 - j)) & 1u) ? -s : s;
        }
    }
    return f;
}

}  // namespace detail

/// M_n^* = n * max_{||a||_2 <= 1} ||V a||_1 = n^2. The numeric path (p <= 3)
/// runs projected gradient ascent from random starts; it exists to exercise
/// the boundary-maximizer claim, not to establish the value.
inline MStarResult mstar_value(const GramSpec& g, bool run_numeric = true,
                               std::uint64_t seed = kDefaultSeed) {
    MStarResult res;
    res.exact = opnorm_inf1_value(g);
    if (!run_numeric || g.base.p > 3) return res;

    const int m = g.base.m;
    const double n = std::exp2(m);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> a(m), grad(m), trial(m);
    double best = 0, best_norm = 0;
    for (int restart = 0; restart < 32; ++restart) {
        double norm2 = 0;
        for (auto& x : a) {
            x = gauss(rng);
            norm2 += x * x;
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : a) x *= inv;
        double f = detail::sphere_objective(a, m, &grad);
        double step = 0.5;
        for (int it = 0; it < 500 && step > 1e-10; ++it) {
            double g2 = 0;
            for (double v : grad) g2 += v * v;
            if (g2 == 0) break;
            const double gscale = step / std::sqrt(g2);
            double t2 = 0;
            for (int j = 0; j < m; ++j) {
                trial[j] = a[j] + gscale * grad[j];
                t2 += trial[j] * trial[j];
            }
            const double tinv = 1.0 / std::sqrt(t2);
            for (auto& x : trial) x *= tinv;
            const double ftrial = detail::sphere_objective(trial, m, nullptr);
            if (ftrial > f) {
                a = trial;
                f = detail::sphere_objective(a, m, &grad);
            } else {
                step *= 0.5;
            }
        }
        if (n * f > best) {
            best = n * f;
            double an = 0;
            for (double v : a) an += v * v;
            best_norm = std::sqrt(an);
        }
    }
    res.numeric_ran = true;
    res.numeric_best = best;
    res.argmax_norm = best_norm;
    return res;
}

struct ParsevalReport {
    bool pass = false;
    bool exact = false;
    double lhs = 0;  // sum over b in U_m of (a^T b)^2
    double rhs = 0;  // 2^m * ||a||_2^2
    BigRat lhs_exact;
    BigRat rhs_exact;
};

/// Checks sum_{b in U_m} (a^T b)^2 = 2^m ||a||_2^2 by streaming all b.
inline ParsevalReport parseval_identity_check(const GramSpec& g, std::span<const double> a,
                                              double rel_tol = 1e-12, int p_cap = 12) {
    const int m = g.base.m;
    if (g.base.p > p_cap)
        throw budget_error("parseval_identity_check: p exceeds cap " + std::to_string(p_cap));
    if (static_cast<int>(a.size()) != m)
        throw std::invalid_argument("parseval_identity_check: a must have length m");
    const std::uint64_t n = std::uint64_t{1} << m;
    ParsevalReport rep;
    double lhs = 0, norm2 = 0;
    for (double v : a) norm2 += v * v;
    for (std::uint64_t b = 0; b < n; ++b) {
        double dot = 0;
        for (int j = 0; j < m; ++j) dot += ((b >> (m - 1 - j)) & 1u) ? -a[j] : a[j];
        lhs += dot * dot;
    }
    rep.lhs = lhs;
    rep.rhs = static_cast<double>(n) * norm2;
    const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
    rep.pass = scale == 0 ? true : std::abs(rep.lhs - rep.rhs) <= rel_tol * scale;
    return rep;
}

/// Exact-rational overload; the identity must hold with equality.
inline ParsevalReport parseval_identity_check(const GramSpec& g,
                                              const std::vector<BigRat>& a, int p_cap = 12) {
    const int m = g.base.m;
    if (g.base.p > p_cap)
        throw budget_error("parseval_identity_check: p exceeds cap " + std::to_string(p_cap));
    if (static_cast<int>(a.size()) != m)
        throw std::invalid_argument("parseval_identity_check: a must have length m");
    const std::uint64_t n = std::uint64_t{1} << m;
    ParsevalReport rep;
    rep.exact = true;
    BigRat lhs = 0, norm2 = 0;
    for (const auto& v : a) norm2 += v * v;
    for (std::uint64_t b = 0; b < n; ++b) {
        BigRat dot = 0;
        for (int j = 0; j < m; ++j) {
            if ((b >> (m - 1 - j)) & 1u)
                dot -= a[j];
            else
                dot += a[j];
        }
        lhs += dot * dot;
    }
    rep.lhs_exact = lhs;
    rep.rhs_exact = BigRat(BigInt(1) << m) * norm2;
    rep.lhs = to_double(rep.lhs_exact);
    rep.rhs = to_double(rep.rhs_exact);
    rep.pass = rep.lhs_exact == rep.rhs_exact;
    return rep;
}

struct GramRatio {
    bool exact_valid = false;
    BigRat exact;        // n / ||V||_{inf,1}, only when exact_valid
    double value = 0;    // float view (from the exact value, or log space beyond p=64)
    double asymptotic = 0;      // sqrt(pi / 4p)
    double rel_deviation = 0;   // |value/asymptotic - 1|
};

/// ||M||_{inf,1} / ||M||_1 for the gram family, with the asymptotic comparison.
inline GramRatio ratio(const GramSpec& g) {
    GramRatio r;
    const int p = g.base.p;
    if (p <= 64) {
        r.exact_valid = true;
        r.exact = BigRat(opnorm_inf1_value(g), l1_closed(g));
        r.value = to_double(r.exact);
    } else {
        const double m = 2.0 * p + 1.0;
        const double lg = m - 1.0 - std::log2(p + 1.0) - log2_binomial(m, p + 1.0);
        r.value = std::exp2(lg);
    }
    r.asymptotic = std::sqrt(std::numbers::pi / (4.0 * p));
    r.rel_deviation = std::abs(r.value / r.asymptotic - 1.0);
    return r;
}

/// Materialized section for small p, used by oracle tests.
inline DenseMatrix dense(const GramSpec& g, std::uint64_t cap = kDenseSectionCap) {
    const std::uint64_t n = g.base.row_count_u64();
    if (n > cap) throw budget_error("gram dense: 2^m exceeds cap " + std::to_string(cap));
    DenseMatrix M(static_cast<int>(n), static_cast<int>(n));
    for (std::uint64_t i = 0; i < n; ++i)
        for (std::uint64_t j = 0; j < n; ++j)
            M.at(static_cast<int>(i), static_cast<int>(j)) = entry(g, i, j);
    return M;
}

}  // namespace rkstab
