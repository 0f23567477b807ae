#pragma once

// The n x m sign matrices V (n = 2^m, m = 2p+1) whose rows enumerate every
// +-1 pattern of length m, together with their exact and asymptotic norms.
// Rows are never stored: everything streams off the binary row encoding.

#include "rkstab/common.hpp"

#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace rkstab {

struct SignApplyOptions {
    bool materialize = false;
    std::uint64_t row_cap = kRowMaterializeCap;
};

struct SignApplyResult {
    double l1 = 0;
    std::vector<double> image;  // V*u, filled only when materialize is set
};

struct SignMatrixSpec {
    int p = 0;  // scale parameter, p >= 1
    int m = 0;  // column count, always 2p+1

    explicit SignMatrixSpec(int p_) : p(p_), m(2 * p_ + 1) {
        if (p_ < 1) throw std::invalid_argument("SignMatrixSpec: p must be >= 1");
    }

    BigInt row_count() const { return BigInt(1) << m; }
    bool rows_fit_u64() const { return m < 64; }
    std::uint64_t row_count_u64() const {
        if (!rows_fit_u64())
            throw std::out_of_range("SignMatrixSpec: 2^m exceeds machine index range");
        return std::uint64_t{1} << m;
    }

    /// ||V u||_1 for a real vector u of length m, by streaming row
    /// enumeration; never stores the matrix. For u in U_m this equals
    /// opnorm_inf1_closed. Accepting general real u is an extension beyond
    /// the sign-vector use the norm theory needs.
    SignApplyResult apply(std::span<const double> u, const SignApplyOptions& opts = {}) const {
        if (static_cast<int>(u.size()) != m)
            throw std::invalid_argument("apply: u must have length m");
        if (!rows_fit_u64() || row_count_u64() > opts.row_cap)
            throw budget_error("apply: 2^m rows exceed row cap " + std::to_string(opts.row_cap));
        const std::uint64_t n = row_count_u64();
        SignApplyResult res;
        if (opts.materialize) res.image.resize(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            double dot = 0;
            for (int j = 0; j < m; ++j) {
                const bool neg = (i >> (m - 1 - j)) & 1u;
                dot += neg ? -u[j] : u[j];
            }
            res.l1 += std::abs(dot);
            if (opts.materialize) res.image[i] = dot;
        }
        return res;
    }
};

using SignVector = std::vector<int>;  // entries are exactly +-1

/// Row i in binary-counting order: entry j is +1 when bit (m-1-j) of i is 0.
/// Row 0 is all +1, row 2^m-1 is all -1.
inline SignVector row(const SignMatrixSpec& spec, std::uint64_t i) {
    if (!spec.rows_fit_u64() || i >= spec.row_count_u64())
        throw std::out_of_range("row: index " + std::to_string(i) + " out of range");
    SignVector v(spec.m);
    for (int j = 0; j < spec.m; ++j)
        v[j] = ((i >> (spec.m - 1 - j)) & 1u) == 0 ? 1 : -1;
    return v;
}

/// Sum of |entries| = m * 2^m, exact.
inline BigInt entrywise_l1(const SignMatrixSpec& spec) {
    return BigInt(spec.m) << spec.m;
}

/// The (inf,1) operator norm, exact: 2 * sum_{h=0}^{p} C(m,h) (m-2h).
/// Also evaluated through the equivalent form 2(p+1) C(m,p+1); the two
/// paths must agree or the combinatorics are broken.
inline BigInt opnorm_inf1_closed(const SignMatrixSpec& spec) {
    BigInt sum = 0;
    for (int h = 0; h <= spec.p; ++h)
        sum += binomial(spec.m, h) * (spec.m - 2 * h);
    const BigInt primary = 2 * sum;
    const BigInt alternate = 2 * BigInt(spec.p + 1) * binomial(spec.m, spec.p + 1);
    if (primary != alternate)
        throw std::logic_error("opnorm_inf1_closed: the two closed forms disagree");
    return primary;
}

struct AsymptoticNorm {
    double log2_value = 0;  // always valid
    double value = 0;       // +inf when not representable as double
};

/// Normal-approximation value 2 * 2^m * sqrt(p/pi), evaluated in log space.
inline AsymptoticNorm opnorm_inf1_asymptotic(const SignMatrixSpec& spec) {
    const double lg = 1.0 + spec.m +
                      0.5 * std::log2(static_cast<double>(spec.p) / std::numbers::pi);
    return {lg, std::exp2(lg)};
}

struct OrthogonalityReport {
    bool pass = false;
    std::int64_t max_offdiag_abs = 0;
    std::uint64_t rows = 0;
};

/// Streams all rows and checks V^T V = 2^m I_m in integer arithmetic.
inline OrthogonalityReport orthogonality_check(const SignMatrixSpec& spec,
                                               int p_cap = kOrthogonalityPCap) {
    if (spec.p > p_cap)
        throw budget_error("orthogonality_check: p exceeds cap " + std::to_string(p_cap));
    const std::uint64_t n = spec.row_count_u64();
    const int m = spec.m;
    std::vector<std::int64_t> gram(static_cast<std::size_t>(m) * m, 0);
    std::vector<int> v(m);
    for (std::uint64_t i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) v[j] = ((i >> (m - 1 - j)) & 1u) == 0 ? 1 : -1;
        for (int j = 0; j < m; ++j)
            for (int k = j; k < m; ++k) gram[j * m + k] += v[j] * v[k];
    }
    OrthogonalityReport rep;
    rep.rows = n;
    rep.pass = true;
    const auto diag_expected = static_cast<std::int64_t>(n);
    for (int j = 0; j < m; ++j) {
        for (int k = j; k < m; ++k) {
            const std::int64_t g = gram[j * m + k];
            if (j == k) {
                if (g != diag_expected) rep.pass = false;
            } else {
                rep.max_offdiag_abs = std::max(rep.max_offdiag_abs, std::abs(g));
                if (g != 0) rep.pass = false;
            }
        }
    }
    return rep;
}

}  // namespace rkstab
