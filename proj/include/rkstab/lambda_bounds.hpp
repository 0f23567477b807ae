#pragma once

// Upper bounds on lambda(k) = min over k x k PSD matrices of
// ||M||_{inf,1} / ||M||_1. Exact values are an open nonconvex problem, so
// everything here reports upper bounds and says which search produced them.
// The gram family drives the bound to zero as k grows.

#include "rkstab/common.hpp"
#include "rkstab/finite_norms.hpp"
#include "rkstab/gram.hpp"

#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rkstab {

enum class LambdaMethod { exhaustive, family_scan, random_search, gram_embedding, fig1_curve };

inline const char* to_string(LambdaMethod m) {
    switch (m) {
        case LambdaMethod::exhaustive: return "exhaustive";
        case LambdaMethod::family_scan: return "family_scan";
        case LambdaMethod::random_search: return "random_search";
        case LambdaMethod::gram_embedding: return "gram_embedding";
        case LambdaMethod::fig1_curve: return "fig1_curve";
    }
    return "?";
}

struct LambdaBoundRecord {
    int k = 0;
    bool exact = false;
    BigRat bound_exact;  // valid only when exact
    double bound = 1.0;
    LambdaMethod method = LambdaMethod::exhaustive;
    std::string witness_desc;
    std::optional<DenseMatrix> witness;  // kept for k <= 12
};

struct LambdaSearchOptions {
    int samples = 10000;      // random PSD draws
    int family_steps = 200;   // equicorrelation grid resolution
    std::uint64_t seed = kDefaultSeed;
};

namespace detail {

inline DenseMatrix equicorrelation(int k, const BigRat& rho) {
    DenseMatrix M(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) M.at(i, j) = i == j ? BigRat(1) : rho;
    return M;
}

// Eigenvalues of (1-rho) I + rho J are 1-rho and 1+(k-1)rho.
inline bool equicorrelation_psd(int k, const BigRat& rho) {
    return rho <= 1 && BigRat(1) + BigRat(k - 1) * rho >= 0;
}

}  // namespace detail

/// Best (smallest) norm ratio found over random PSD samples, the
/// equicorrelation family, and embedded gram matrices. An upper bound on
/// lambda(k), never claimed tight. Deterministic given the seed.
inline LambdaBoundRecord lambda_upper_search(int k, const LambdaSearchOptions& opts = {}) {
    if (k < 1) throw std::invalid_argument("lambda_upper_search: k must be >= 1");
    if (k > 12)
        throw budget_error(
            "lambda_upper_search: k > 12 exceeds the enumeration budget; "
            "use the gram-family bounds (lambda_vanishes_evidence) instead");

    LambdaBoundRecord rec;
    rec.k = k;

    // For k <= 2 every PSD matrix attains ratio 1: pick u with
    // u1 u2 = sign(M12); then ||M u||_1 = ||M||_1.
    if (k <= 2) {
        rec.exact = true;
        rec.bound_exact = 1;
        rec.bound = 1.0;
        rec.method = LambdaMethod::exhaustive;
        rec.witness_desc = "identity";
        rec.witness = DenseMatrix::identity(k);
        return rec;
    }

    bool have_exact = false;
    BigRat best_exact = 1;
    double best = 1.0 + 1e-15;
    LambdaMethod best_method = LambdaMethod::exhaustive;
    std::string best_desc = "identity";
    DenseMatrix best_witness = DenseMatrix::identity(k);

    // (a) Equicorrelation family, exact arithmetic on a rational rho grid.
    {
        const BigRat lo(-1, k - 1);
        const BigRat span = BigRat(1) - lo;
        for (int t = 0; t <= opts.family_steps; ++t) {
            const BigRat rho = lo + span * t / opts.family_steps;
            if (!detail::equicorrelation_psd(k, rho)) continue;
            DenseMatrix M = detail::equicorrelation(k, rho);
            const BigRat r = norm_ratio(M);
            if (to_double(r) < best) {
                best = to_double(r);
                have_exact = true;
                best_exact = r;
                best_method = LambdaMethod::family_scan;
                best_desc = "equicorrelation rho=" + rat_string(rho);
                best_witness = std::move(M);
            }
        }
    }

    // (b) Embedded gram matrix when it fits: zero-padding preserves both norms.
    if (k >= 8) {
        const GramSpec g(1);
        DenseMatrix M(k, k);
        const DenseMatrix m8 = dense(g);
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) M.at(i, j) = m8.at(i, j);
        const BigRat r = norm_ratio(M);
        if (to_double(r) < best) {
            best = to_double(r);
            have_exact = true;
            best_exact = r;
            best_method = LambdaMethod::gram_embedding;
            best_desc = "gram p=1 zero-padded to k=" + std::to_string(k);
            best_witness = std::move(M);
        }
    }

    // (c) Random PSD samples M = A A^T, double arithmetic for the scan; the
    // winner would be re-checked exactly by the caller via norm_ratio.
    {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> A(static_cast<std::size_t>(k) * k);
        std::vector<double> M(static_cast<std::size_t>(k) * k);
        for (int s = 0; s < opts.samples; ++s) {
            for (auto& x : A) x = gauss(rng);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    double dot = 0;
                    for (int t = 0; t < k; ++t) dot += A[i * k + t] * A[j * k + t];
                    M[i * k + j] = dot;
                }
            const NormReportF64 rep = opnorm_inf1_bruteforce_f64(M, k, k);
            if (rep.l1_entrywise == 0) continue;
            const double r = rep.opnorm_inf1 / rep.l1_entrywise;
            if (r < best) {
                best = r;
                have_exact = false;
                best_method = LambdaMethod::random_search;
                best_desc = "random AA^T sample " + std::to_string(s);
                best_witness = DenseMatrix::from_doubles(k, k, M);
            }
        }
    }

    rec.exact = have_exact;
    if (have_exact) {
        rec.bound_exact = best_exact;
        rec.bound = to_double(best_exact);
    } else {
        rec.bound = best;
    }
    rec.method = best_method;
    rec.witness_desc = best_desc;
    rec.witness = std::move(best_witness);
    return rec;
}

/// Zero-pads the witness to size k+1 (diag(0, M)); both norms are preserved
/// exactly, which is what makes lambda(k) monotone non-increasing.
inline LambdaBoundRecord embedding_monotonicity(const LambdaBoundRecord& r) {
    if (!r.witness.has_value())
        throw std::invalid_argument("embedding_monotonicity: record has no explicit witness");
    const DenseMatrix& W = *r.witness;
    DenseMatrix P(W.rows + 1, W.cols + 1);
    for (int i = 0; i < W.rows; ++i)
        for (int j = 0; j < W.cols; ++j) P.at(i + 1, j + 1) = W.at(i, j);

    const NormReport orig = opnorm_inf1_bruteforce(W);
    const NormReport padded = opnorm_inf1_bruteforce(P);
    if (orig.l1_entrywise != padded.l1_entrywise || orig.opnorm_inf1 != padded.opnorm_inf1)
        throw std::logic_error("embedding_monotonicity: zero padding changed a norm");

    LambdaBoundRecord out = r;
    out.k = r.k + 1;
    out.method = LambdaMethod::gram_embedding;
    out.witness_desc = "diag(0, " + r.witness_desc + ")";
    out.witness = std::move(P);
    return out;
}

struct Fig1Row {
    int p = 0;
    BigInt n;          // 2^(2p+1)
    double bound = 0;  // sqrt(pi) / sqrt(2 log2(n) - 2) = sqrt(pi / 4p)
};

/// The piecewise-constant upper-bound curve for lambda(n) at n = 2^(2p+1).
inline std::vector<Fig1Row> fig1_curve(int p_max) {
    if (p_max < 1) throw std::invalid_argument("fig1_curve: p_max must be >= 1");
    std::vector<Fig1Row> rows;
    rows.reserve(p_max);
    for (int p = 1; p <= p_max; ++p)
        rows.push_back({p, BigInt(1) << (2 * p + 1),
                        std::sqrt(std::numbers::pi / (4.0 * p))});
    return rows;
}

struct LambdaEvidenceRow {
    int p = 0;
    BigInt n;
    double bound = 0;   // gram ratio at n(p)
    bool exact_valid = false;
    BigRat exact;
};

struct LambdaEvidence {
    std::vector<LambdaEvidenceRow> rows;
    bool monotone = false;
    int first_p_below_0_1 = -1;
    int first_p_below_0_01 = -1;
};

namespace detail {

inline double lambda_bound_at(int p) { return ratio(GramSpec(p)).value; }

// Smallest p with gram ratio < threshold: exact rational comparison while
// the exact closed form is in play (p <= 64), log-space beyond.
inline int first_p_below(double threshold, int scan_limit = 10'000'000) {
    const BigRat th = rat_from_double(threshold);
    const double log2_th = std::log2(threshold);
    for (int p = 1; p <= scan_limit; ++p) {
        if (p <= 64) {
            if (ratio(GramSpec(p)).exact < th) return p;
        } else {
            const double m = 2.0 * p + 1.0;
            const double lg = m - 1.0 - std::log2(p + 1.0) - log2_binomial(m, p + 1.0);
            if (lg < log2_th) return p;
        }
    }
    return -1;
}

}  // namespace detail

/// Tabulates the gram-family upper bounds on lambda at n(p) and locates the
/// first p where they drop below 0.1 and 0.01. The bounds vanish, which is
/// the whole point.
inline LambdaEvidence lambda_vanishes_evidence(int p_max) {
    if (p_max < 3) throw std::invalid_argument("lambda_vanishes_evidence: p_max must be >= 3");
    LambdaEvidence ev;
    ev.rows.reserve(p_max);
    for (int p = 1; p <= p_max; ++p) {
        const GramRatio r = ratio(GramSpec(p));
        LambdaEvidenceRow row{p, BigInt(1) << (2 * p + 1), r.value, r.exact_valid, r.exact};
        ev.rows.push_back(std::move(row));
    }
    ev.monotone = true;
    for (std::size_t i = 1; i < ev.rows.size(); ++i) {
        const auto& a = ev.rows[i - 1];
        const auto& b = ev.rows[i];
        const bool ok = (a.exact_valid && b.exact_valid) ? b.exact <= a.exact
                                                         : b.bound <= a.bound;
        if (!ok) ev.monotone = false;
    }
    ev.first_p_below_0_1 = detail::first_p_below(0.1);
    ev.first_p_below_0_01 = detail::first_p_below(0.01);
    return ev;
}

}  // namespace rkstab
