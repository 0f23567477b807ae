#pragma once

// The end-to-end traceability suite: one named check per lemma-level fact
// the library is built on, each validated against an independent oracle at
// desk scale. The CLI `verify` command runs these; tests reuse them.

#include "rkstab/common.hpp"
#include "rkstab/finite_norms.hpp"
#include "rkstab/gram.hpp"
#include "rkstab/kernels.hpp"
#include "rkstab/lambda_bounds.hpp"
#include "rkstab/sign_matrix.hpp"
#include "rkstab/stability.hpp"

#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace rkstab {

struct VerifyCheck {
    std::string name;
    std::function<bool(std::string& detail)> run;
};

namespace detail {

// Naive (inf,1) oracle: full 2^cols enumeration with fresh multiplications,
// independent of the Gray-code path it validates.
inline BigRat opnorm_naive(const DenseMatrix& M) {
    BigRat best = 0;
    const std::uint64_t count = std::uint64_t{1} << M.cols;
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        BigRat total = 0;
        for (int i = 0; i < M.rows; ++i) {
            BigRat dot = 0;
            for (int j = 0; j < M.cols; ++j) {
                if ((bits >> j) & 1u)
                    dot -= M.at(i, j);
                else
                    dot += M.at(i, j);
            }
            total += dot < 0 ? -dot : dot;
        }
        if (total > best) best = total;
    }
    return best;
}

inline DenseMatrix sign_matrix_dense(int p) {
    const SignMatrixSpec spec(p);
    const std::uint64_t n = spec.row_count_u64();
    DenseMatrix M(static_cast<int>(n), spec.m);
    for (std::uint64_t i = 0; i < n; ++i) {
        const SignVector v = row(spec, i);
        for (int j = 0; j < spec.m; ++j) M.at(static_cast<int>(i), j) = v[j];
    }
    return M;
}

}  // namespace detail

inline std::vector<VerifyCheck> standard_checks() {
    std::vector<VerifyCheck> checks;

    checks.push_back({"Lemma 1 (vertex optimality, p=1,2)", [](std::string& d) {
        std::mt19937_64 rng(kDefaultSeed);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int p : {1, 2}) {
            const SignMatrixSpec spec(p);
            const double closed = to_double(BigRat(opnorm_inf1_closed(spec)));
            for (int t = 0; t < 200; ++t) {
                std::vector<double> u(spec.m);
                for (auto& x : u) x = unif(rng);
                u[t % spec.m] = (t % 2 == 0) ? 1.0 : -1.0;  // pin sup-norm to 1
                if (spec.apply(u).l1 > closed + 1e-9) {
                    d = "interior point beat the vertex maximum at p=" + std::to_string(p);
                    return false;
                }
            }
        }
        d = "200 random points per p stayed below the vertex maximum";
        return true;
    }});

    checks.push_back({"Lemma 2 (sign invariance, p=1..3)", [](std::string& d) {
        for (int p : {1, 2, 3}) {
            const SignMatrixSpec spec(p);
            const std::uint64_t n = spec.row_count_u64();
            double first = -1;
            for (std::uint64_t i = 0; i < n; ++i) {
                const SignVector sv = row(spec, i);
                std::vector<double> u(sv.begin(), sv.end());
                const double val = spec.apply(u).l1;
                if (first < 0) first = val;
                if (val != first) {
                    d = "||Vu||_1 varies across U_m at p=" + std::to_string(p);
                    return false;
                }
            }
        }
        d = "||Vu||_1 constant across all sign vectors";
        return true;
    }});

    checks.push_back({"Lemma 3 (closed form vs enumeration, p=1,2)", [](std::string& d) {
        const BigInt expected[] = {12, 60};
        for (int p : {1, 2}) {
            const BigInt closed = opnorm_inf1_closed(SignMatrixSpec(p));
            const NormReport brute = opnorm_inf1_bruteforce(detail::sign_matrix_dense(p));
            if (closed != expected[p - 1] || brute.opnorm_inf1 != BigRat(closed)) {
                d = "closed=" + closed.str() + " brute=" + rat_string(brute.opnorm_inf1) +
                    " at p=" + std::to_string(p);
                return false;
            }
        }
        d = "values 12 and 60, both paths";
        return true;
    }});

    checks.push_back({"Lemma 4 (normal approximation, p=10,50)", [](std::string& d) {
        auto deviation = [](int p) {
            const SignMatrixSpec spec(p);
            const double exact_log2 = log2_big(opnorm_inf1_closed(spec));
            const double asym_log2 = opnorm_inf1_asymptotic(spec).log2_value;
            return std::abs(std::exp2(exact_log2 - asym_log2) - 1.0);
        };
        const double d10 = deviation(10), d50 = deviation(50);
        std::ostringstream os;
        os << "relative deviation " << d10 << " at p=10, " << d50 << " at p=50";
        d = os.str();
        return d50 <= 0.05 && d50 < d10;
    }});

    checks.push_back({"Lemma 6 (column orthogonality, p=1..3)", [](std::string& d) {
        for (int p : {1, 2, 3}) {
            const auto rep = orthogonality_check(SignMatrixSpec(p));
            if (!rep.pass) {
                d = "V^T V != nI at p=" + std::to_string(p) +
                    ", max off-diagonal " + std::to_string(rep.max_offdiag_abs);
                return false;
            }
        }
        d = "V^T V = nI exactly (n = 8, 32, 128)";
        return true;
    }});

    checks.push_back({"Lemma 7 (Mn* >= Mn, p=1)", [](std::string& d) {
        const GramSpec g(1);
        const auto ms = mstar_value(g);
        const double n2 = to_double(BigRat(ms.exact));
        d = "numeric sphere max " + std::to_string(ms.numeric_best) + " vs n^2 = 64";
        return ms.numeric_ran && ms.numeric_best >= 0.999 * n2 &&
               ms.numeric_best <= n2 * (1 + 1e-9);
    }});

    checks.push_back({"Lemma 8 (boundary maximizer, p=1)", [](std::string& d) {
        const auto ms = mstar_value(GramSpec(1));
        d = "argmax norm " + std::to_string(ms.argmax_norm);
        return ms.numeric_ran && std::abs(ms.argmax_norm - 1.0) <= 1e-9;
    }});

    checks.push_back({"Lemma 9 (Parseval identity, p=1,2)", [](std::string& d) {
        std::mt19937_64 rng(kDefaultSeed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int p : {1, 2}) {
            const GramSpec g(p);
            for (int t = 0; t < 100; ++t) {
                std::vector<double> a(g.base.m);
                for (auto& x : a) x = gauss(rng);
                if (!parseval_identity_check(g, a).pass) {
                    d = "identity violated at p=" + std::to_string(p);
                    return false;
                }
            }
        }
        d = "sum_b (a^T b)^2 = n ||a||^2 for 100 random a per p";
        return true;
    }});

    checks.push_back({"Lemma 10 (gram ratio asymptotics, p<=50)", [](std::string& d) {
        const GramRatio r1 = ratio(GramSpec(1));
        if (!r1.exact_valid || r1.exact != BigRat(2, 3)) {
            d = "ratio at p=1 is not 2/3";
            return false;
        }
        if (ratio(GramSpec(50)).rel_deviation > 0.05) {
            d = "ratio at p=50 deviates from sqrt(pi/4p) by more than 5%";
            return false;
        }
        for (int p = 1; p < 10; ++p)
            if (ratio(GramSpec(p + 1)).exact >= ratio(GramSpec(p)).exact) {
                d = "ratios not strictly decreasing at p=" + std::to_string(p);
                return false;
            }
        d = "2/3 at p=1, within 5% of sqrt(pi/4p) at p=50, decreasing on 1..10";
        return true;
    }});

    checks.push_back({"Theorem Mn=n^2 (p=1)", [](std::string& d) {
        const GramSpec g(1);
        const DenseMatrix M = dense(g);
        const NormReport rep = opnorm_inf1_bruteforce(M);
        if (rep.opnorm_inf1 != 64 || opnorm_inf1_value(g) != 64) {
            d = "brute force got " + rat_string(rep.opnorm_inf1);
            return false;
        }
        const SignMatrixSpec spec(1);
        for (int col = 0; col < spec.m; ++col) {
            BigRat total = 0;
            for (int i = 0; i < 8; ++i) {
                BigRat dot = 0;
                for (int j = 0; j < 8; ++j)
                    dot += M.at(i, j) * row(spec, j)[col];
                total += dot < 0 ? -dot : dot;
            }
            if (total != 64) {
                d = "column " + std::to_string(col) + " of V is not a maximizer";
                return false;
            }
        }
        d = "brute force over 256 sign vectors gives 64; every V column attains it";
        return true;
    }});

    checks.push_back({"Theorem lambda_inf = 0 (gram evidence)", [](std::string& d) {
        const LambdaEvidence ev = lambda_vanishes_evidence(10);
        std::ostringstream os;
        os << "bounds drop below 0.1 at p=" << ev.first_p_below_0_1 << " and below 0.01 at p="
           << ev.first_p_below_0_01;
        d = os.str();
        return ev.monotone && ev.first_p_below_0_1 == 78 && ev.first_p_below_0_01 == 7854 &&
               ev.rows.front().exact == BigRat(2, 3);
    }});

    checks.push_back({"Counterexample 1 (block structure, p=1..10)", [](std::string& d) {
        const KernelHandle v = counterexample_v();
        for (int p = 1; p <= 10; ++p) {
            const BlockInfo& b = v.schedule->blocks[p - 1];
            if (b.l1 != BigRat(1, p)) {
                d = "block mass at p=" + std::to_string(p) + " is not 1/p";
                return false;
            }
            const SignMatrixSpec spec(p);
            if (b.opnorm != BigRat(opnorm_inf1_closed(spec),
                                   BigInt(p) * entrywise_l1(spec))) {
                d = "block operator norm mismatch at p=" + std::to_string(p);
                return false;
            }
        }
        d = "block masses 1/p and norms ||V||_{inf,1}/(pmn), exact";
        return true;
    }});

    checks.push_back({"Counterexample 2 (harmonic masses + PSD sections)", [](std::string& d) {
        const KernelHandle s = counterexample_s();
        const std::vector<std::uint64_t> blocks{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        const SummabilityProbe probe = summability_probe(s, blocks);
        if (probe.points.back().exact != BigRat(7381, 2520)) {
            d = "cumulative mass through block 10 is not H_10";
            return false;
        }
        for (std::uint64_t T : {std::uint64_t{8}, std::uint64_t{40}}) {
            if (!psd_check(finite_section(s, T)).pass) {
                d = "finite section T=" + std::to_string(T) + " failed the PSD check";
                return false;
            }
        }
        d = "masses are exact harmonic sums; sections through block 2 are PSD";
        return true;
    }});

    return checks;
}

/// Runs checks in order, one line each; returns the count of failures.
inline int run_checks(const std::vector<VerifyCheck>& checks, bool fail_fast,
                      std::ostream& out) {
    int failures = 0;
    for (const auto& c : checks) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        out << c.name << ": " << (ok ? "PASS" : "FAIL");
        if (!detail.empty()) out << " (" << detail << ")";
        out << "\n";
        if (!ok) {
            ++failures;
            if (fail_fast) break;
        }
    }
    return failures;
}

}  // namespace rkstab
