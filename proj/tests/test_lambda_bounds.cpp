#include "rkstab/lambda_bounds.hpp"
#include "rkstab/finite_norms.hpp"
#include "rkstab/gram.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace rkstab;

namespace {

// ratio < threshold by pure integer comparison: th_den * n < th_num_inv...
// spelled out: n/(2(p+1)C(m,p+1)) < num/den  <=>  den * n < num * 2(p+1)C(m,p+1)
bool gram_ratio_below(int p, const BigInt& num, const BigInt& den) {
    const int m = 2 * p + 1;
    return den * (BigInt(1) << m) < num * 2 * (p + 1) * binomial(m, p + 1);
}

}  // namespace

TEST_CASE("k = 1 and k = 2 are pinned at 1") {
    for (int k : {1, 2}) {
        const LambdaBoundRecord rec = lambda_upper_search(k);
        REQUIRE(rec.exact);
        REQUIRE(rec.bound_exact == 1);
        REQUIRE(rec.method == LambdaMethod::exhaustive);
        REQUIRE(rec.witness.has_value());
        REQUIRE(norm_ratio(*rec.witness) == 1);
    }
}

TEST_CASE("random 2x2 PSD matrices never drop below ratio 1") {
    std::mt19937_64 rng(kDefaultSeed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        double A[4];
        for (auto& x : A) x = gauss(rng);
        const double M[4] = {A[0] * A[0] + A[1] * A[1], A[0] * A[2] + A[1] * A[3],
                             A[2] * A[0] + A[3] * A[1], A[2] * A[2] + A[3] * A[3]};
        const auto rep = opnorm_inf1_bruteforce_f64(M, 2, 2);
        if (rep.l1_entrywise == 0) continue;
        REQUIRE(rep.opnorm_inf1 / rep.l1_entrywise >= 1.0 - 1e-9);
    }
}

TEST_CASE("k = 3: the equicorrelation witness reaches 2/3") {
    LambdaSearchOptions opts;
    opts.samples = 2000;
    const LambdaBoundRecord rec = lambda_upper_search(3, opts);
    REQUIRE(rec.bound <= 2.0 / 3.0 + 1e-12);
    REQUIRE(rec.bound >= 0.0);
    REQUIRE(rec.witness.has_value());
    if (rec.exact) {
        REQUIRE(rec.bound_exact <= BigRat(2, 3));
        REQUIRE(norm_ratio(*rec.witness) == rec.bound_exact);
    } else {
        REQUIRE(std::abs(to_double(norm_ratio(*rec.witness)) - rec.bound) <= 1e-10);
    }
}

TEST_CASE("k = 6: the family scan finds 3/5") {
    LambdaSearchOptions opts;
    opts.samples = 500;
    const LambdaBoundRecord rec = lambda_upper_search(6, opts);
    REQUIRE(rec.bound <= 0.6 + 1e-12);
    // confirmed independently: equicorrelation rho=-1/5 has opnorm 36/5, l1 12
    const NormReport check = opnorm_inf1_bruteforce([] {
        DenseMatrix E(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) E.at(i, j) = i == j ? BigRat(1) : BigRat(-1, 5);
        return E;
    }());
    REQUIRE(check.opnorm_inf1 == BigRat(36, 5));
    REQUIRE(check.l1_entrywise == 12);
}

TEST_CASE("search bounds are valid upper bounds with verifiable witnesses") {
    LambdaSearchOptions opts;
    opts.samples = 300;
    for (int k = 1; k <= 8; ++k) {
        const LambdaBoundRecord rec = lambda_upper_search(k, opts);
        REQUIRE(rec.bound >= 0.0);
        REQUIRE(rec.bound <= 1.0 + 1e-15);
        REQUIRE(rec.witness.has_value());
        const double reverify = to_double(norm_ratio(*rec.witness));
        REQUIRE(std::abs(reverify - rec.bound) <= 1e-10);
    }
}

TEST_CASE("search is deterministic given the seed") {
    LambdaSearchOptions opts;
    opts.samples = 200;
    opts.seed = 42;
    const LambdaBoundRecord a = lambda_upper_search(5, opts);
    const LambdaBoundRecord b = lambda_upper_search(5, opts);
    REQUIRE(a.bound == b.bound);
    REQUIRE(a.witness_desc == b.witness_desc);
    REQUIRE(a.method == b.method);
}

TEST_CASE("search argument validation") {
    REQUIRE_THROWS_AS(lambda_upper_search(0), std::invalid_argument);
    REQUIRE_THROWS_AS(lambda_upper_search(13), budget_error);
    try {
        lambda_upper_search(13);
    } catch (const budget_error& e) {
        REQUIRE(std::string(e.what()).find("gram") != std::string::npos);
    }
}

TEST_CASE("zero padding preserves both norms") {
    SECTION("the k=3 equicorrelation record carries to k=4") {
        LambdaSearchOptions opts;
        opts.samples = 0;
        const LambdaBoundRecord r3 = lambda_upper_search(3, opts);
        const LambdaBoundRecord r4 = embedding_monotonicity(r3);
        REQUIRE(r4.k == 4);
        REQUIRE(r4.bound == r3.bound);
        REQUIRE(norm_ratio(*r4.witness) == r3.bound_exact);
    }
    SECTION("identity 2x2 pads to 3x3 with ratio 1") {
        LambdaBoundRecord rec;
        rec.k = 2;
        rec.exact = true;
        rec.bound_exact = 1;
        rec.bound = 1.0;
        rec.witness_desc = "identity";
        rec.witness = DenseMatrix::identity(2);
        const LambdaBoundRecord padded = embedding_monotonicity(rec);
        REQUIRE(padded.k == 3);
        REQUIRE(norm_ratio(*padded.witness) == 1);
    }
    SECTION("the gram matrix pads to 9x9 with ratio 2/3") {
        LambdaBoundRecord rec;
        rec.k = 8;
        rec.exact = true;
        rec.bound_exact = BigRat(2, 3);
        rec.bound = to_double(rec.bound_exact);
        rec.witness_desc = "gram p=1";
        rec.witness = dense(GramSpec(1));
        const LambdaBoundRecord padded = embedding_monotonicity(rec);
        REQUIRE(padded.k == 9);
        REQUIRE(norm_ratio(*padded.witness) == BigRat(2, 3));
    }
    SECTION("records without witnesses are rejected") {
        LambdaBoundRecord rec;
        rec.k = 3;
        REQUIRE_THROWS_AS(embedding_monotonicity(rec), std::invalid_argument);
    }
}

TEST_CASE("upper-bound curve values and shape") {
    const auto rows = fig1_curve(50);
    REQUIRE(rows.size() == 50);
    REQUIRE(rows[0].p == 1);
    REQUIRE(rows[0].n == 8);
    REQUIRE_THAT(rows[0].bound, Catch::Matchers::WithinAbs(0.8862269, 1e-6));
    REQUIRE(rows[1].n == 32);
    REQUIRE_THAT(rows[1].bound, Catch::Matchers::WithinAbs(0.6266571, 1e-6));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        REQUIRE(rows[i].bound < rows[i - 1].bound);
        REQUIRE(rows[i].n == rows[i - 1].n * 4);
    }
    REQUIRE_THROWS_AS(fig1_curve(0), std::invalid_argument);

    SECTION("the curve dominates the exact gram ratio") {
        // asymptotic bound, so dominance from some p0 on; empirically p0 = 1
        for (int p = 1; p <= 64; ++p) {
            const GramRatio r = ratio(GramSpec(p));
            const double curve = p <= static_cast<int>(rows.size())
                                     ? rows[p - 1].bound
                                     : std::sqrt(std::numbers::pi / (4.0 * p));
            REQUIRE(r.value <= curve + 1e-15);
        }
    }
}

TEST_CASE("the gram-family evidence drives the bounds to zero") {
    const LambdaEvidence ev = lambda_vanishes_evidence(12);
    REQUIRE(ev.rows.size() == 12);
    REQUIRE(ev.rows[0].exact_valid);
    REQUIRE(ev.rows[0].exact == BigRat(2, 3));
    REQUIRE(ev.monotone);
    REQUIRE(ev.rows.back().bound < ev.rows.front().bound);

    SECTION("first crossings, against integer-arithmetic oracles") {
        // oracle: den * n < num * 2(p+1)C(m,p+1) exactly
        REQUIRE_FALSE(gram_ratio_below(77, 1, 10));
        REQUIRE(gram_ratio_below(78, 1, 10));
        REQUIRE(ev.first_p_below_0_1 == 78);
        REQUIRE(ev.first_p_below_0_01 == 7854);
        // the unadjusted asymptotic sqrt(pi/4p) crosses 0.1 one step later
        REQUIRE(std::sqrt(std::numbers::pi / (4.0 * 78)) > 0.1);
        REQUIRE(std::sqrt(std::numbers::pi / (4.0 * 79)) < 0.1);
    }
    SECTION("argument validation") {
        REQUIRE_THROWS_AS(lambda_vanishes_evidence(2), std::invalid_argument);
    }
}
