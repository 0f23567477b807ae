#include "rkstab/finite_norms.hpp"
#include "rkstab/gram.hpp"
#include "rkstab/sign_matrix.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <random>
#include <vector>

using namespace rkstab;

namespace {

DenseMatrix sign_matrix_dense(int p) {
    const SignMatrixSpec spec(p);
    DenseMatrix M(static_cast<int>(spec.row_count_u64()), spec.m);
    for (std::uint64_t i = 0; i < spec.row_count_u64(); ++i) {
        const SignVector v = row(spec, i);
        for (int j = 0; j < spec.m; ++j) M.at(static_cast<int>(i), j) = v[j];
    }
    return M;
}

// Naive oracle: full 2^cols enumeration with fresh multiplications per u.
BigRat opnorm_naive(const DenseMatrix& M) {
    BigRat best = 0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << M.cols); ++bits) {
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

DenseMatrix equicorrelation(int k, const BigRat& rho) {
    DenseMatrix M(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) M.at(i, j) = i == j ? BigRat(1) : rho;
    return M;
}

}  // namespace

TEST_CASE("entrywise l1 of explicit matrices") {
    REQUIRE(l1_entrywise(sign_matrix_dense(1)) == 24);
    REQUIRE(l1_entrywise(DenseMatrix::identity(2)) == 2);
    const GramSpec g(1);
    REQUIRE(l1_entrywise(dense(g)) == 96);  // 64 popcount entries summed
}

TEST_CASE("brute-force (inf,1) norm with witnesses") {
    SECTION("sign matrix p=1") {
        const NormReport rep = opnorm_inf1_bruteforce(sign_matrix_dense(1));
        REQUIRE(rep.opnorm_inf1 == 12);
        REQUIRE(rep.witness_u == std::vector<int>{1, 1, 1});
        REQUIRE(rep.method == NormMethod::vertex_enumeration);
    }
    SECTION("identity: ||I u||_1 = k for every sign vector") {
        for (int k : {1, 2, 5, 8}) {
            const NormReport rep = opnorm_inf1_bruteforce(DenseMatrix::identity(k));
            REQUIRE(rep.opnorm_inf1 == k);
            REQUIRE(rep.witness_u == std::vector<int>(k, 1));
        }
    }
    SECTION("gram matrix p=1 reaches n^2") {
        const NormReport rep = opnorm_inf1_bruteforce(dense(GramSpec(1)));
        REQUIRE(rep.opnorm_inf1 == 64);
        // the witness really attains the value
        BigRat total = 0;
        const DenseMatrix M = dense(GramSpec(1));
        for (int i = 0; i < 8; ++i) {
            BigRat dot = 0;
            for (int j = 0; j < 8; ++j) dot += M.at(i, j) * rep.witness_u[j];
            total += dot < 0 ? -dot : dot;
        }
        REQUIRE(total == rep.opnorm_inf1);
    }
}

TEST_CASE("Gray-code path equals naive re-multiplication on random matrices") {
    std::mt19937_64 rng(kDefaultSeed);
    std::uniform_int_distribution<int> dim(1, 12);
    std::uniform_int_distribution<int> num(-20, 20);
    std::uniform_int_distribution<int> den(1, 9);
    for (int t = 0; t < 50; ++t) {
        const int r = dim(rng), c = dim(rng);
        DenseMatrix M(r, c);
        for (auto& q : M.a) q = BigRat(num(rng), den(rng));
        const NormReport rep = opnorm_inf1_bruteforce(M);
        REQUIRE(rep.opnorm_inf1 == opnorm_naive(M));
        REQUIRE(rep.opnorm_inf1 <= rep.l1_entrywise);
    }
}

TEST_CASE("double-view enumeration matches the exact path") {
    std::mt19937_64 rng(kDefaultSeed + 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        DenseMatrix M(6, 6);
        for (auto& q : M.a) q = rat_from_double(gauss(rng));
        const NormReport exact = opnorm_inf1_bruteforce(M);
        const NormReportF64 fast = opnorm_inf1_bruteforce_f64(M.to_doubles(), 6, 6);
        REQUIRE_THAT(fast.opnorm_inf1,
                     Catch::Matchers::WithinRel(to_double(exact.opnorm_inf1), 1e-12));
        REQUIRE(fast.witness_u == exact.witness_u);
    }
}

TEST_CASE("norm ratio values") {
    REQUIRE(norm_ratio(DenseMatrix::identity(3)) == 1);
    REQUIRE(norm_ratio(dense(GramSpec(1))) == BigRat(2, 3));

    SECTION("equicorrelation k=3, rho=-1/2: ratio 2/3, PSD with eigenvalues {0, 3/2, 3/2}") {
        const DenseMatrix E = equicorrelation(3, BigRat(-1, 2));
        REQUIRE(norm_ratio(E) == BigRat(2, 3));
        Eigen::Matrix3d A;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) A(i, j) = E.at_double(i, j);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(A);
        REQUIRE_THAT(es.eigenvalues()(0), Catch::Matchers::WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(es.eigenvalues()(1), Catch::Matchers::WithinAbs(1.5, 1e-12));
        REQUIRE_THAT(es.eigenvalues()(2), Catch::Matchers::WithinAbs(1.5, 1e-12));
    }
}

TEST_CASE("norm ratio is scale invariant, exactly") {
    std::mt19937_64 rng(kDefaultSeed + 2);
    std::uniform_int_distribution<int> num(-9, 9);
    for (int t = 0; t < 10; ++t) {
        DenseMatrix M(4, 4);
        for (auto& q : M.a) q = num(rng);
        if (M.is_zero()) M.at(0, 0) = 1;
        DenseMatrix S = M;
        for (auto& q : S.a) q *= BigRat(3, 7);
        REQUIRE(norm_ratio(M) == norm_ratio(S));
    }
}

TEST_CASE("vertex optimality over random interior points") {
    std::mt19937_64 rng(kDefaultSeed + 3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_int_distribution<int> dim(2, 8);
    std::uniform_int_distribution<int> num(-10, 10);
    for (int t = 0; t < 100; ++t) {
        const int k = dim(rng);
        DenseMatrix M(k, k);
        for (auto& q : M.a) q = num(rng);
        const double opnorm = to_double(opnorm_inf1_bruteforce(M).opnorm_inf1);
        for (int s = 0; s < 100; ++s) {
            std::vector<double> u(k);
            for (auto& x : u) x = unif(rng);
            u[s % k] = (s % 2 == 0) ? 1.0 : -1.0;
            double total = 0;
            for (int i = 0; i < k; ++i) {
                double dot = 0;
                for (int j = 0; j < k; ++j) dot += M.at_double(i, j) * u[j];
                total += std::abs(dot);
            }
            REQUIRE(total <= opnorm + 1e-9);
        }
    }
}

TEST_CASE("error paths") {
    REQUIRE_THROWS_AS(norm_ratio(DenseMatrix(3, 3)), std::domain_error);
    DenseMatrix wide(2, 25);
    for (auto& q : wide.a) q = 1;
    REQUIRE_THROWS_AS(opnorm_inf1_bruteforce(wide), budget_error);
    try {
        opnorm_inf1_bruteforce(wide);
    } catch (const budget_error& e) {
        REQUIRE(std::string(e.what()).find("24") != std::string::npos);
    }
    REQUIRE_THROWS_AS(opnorm_inf1_bruteforce(DenseMatrix(0, 0)), std::invalid_argument);
}

TEST_CASE("rationals stay in lowest terms") {
    DenseMatrix M(1, 1);
    M.at(0, 0) = BigRat(6, 8);
    REQUIRE(boost::multiprecision::numerator(M.at(0, 0)) == 3);
    REQUIRE(boost::multiprecision::denominator(M.at(0, 0)) == 4);
    REQUIRE(rat_from_double(0.125) == BigRat(1, 8));
    REQUIRE(rat_from_double(-2.5) == BigRat(-5, 2));
}
