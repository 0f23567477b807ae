#pragma once

// Lazy infinite matrices: the two block-diagonal operators built from the
// sign-matrix and gram families (divergent entrywise mass, convergent
// operator norm), plus reference summable/unsummable kernels, finite
// sections, and PSD checks. Indices are 1-based throughout kernel space.

#include "rkstab/common.hpp"
#include "rkstab/finite_norms.hpp"
#include "rkstab/gram.hpp"
#include "rkstab/sign_matrix.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rkstab {

enum class BlockGrowth { linear, quadratic };  // p(h) = h or p(h) = h^2

inline const char* to_string(BlockGrowth g) {
    return g == BlockGrowth::linear ? "p(h)=h" : "p(h)=h^2";
}

struct BlockInfo {
    int h = 0;  // 1-based block index
    int p = 0;  // scale parameter of the underlying sign matrix
    int m = 0;
    std::uint64_t rows = 0, cols = 0;
    std::uint64_t row_begin = 0, col_begin = 0;  // 1-based global offsets
    BigRat scale;   // multiplies the integer-valued base entries
    double scale_f64 = 0;
    BigRat l1;      // exact entrywise mass of the block
    BigRat opnorm;  // exact (inf,1) norm of the block
};

struct BlockLocation {
    const BlockInfo* block = nullptr;
    std::uint64_t local = 0;  // 0-based within the block
};

/// Precomputed block layout; covers every block whose indices fit in the
/// supported range (cumulative size < 2^62).
struct BlockSchedule {
    std::vector<BlockInfo> blocks;

    BlockLocation locate_row(std::uint64_t gi) const { return locate(gi, /*row=*/true); }
    BlockLocation locate_col(std::uint64_t gj) const { return locate(gj, /*row=*/false); }

    /// Global row count through block t (block boundaries of the section grid).
    std::uint64_t boundary(int t) const {
        if (t < 1 || t > static_cast<int>(blocks.size()))
            throw std::out_of_range("BlockSchedule::boundary: block out of range");
        const BlockInfo& b = blocks[t - 1];
        return b.row_begin - 1 + b.rows;
    }

    /// The block index t such that boundary(t) == T, or 0 if T is not a boundary.
    int boundary_block(std::uint64_t T) const {
        for (const auto& b : blocks) {
            const std::uint64_t end = b.row_begin - 1 + b.rows;
            if (end == T) return b.h;
            if (end > T) break;
        }
        return 0;
    }

  private:
    BlockLocation locate(std::uint64_t g, bool row) const {
        if (g == 0) throw std::out_of_range("BlockSchedule: indices are 1-based");
        for (const auto& b : blocks) {
            const std::uint64_t begin = row ? b.row_begin : b.col_begin;
            const std::uint64_t size = row ? b.rows : b.cols;
            if (g >= begin && g < begin + size) return {&b, g - begin};
        }
        throw std::out_of_range("BlockSchedule: index beyond supported block range");
    }
};

struct KernelHandle {
    std::string name;
    bool symmetric = false;
    bool psd_by_construction = false;
    std::function<double(std::uint64_t, std::uint64_t)> entry;        // 1-based
    std::function<BigRat(std::uint64_t, std::uint64_t)> entry_exact;  // may be empty
    std::optional<BlockSchedule> schedule;
    std::function<double(std::uint64_t)> tail_mass_bound;  // |K| mass beyond the T-section
    std::optional<double> total_mass;                      // closed form, when summable
};

namespace detail {

inline int eval_growth(BlockGrowth g, int h) { return g == BlockGrowth::linear ? h : h * h; }

inline std::vector<BlockInfo> build_blocks(BlockGrowth growth, bool square) {
    constexpr std::uint64_t kIndexLimit = std::uint64_t{1} << 62;
    std::vector<BlockInfo> blocks;
    std::uint64_t row_at = 1, col_at = 1;
    for (int h = 1;; ++h) {
        const int p = eval_growth(growth, h);
        const int m = 2 * p + 1;
        if (m >= 62) break;
        BlockInfo b;
        b.h = h;
        b.p = p;
        b.m = m;
        b.rows = std::uint64_t{1} << m;
        b.cols = square ? b.rows : static_cast<std::uint64_t>(m);
        if (row_at + b.rows > kIndexLimit || col_at + b.cols > kIndexLimit) break;
        b.row_begin = row_at;
        b.col_begin = col_at;
        const SignMatrixSpec spec(p);
        const BigInt v_l1 = entrywise_l1(spec);
        const BigInt v_op = opnorm_inf1_closed(spec);
        if (square) {
            // Gram block scaled by 1/(h ||M||_1): mass 1/h, norm n/(h ||V||_{inf,1}).
            const BigInt m_l1 = (BigInt(1) << m) * v_op;
            b.scale = BigRat(BigInt(1), BigInt(h) * m_l1);
            b.l1 = BigRat(BigInt(1), BigInt(h));
            b.opnorm = BigRat(BigInt(1) << (2 * m), BigInt(h) * m_l1);
        } else {
            // Sign-matrix block scaled by 1/(p m n): mass 1/p.
            b.scale = BigRat(BigInt(1), BigInt(p) * v_l1);
            b.l1 = BigRat(BigInt(1), BigInt(p));
            b.opnorm = BigRat(v_op, BigInt(p) * v_l1);
        }
        b.scale_f64 = to_double(b.scale);
        row_at += b.rows;
        col_at += b.cols;
        blocks.push_back(std::move(b));
    }
    return blocks;
}

inline int sign_entry(const BlockInfo& b, std::uint64_t li, std::uint64_t lj) {
    return ((li >> (b.m - 1 - static_cast<int>(lj))) & 1u) == 0 ? 1 : -1;
}

inline std::int64_t gram_entry_int(const BlockInfo& b, std::uint64_t li, std::uint64_t lj) {
    return static_cast<std::int64_t>(b.m) - 2 * std::popcount(li ^ lj);
}

}  // namespace detail

/// The non-symmetric block operator: block h is the sign matrix for
/// p = p(h), scaled so its entrywise mass is exactly 1/p. Divergent total
/// mass, convergent operator norm. Not a kernel (rectangular blocks), so
/// psd_check refuses its sections.
inline KernelHandle counterexample_v(BlockGrowth growth = BlockGrowth::linear) {
    KernelHandle k;
    k.name = "counterexample-v";
    k.symmetric = false;
    k.psd_by_construction = false;
    BlockSchedule sched{detail::build_blocks(growth, /*square=*/false)};
    auto exact = [sched](std::uint64_t i, std::uint64_t j) -> BigRat {
        const BlockLocation ri = sched.locate_row(i);
        const BlockLocation cj = sched.locate_col(j);
        if (ri.block->h != cj.block->h) return BigRat(0);
        return BigRat(detail::sign_entry(*ri.block, ri.local, cj.local)) * ri.block->scale;
    };
    k.entry_exact = exact;
    k.entry = [exact](std::uint64_t i, std::uint64_t j) { return to_double(exact(i, j)); };
    k.schedule = std::move(sched);
    return k;
}

/// The symmetric PSD block operator: block h is the gram matrix for
/// p = p(h) scaled by 1/(h ||M||_1), so block masses are exactly 1/h
/// (harmonic, divergent) while block norms shrink fast enough to sum.
inline KernelHandle counterexample_s(BlockGrowth growth = BlockGrowth::linear) {
    KernelHandle k;
    k.name = "counterexample-s";
    k.symmetric = true;
    k.psd_by_construction = true;
    BlockSchedule sched{detail::build_blocks(growth, /*square=*/true)};
    auto exact = [sched](std::uint64_t i, std::uint64_t j) -> BigRat {
        const BlockLocation ri = sched.locate_row(i);
        const BlockLocation cj = sched.locate_col(j);
        if (ri.block->h != cj.block->h) return BigRat(0);
        return BigRat(detail::gram_entry_int(*ri.block, ri.local, cj.local)) * ri.block->scale;
    };
    k.entry_exact = exact;
    k.entry = [exact](std::uint64_t i, std::uint64_t j) { return to_double(exact(i, j)); };
    k.schedule = std::move(sched);
    return k;
}

/// K_ij = alpha^max(i,j), 0 < alpha < 1: summable (hence stable), with
/// closed-form total mass sum_k alpha^k (2k-1) and a geometric tail bound.
inline KernelHandle stable_spline(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("stable_spline: alpha must be in (0,1)");
    KernelHandle k;
    k.name = "stable-spline";
    k.symmetric = true;
    k.psd_by_construction = true;
    k.entry = [alpha](std::uint64_t i, std::uint64_t j) {
        if (i == 0 || j == 0) throw std::out_of_range("stable_spline: indices are 1-based");
        return std::pow(alpha, static_cast<double>(std::max(i, j)));
    };
    const double om = 1.0 - alpha;
    k.total_mass = 2.0 * alpha / (om * om) - alpha / om;
    k.tail_mass_bound = [alpha, om](std::uint64_t T) {
        // sum_{k>T} alpha^k (2k-1) = 2 S1(T) - S0(T)
        const double aT1 = std::pow(alpha, static_cast<double>(T + 1));
        const double s0 = aT1 / om;
        const double s1 = aT1 * ((T + 1.0) - T * alpha) / (om * om);
        return 2.0 * s1 - s0;
    };
    return k;
}

/// K_ij = c > 0: every finite section is PSD, but the all-ones input makes
/// the truncated outputs grow like c T^2 -- the canonical unstable control.
inline KernelHandle constant_kernel(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("constant_kernel: c must be > 0");
    KernelHandle k;
    k.name = "constant";
    k.symmetric = true;
    k.psd_by_construction = true;
    k.entry = [c](std::uint64_t i, std::uint64_t j) {
        if (i == 0 || j == 0) throw std::out_of_range("constant_kernel: indices are 1-based");
        return c;
    };
    k.entry_exact = [c](std::uint64_t i, std::uint64_t j) -> BigRat {
        if (i == 0 || j == 0) throw std::out_of_range("constant_kernel: indices are 1-based");
        return rat_from_double(c);
    };
    return k;
}

struct FiniteSection {
    std::uint64_t T = 0;
    DenseMatrix matrix;
    bool symmetric = false;
};

/// Leading T x T section, exact when the handle has exact entries.
inline FiniteSection finite_section(const KernelHandle& k, std::uint64_t T,
                                    std::uint64_t cap = kDenseSectionCap) {
    if (T < 1) throw std::invalid_argument("finite_section: T must be >= 1");
    if (T > cap) throw budget_error("finite_section: T exceeds dense cap " + std::to_string(cap));
    FiniteSection s;
    s.T = T;
    s.symmetric = k.symmetric;
    s.matrix = DenseMatrix(static_cast<int>(T), static_cast<int>(T));
    for (std::uint64_t i = 1; i <= T; ++i)
        for (std::uint64_t j = 1; j <= T; ++j)
            s.matrix.at(static_cast<int>(i - 1), static_cast<int>(j - 1)) =
                k.entry_exact ? k.entry_exact(i, j) : rat_from_double(k.entry(i, j));
    return s;
}

struct PsdReport {
    bool pass = false;
    double min_eigenvalue = 0;
    double scale = 1;  // max(1, spectral radius)
};

/// Symmetric eigensolve on the section; passes iff the smallest eigenvalue
/// is >= -tol * max(1, spectral scale). Symmetry is re-verified first and
/// non-symmetric sections are a contract violation.
inline PsdReport psd_check(const FiniteSection& s, double tol = 1e-8) {
    if (!s.symmetric)
        throw std::invalid_argument("psd_check: section does not come from a symmetric kernel");
    const int n = s.matrix.rows;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (s.matrix.at(i, j) != s.matrix.at(j, i)) {
                const double d = std::abs(s.matrix.at_double(i, j) - s.matrix.at_double(j, i));
                const double m = std::max({1.0, std::abs(s.matrix.at_double(i, j)),
                                           std::abs(s.matrix.at_double(j, i))});
                if (d > 1e-14 * m)
                    throw std::invalid_argument("psd_check: section is not symmetric");
            }
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = s.matrix.at_double(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    PsdReport rep;
    rep.min_eigenvalue = es.eigenvalues().minCoeff();
    rep.scale = std::max(1.0, std::max(std::abs(es.eigenvalues().minCoeff()),
                                       std::abs(es.eigenvalues().maxCoeff())));
    rep.pass = rep.min_eigenvalue >= -tol * rep.scale;
    return rep;
}

}  // namespace rkstab
