#pragma once

// Exact entrywise-l1 and (inf,1) norms of explicit finite matrices.
// The (inf,1) norm is NP-hard in general; here it is computed by exhaustive
// sign-vector (vertex) enumeration, which is what makes these functions
// usable as oracles against every closed form in the library.

#include "rkstab/common.hpp"

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace rkstab {

struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<BigRat> a;  // row-major; cpp_rational keeps lowest terms

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {
        if (r < 0 || c < 0) throw std::invalid_argument("DenseMatrix: negative shape");
    }

    BigRat& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const BigRat& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    double at_double(int i, int j) const { return to_double(at(i, j)); }

    bool is_zero() const {
        for (const auto& q : a)
            if (q != 0) return false;
        return true;
    }

    std::vector<double> to_doubles() const {
        std::vector<double> d(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) d[i] = to_double(a[i]);
        return d;
    }

    static DenseMatrix identity(int k) {
        DenseMatrix m(k, k);
        for (int i = 0; i < k; ++i) m.at(i, i) = 1;
        return m;
    }

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<BigRat>> rows_) {
        const int r = static_cast<int>(rows_.size());
        const int c = r == 0 ? 0 : static_cast<int>(rows_.begin()->size());
        DenseMatrix m(r, c);
        int i = 0;
        for (const auto& row_ : rows_) {
            if (static_cast<int>(row_.size()) != c)
                throw std::invalid_argument("from_rows: ragged rows");
            int j = 0;
            for (const auto& q : row_) m.at(i, j++) = q;
            ++i;
        }
        return m;
    }

    static DenseMatrix from_doubles(int r, int c, std::span<const double> d) {
        if (static_cast<std::size_t>(r) * c != d.size())
            throw std::invalid_argument("from_doubles: size mismatch");
        DenseMatrix m(r, c);
        for (std::size_t i = 0; i < d.size(); ++i) m.a[i] = rat_from_double(d[i]);
        return m;
    }
};

enum class NormMethod { closed_form, vertex_enumeration, asymptotic };

inline const char* to_string(NormMethod m) {
    switch (m) {
        case NormMethod::closed_form: return "closed_form";
        case NormMethod::vertex_enumeration: return "vertex_enumeration";
        case NormMethod::asymptotic: return "asymptotic";
    }
    return "?";
}

struct NormReport {
    BigRat l1_entrywise;
    BigRat opnorm_inf1;
    std::vector<int> witness_u;  // +-1 entries, length cols, first entry +1
    NormMethod method = NormMethod::vertex_enumeration;
};

inline BigRat l1_entrywise(const DenseMatrix& M) {
    BigRat s = 0;
    for (const auto& q : M.a) s += q < 0 ? -q : q;
    return s;
}

namespace detail {

// Gray-code maximization of ||M u||_1 over u in {+-1}^cols with u_0 fixed
// to +1 (u and -u give the same value, so this halves the enumeration and
// pins which witness gets reported). Each step flips one column's sign and
// updates the product vector in O(rows). First maximum in Gray order wins.
template <typename Scalar>
std::pair<Scalar, std::vector<int>> max_l1_over_signs(int rows, int cols,
                                                      const Scalar* data) {
    std::vector<Scalar> y(rows);
    for (int i = 0; i < rows; ++i) {
        Scalar s = 0;
        for (int j = 0; j < cols; ++j) s += data[static_cast<std::size_t>(i) * cols + j];
        y[i] = s;
    }
    auto l1_of = [&]() {
        Scalar s = 0;
        for (const auto& v : y) s += v < 0 ? Scalar(-v) : v;
        return s;
    };
    std::vector<int> u(cols, 1), best_u = u;
    Scalar best = l1_of();
    const std::uint64_t steps = cols >= 1 ? (std::uint64_t{1} << (cols - 1)) : 1;
    for (std::uint64_t t = 1; t < steps; ++t) {
        const int j = 1 + std::countr_zero(t);  // column to flip; u_0 stays +1
        u[j] = -u[j];
        for (int i = 0; i < rows; ++i) {
            const Scalar& mij = data[static_cast<std::size_t>(i) * cols + j];
            y[i] += u[j] > 0 ? Scalar(2 * mij) : Scalar(-2 * mij);
        }
        const Scalar val = l1_of();
        if (val > best) {
            best = val;
            best_u = u;
        }
    }
    return {best, best_u};
}

}  // namespace detail

/// Exhaustive (inf,1) norm by vertex enumeration, exact rational arithmetic.
inline NormReport opnorm_inf1_bruteforce(const DenseMatrix& M,
                                         int col_cap = kBruteForceColCap) {
    if (M.cols < 1 || M.rows < 1)
        throw std::invalid_argument("opnorm_inf1_bruteforce: empty matrix");
    if (M.cols > col_cap)
        throw budget_error("opnorm_inf1_bruteforce: " + std::to_string(M.cols) +
                           " columns exceed enumeration cap " + std::to_string(col_cap));
    NormReport rep;
    rep.l1_entrywise = l1_entrywise(M);
    auto [best, u] = detail::max_l1_over_signs<BigRat>(M.rows, M.cols, M.a.data());
    rep.opnorm_inf1 = std::move(best);
    rep.witness_u = std::move(u);
    rep.method = NormMethod::vertex_enumeration;
    if (rep.opnorm_inf1 > rep.l1_entrywise)
        throw std::logic_error("opnorm_inf1_bruteforce: norm ordering violated");
    return rep;
}

struct NormReportF64 {
    double l1_entrywise = 0;
    double opnorm_inf1 = 0;
    std::vector<int> witness_u;
};

/// Same enumeration on the double view; used where exactness is not needed
/// (random search over float matrices).
inline NormReportF64 opnorm_inf1_bruteforce_f64(std::span<const double> data, int rows,
                                                int cols, int col_cap = kBruteForceColCap) {
    if (cols < 1 || rows < 1 || data.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("opnorm_inf1_bruteforce_f64: bad shape");
    if (cols > col_cap)
        throw budget_error("opnorm_inf1_bruteforce_f64: " + std::to_string(cols) +
                           " columns exceed enumeration cap " + std::to_string(col_cap));
    NormReportF64 rep;
    for (double v : data) rep.l1_entrywise += std::abs(v);
    auto [best, u] = detail::max_l1_over_signs<double>(rows, cols, data.data());
    rep.opnorm_inf1 = best;
    rep.witness_u = std::move(u);
    return rep;
}

/// ||M||_{inf,1} / ||M||_1, exact; always in [0,1].
inline BigRat norm_ratio(const DenseMatrix& M, int col_cap = kBruteForceColCap) {
    if (M.is_zero()) throw std::domain_error("norm_ratio: zero matrix");
    const NormReport rep = opnorm_inf1_bruteforce(M, col_cap);
    return rep.opnorm_inf1 / rep.l1_entrywise;
}

}  // namespace rkstab
