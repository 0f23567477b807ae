#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rkstab {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Thrown when an operation would exceed its documented enumeration or
/// materialization cap. The message names the cap.
struct budget_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Default caps and seeds, overridable per call site.
inline constexpr std::uint64_t kRowMaterializeCap = std::uint64_t{1} << 20;
inline constexpr int kBruteForceColCap = 24;
inline constexpr std::uint64_t kDenseSectionCap = 4096;
inline constexpr int kOrthogonalityPCap = 12;
inline constexpr std::uint64_t kDefaultSeed = 1729;

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    BigInt r = 1;
    for (unsigned i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

inline double to_double(const BigInt& v) { return v.convert_to<double>(); }
inline double to_double(const BigRat& q) { return q.convert_to<double>(); }

/// log2 of a positive big integer, accurate to ~1 ulp even far beyond
/// double range (top 53 bits + exponent).
inline double log2_big(const BigInt& v) {
    if (v <= 0) throw std::domain_error("log2_big: argument must be positive");
    const auto bits = boost::multiprecision::msb(v);  // floor(log2 v)
    if (bits <= 900) return std::log2(v.convert_to<double>());
    const BigInt top = v >> (bits - 52);
    return std::log2(top.convert_to<double>()) + static_cast<double>(bits - 52);
}

inline double log2_rat(const BigRat& q) {
    return log2_big(boost::multiprecision::numerator(q)) -
           log2_big(boost::multiprecision::denominator(q));
}

/// log2 C(n, k) via lgamma; used where exact binomials are not needed.
inline double log2_binomial(double n, double k) {
    constexpr double ln2 = 0.6931471805599453;
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / ln2;
}

/// Exact rational value of a finite double (binary fractions are rationals).
inline BigRat rat_from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("rat_from_double: non-finite value");
    return BigRat(x);
}

inline std::string rat_string(const BigRat& q) {
    return boost::multiprecision::numerator(q).str() + "/" +
           boost::multiprecision::denominator(q).str();
}

}  // namespace rkstab
