#pragma once

// Truncation-based diagnostics for kernel handles: entrywise-mass probes,
// (inf,1) norm growth, worst-case bounded inputs, and a verdict that is
// honest about what finite evidence can show. One divergent witness
// certifies instability; a parametric tail bound certifies summability;
// everything else is structural evidence, never a decision procedure.

#include "rkstab/common.hpp"
#include "rkstab/finite_norms.hpp"
#include "rkstab/kernels.hpp"
#include "rkstab/lambda_bounds.hpp"

#include <cmath>
#include <cstdint>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace rkstab {

enum class Verdict {
    summable_certificate,
    bounded_nonsummable_structural,
    divergent_witness,
    inconclusive
};

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::summable_certificate: return "summable_certificate";
        case Verdict::bounded_nonsummable_structural: return "bounded_nonsummable_structural";
        case Verdict::divergent_witness: return "divergent_witness";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

enum class GrowthClass { apparently_convergent, harmonic_like, polynomially_divergent, inconclusive };

inline const char* to_string(GrowthClass c) {
    switch (c) {
        case GrowthClass::apparently_convergent: return "apparently_convergent";
        case GrowthClass::harmonic_like: return "harmonic_like";
        case GrowthClass::polynomially_divergent: return "polynomially_divergent";
        case GrowthClass::inconclusive: return "inconclusive";
    }
    return "?";
}

struct GrowthFitOptions {
    double r2_threshold = 0.99;          // fit acceptance, per documented heuristic
    int min_fit_points = 5;              // fits need at least this many samples
    double convergent_rel_increment = 1e-3;
    double min_power_slope = 0.1;        // below this a power fit is not divergence
};

namespace detail {

struct LinFit {
    double slope = 0, intercept = 0, r2 = 0;
};

inline LinFit linear_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinFit f;
    if (sxx == 0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

}  // namespace detail

/// Heuristic growth label for a non-decreasing series s sampled at x:
///  1. shrinking increments with a negligible final one -> apparently_convergent
///  2. s ~ a + b log x with R^2 >= threshold -> harmonic_like
///  3. log s ~ a + b log x with b >= min slope and R^2 >= threshold -> polynomially_divergent
///  4. otherwise inconclusive.
inline GrowthClass classify_growth(std::span<const double> x, std::span<const double> s,
                                   const GrowthFitOptions& opts = {}) {
    const std::size_t n = x.size();
    if (n != s.size() || n < 3) return GrowthClass::inconclusive;
    const double last_inc = s[n - 1] - s[n - 2];
    const double prev_inc = s[n - 2] - s[n - 3];
    const double scale = std::max(std::abs(s[n - 1]), 1e-300);
    if (last_inc <= prev_inc && last_inc / scale < opts.convergent_rel_increment)
        return GrowthClass::apparently_convergent;
    if (static_cast<int>(n) >= opts.min_fit_points) {
        std::vector<double> lx(n);
        for (std::size_t i = 0; i < n; ++i) lx[i] = std::log(x[i]);
        const auto logfit = detail::linear_fit(lx, s);
        if (logfit.slope > 0 && logfit.r2 >= opts.r2_threshold) return GrowthClass::harmonic_like;
        bool all_pos = true;
        for (std::size_t i = 0; i < n; ++i) all_pos &= s[i] > 0;
        if (all_pos) {
            std::vector<double> ls(n);
            for (std::size_t i = 0; i < n; ++i) ls[i] = std::log(s[i]);
            const auto powfit = detail::linear_fit(lx, ls);
            if (powfit.slope >= opts.min_power_slope && powfit.r2 >= opts.r2_threshold)
                return GrowthClass::polynomially_divergent;
        }
    }
    return GrowthClass::inconclusive;
}

struct WitnessSpec {
    enum class Kind { all_ones, alternating, sign_pattern, explicit_vec };
    Kind kind = Kind::all_ones;
    std::uint64_t seed = kDefaultSeed;
    std::vector<double> values;

    static WitnessSpec all_ones() { return {Kind::all_ones, 0, {}}; }
    static WitnessSpec alternating() { return {Kind::alternating, 0, {}}; }
    static WitnessSpec sign_pattern(std::uint64_t seed) { return {Kind::sign_pattern, seed, {}}; }
    static WitnessSpec explicit_vec(std::vector<double> v) {
        return {Kind::explicit_vec, 0, std::move(v)};
    }

    std::string label() const {
        switch (kind) {
            case Kind::all_ones: return "all_ones";
            case Kind::alternating: return "alternating";
            case Kind::sign_pattern: return "sign_pattern(seed=" + std::to_string(seed) + ")";
            case Kind::explicit_vec: return "explicit";
        }
        return "?";
    }
};

namespace detail {

inline std::vector<double> make_witness(const WitnessSpec& w, std::uint64_t len) {
    std::vector<double> u(len);
    switch (w.kind) {
        case WitnessSpec::Kind::all_ones:
            for (auto& x : u) x = 1.0;
            break;
        case WitnessSpec::Kind::alternating:
            for (std::uint64_t j = 0; j < len; ++j) u[j] = (j % 2 == 0) ? 1.0 : -1.0;
            break;
        case WitnessSpec::Kind::sign_pattern: {
            std::mt19937_64 rng(w.seed);
            for (auto& x : u) x = (rng() & 1u) ? -1.0 : 1.0;
            break;
        }
        case WitnessSpec::Kind::explicit_vec: {
            if (w.values.size() < len)
                throw std::invalid_argument("witness_probe: explicit vector shorter than max T");
            double maxabs = 0;
            for (std::uint64_t j = 0; j < len; ++j) {
                if (std::abs(w.values[j]) > 1.0 + 1e-12)
                    throw std::invalid_argument("witness_probe: witness entries must lie in [-1,1]");
                maxabs = std::max(maxabs, std::abs(w.values[j]));
            }
            if (std::abs(maxabs - 1.0) > 1e-12)
                throw std::invalid_argument("witness_probe: witness must have sup-norm 1");
            for (std::uint64_t j = 0; j < len; ++j) u[j] = w.values[j];
            break;
        }
    }
    return u;
}

}  // namespace detail

/// g(T) = sum_{i<=T} | sum_{j<=T} K_ij u_j | for each requested truncation.
/// Divergent growth along one u certifies instability; bounded growth along
/// sampled u proves nothing.
inline std::vector<double> witness_probe(const KernelHandle& k, const WitnessSpec& w,
                                         std::span<const std::uint64_t> T_list) {
    if (T_list.empty()) return {};
    for (std::size_t i = 1; i < T_list.size(); ++i)
        if (T_list[i] <= T_list[i - 1])
            throw std::invalid_argument("witness_probe: T_list must be increasing");
    const std::uint64_t T_max = T_list.back();
    const std::vector<double> u = detail::make_witness(w, T_max);
    std::vector<double> g;
    g.reserve(T_list.size());
    for (const std::uint64_t T : T_list) {
        double total = 0;
        for (std::uint64_t i = 1; i <= T; ++i) {
            double rowsum = 0;
            for (std::uint64_t j = 1; j <= T; ++j) rowsum += k.entry(i, j) * u[j - 1];
            total += std::abs(rowsum);
        }
        g.push_back(total);
    }
    return g;
}

struct MassPoint {
    std::uint64_t x = 0;  // block index for block-structured handles, else T
    double value = 0;
    bool exact_valid = false;
    BigRat exact;
};

struct SummabilityProbe {
    std::vector<MassPoint> points;  // cumulative entrywise |K| mass
    bool block_masses = false;      // points indexed by block, from closed forms
    GrowthClass cls = GrowthClass::inconclusive;
};

/// Cumulative entrywise mass. Block-structured handles use exact per-block
/// closed-form masses; everything else enumerates sections incrementally.
inline SummabilityProbe summability_probe(const KernelHandle& k,
                                          std::span<const std::uint64_t> list,
                                          const GrowthFitOptions& fit = {}) {
    SummabilityProbe probe;
    if (k.schedule.has_value()) {
        probe.block_masses = true;
        BigRat cum = 0;
        std::uint64_t next = 1;
        for (const std::uint64_t t : list) {
            if (t < next) throw std::invalid_argument("summability_probe: block list must increase");
            if (t > k.schedule->blocks.size())
                throw budget_error("summability_probe: block index beyond supported range");
            for (std::uint64_t h = next; h <= t; ++h)
                cum += k.schedule->blocks[h - 1].l1;
            next = t + 1;
            probe.points.push_back({t, to_double(cum), true, cum});
        }
    } else {
        double cum = 0;
        std::uint64_t done = 0;
        for (const std::uint64_t T : list) {
            if (T <= done) throw std::invalid_argument("summability_probe: T_list must increase");
            for (std::uint64_t t = done + 1; t <= T; ++t) {
                for (std::uint64_t j = 1; j <= t; ++j) cum += std::abs(k.entry(t, j));
                for (std::uint64_t i = 1; i < t; ++i) cum += std::abs(k.entry(i, t));
            }
            done = T;
            probe.points.push_back({T, cum, false, BigRat(0)});
        }
    }
    std::vector<double> xs, ys;
    for (const auto& pt : probe.points) {
        xs.push_back(static_cast<double>(pt.x));
        ys.push_back(pt.value);
    }
    probe.cls = classify_growth(xs, ys, fit);
    return probe;
}

struct OpnormPoint {
    std::uint64_t T = 0;
    double value = 0;
    bool exact_valid = false;
    BigRat exact;
    bool structural = false;  // from block closed forms rather than enumeration
};

namespace detail {

// Block-diagonal additivity of both norms is relied on by the structural
// fast path; it is checked once on dense cases (exact and float) before
// that path is trusted, per the module contract.
inline void verify_block_additivity() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        auto check_exact = [](const DenseMatrix& A, const DenseMatrix& B) {
            DenseMatrix D(A.rows + B.rows, A.cols + B.cols);
            for (int i = 0; i < A.rows; ++i)
                for (int j = 0; j < A.cols; ++j) D.at(i, j) = A.at(i, j);
            for (int i = 0; i < B.rows; ++i)
                for (int j = 0; j < B.cols; ++j) D.at(A.rows + i, A.cols + j) = B.at(i, j);
            const NormReport ra = opnorm_inf1_bruteforce(A);
            const NormReport rb = opnorm_inf1_bruteforce(B);
            const NormReport rd = opnorm_inf1_bruteforce(D);
            if (rd.opnorm_inf1 != ra.opnorm_inf1 + rb.opnorm_inf1 ||
                rd.l1_entrywise != ra.l1_entrywise + rb.l1_entrywise)
                throw std::logic_error(
                    "internal consistency: block-diagonal norm additivity failed");
        };
        DenseMatrix g8 = dense(GramSpec(1));
        for (auto& q : g8.a) q /= 96;
        check_exact(g8, detail::equicorrelation(3, BigRat(-1, 2)));
        std::mt19937_64 rng(7);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int rep = 0; rep < 2; ++rep) {
            auto rand_mat = [&](int r, int c) {
                DenseMatrix M(r, c);
                for (auto& q : M.a) q = rat_from_double(gauss(rng));
                return M;
            };
            check_exact(rand_mat(5, 5), rand_mat(7, 7));
        }
    });
}

}  // namespace detail

/// ||K_T||_{inf,1} along T_list: exhaustive on small sections, exact block
/// sums at block boundaries. Elsewhere the cost is genuinely exponential
/// and the call refuses.
inline std::vector<OpnormPoint> opnorm_growth(const KernelHandle& k,
                                              std::span<const std::uint64_t> T_list,
                                              int brute_cap = 20, int exact_cap = 14) {
    std::vector<OpnormPoint> out;
    for (const std::uint64_t T : T_list) {
        OpnormPoint pt;
        pt.T = T;
        const int boundary = k.schedule ? k.schedule->boundary_block(T) : 0;
        if (boundary > 0) {
            detail::verify_block_additivity();
            BigRat sum = 0;
            for (int h = 1; h <= boundary; ++h) sum += k.schedule->blocks[h - 1].opnorm;
            pt.exact = sum;
            pt.exact_valid = true;
            pt.value = to_double(sum);
            pt.structural = true;
        } else if (T <= static_cast<std::uint64_t>(exact_cap)) {
            const FiniteSection s = finite_section(k, T);
            const NormReport rep = opnorm_inf1_bruteforce(s.matrix);
            pt.exact = rep.opnorm_inf1;
            pt.exact_valid = true;
            pt.value = to_double(rep.opnorm_inf1);
        } else if (T <= static_cast<std::uint64_t>(brute_cap)) {
            const FiniteSection s = finite_section(k, T);
            const auto rep = opnorm_inf1_bruteforce_f64(s.matrix.to_doubles(),
                                                        s.matrix.rows, s.matrix.cols);
            pt.value = rep.opnorm_inf1;
        } else {
            throw budget_error("opnorm_growth: T=" + std::to_string(T) +
                               " is neither a block boundary nor within the brute cap " +
                               std::to_string(brute_cap));
        }
        if (!out.empty() && pt.value < out.back().value - 1e-12)
            throw std::logic_error("opnorm_growth: sequence must be non-decreasing");
        out.push_back(std::move(pt));
    }
    return out;
}

struct ProbeDepth {
    std::vector<std::uint64_t> T_list;  // empty -> per-handle defaults
    int blocks = 10;
    std::uint64_t witness_T_cap = 800;
    std::uint64_t seed = kDefaultSeed;
    GrowthFitOptions fit;
};

struct WitnessSeries {
    std::string label;
    std::vector<std::uint64_t> T;
    std::vector<double> g;
    GrowthClass cls = GrowthClass::inconclusive;
};

struct StabilityReport {
    std::string kernel;
    Verdict verdict = Verdict::inconclusive;
    std::string notes;
    SummabilityProbe l1_partial;
    std::vector<OpnormPoint> opnorm_partial;
    std::vector<WitnessSeries> witness_growth;
};

/// Runs the three probes and applies the verdict rules in order:
/// parametric tail certificate, divergent witness, block-structural
/// evidence, else inconclusive.
inline StabilityReport stability_report(const KernelHandle& k, const ProbeDepth& depth = {}) {
    StabilityReport rep;
    rep.kernel = k.name;

    std::vector<std::uint64_t> mass_list;
    std::vector<std::uint64_t> opnorm_list;
    std::vector<std::uint64_t> witness_list;
    if (k.schedule.has_value()) {
        const int t_max = std::min<int>(depth.blocks, static_cast<int>(k.schedule->blocks.size()));
        for (int t = 1; t <= t_max; ++t) {
            mass_list.push_back(t);
            opnorm_list.push_back(k.schedule->boundary(t));
            if (k.schedule->boundary(t) <= depth.witness_T_cap)
                witness_list.push_back(k.schedule->boundary(t));
        }
        if (witness_list.empty()) witness_list.push_back(k.schedule->boundary(1));
    } else {
        mass_list = depth.T_list.empty()
                        ? std::vector<std::uint64_t>{10, 25, 50, 100, 200, 400, 800}
                        : depth.T_list;
        witness_list = mass_list;
        for (const std::uint64_t T : {std::uint64_t{2}, std::uint64_t{5}, std::uint64_t{10},
                                      std::uint64_t{15}, std::uint64_t{20}})
            if (T <= mass_list.back()) opnorm_list.push_back(T);
    }

    rep.l1_partial = summability_probe(k, mass_list, depth.fit);
    rep.opnorm_partial = opnorm_growth(k, opnorm_list);
    for (const auto& spec : {WitnessSpec::all_ones(), WitnessSpec::alternating(),
                             WitnessSpec::sign_pattern(depth.seed)}) {
        WitnessSeries ws;
        ws.label = spec.label();
        ws.T = witness_list;
        ws.g = witness_probe(k, spec, witness_list);
        std::vector<double> xs(ws.T.begin(), ws.T.end());
        ws.cls = classify_growth(xs, ws.g, depth.fit);
        rep.witness_growth.push_back(std::move(ws));
    }

    const auto& masses = rep.l1_partial.points;
    bool decided = false;
    if (k.tail_mass_bound && !masses.empty()) {
        const double tail = k.tail_mass_bound(masses.back().x);
        if (tail <= 1e-6 * std::max(1.0, masses.back().value)) {
            rep.verdict = Verdict::summable_certificate;
            rep.notes += "tail bound beyond T=" + std::to_string(masses.back().x) + " is " +
                         std::to_string(tail) + "; ";
            decided = true;
        }
    }
    if (!decided) {
        for (const auto& ws : rep.witness_growth) {
            if (ws.cls == GrowthClass::polynomially_divergent) {
                rep.verdict = Verdict::divergent_witness;
                rep.notes += "witness " + ws.label + " shows super-logarithmic growth; ";
                decided = true;
                break;
            }
        }
    }
    if (!decided && k.schedule.has_value() &&
        (rep.l1_partial.cls == GrowthClass::harmonic_like ||
         rep.l1_partial.cls == GrowthClass::polynomially_divergent)) {
        const auto& ops = rep.opnorm_partial;
        if (ops.size() >= 3) {
            const double last_inc = ops[ops.size() - 1].value - ops[ops.size() - 2].value;
            const double prev_inc = ops[ops.size() - 2].value - ops[ops.size() - 3].value;
            if (last_inc <= prev_inc && last_inc <= 0.05 * ops.back().value) {
                rep.verdict = Verdict::bounded_nonsummable_structural;
                rep.notes +=
                    "entrywise mass diverges (" + std::string(to_string(rep.l1_partial.cls)) +
                    ") while operator-norm partial sums look Cauchy within the horizon; ";
                decided = true;
            }
        }
    }
    if (!decided) rep.verdict = Verdict::inconclusive;
    rep.notes +=
        "finite truncations cannot decide stability in general: a divergent witness "
        "certifies instability, a parametric tail bound certifies summability, all else "
        "is evidence only.";
    return rep;
}

}  // namespace rkstab
