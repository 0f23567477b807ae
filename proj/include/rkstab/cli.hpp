#pragma once

// Command-line front end: every table-like and curve-like quantity the
// library computes, emitted as CSV or json-lines with deterministic output
// for fixed flags and seed. Exit codes: 0 success, 1 verification/compute
// failure, 2 usage error.

#include "rkstab/common.hpp"
#include "rkstab/gram.hpp"
#include "rkstab/kernels.hpp"
#include "rkstab/lambda_bounds.hpp"
#include "rkstab/sign_matrix.hpp"
#include "rkstab/stability.hpp"
#include "rkstab/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace rkstab {

namespace detail {

inline std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct OutputTarget {
    std::ostream* stream = nullptr;
    std::ofstream file;

    static OutputTarget make(const std::string& path, std::ostream& fallback) {
        OutputTarget t;
        if (path.empty()) {
            t.stream = &fallback;
            return t;
        }
        t.file.open(path);
        if (!t.file) throw std::runtime_error("cannot open output path: " + path);
        t.stream = &t.file;
        return t;
    }
    std::ostream& os() { return *stream; }
};

inline std::vector<std::uint64_t> default_T_grid(std::uint64_t T_max) {
    std::vector<std::uint64_t> grid;
    for (std::uint64_t t : {10u, 25u, 50u, 100u, 200u, 400u, 800u})
        if (t < T_max) grid.push_back(t);
    grid.push_back(T_max);
    return grid;
}

}  // namespace detail

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact norm machinery for sign-pattern matrices, gram families, "
                 "lambda(k) bounds, and kernel stability diagnostics"};
    app.require_subcommand(1);

    std::string output_path;
    std::string format = "csv";
    std::uint64_t seed = kDefaultSeed;
    bool exact_flag = false;
    app.add_option("--output", output_path, "write to PATH instead of standard output");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json-lines"}));
    app.add_option("--seed", seed, "seed for randomized probes (default 1729)");
    app.add_flag("--exact", exact_flag, "also emit exact rationals as num/den strings");

    auto* verify = app.add_subcommand("verify", "run the full lemma-to-oracle check suite");
    bool fail_fast = false;
    verify->add_flag("--fail-fast", fail_fast, "stop at the first failing check");

    auto* norms = app.add_subcommand("norms", "exact and asymptotic sign-matrix norms");
    std::vector<int> norm_ps{1};
    norms->add_option("--p", norm_ps, "scale parameters (repeatable)")
        ->check(CLI::Range(1, 100000));

    auto* gram_cmd = app.add_subcommand("gram", "gram-family norms and norm ratios");
    std::vector<int> gram_ps{1};
    gram_cmd->add_option("--p", gram_ps, "scale parameters (repeatable)")
        ->check(CLI::Range(1, 100000));

    auto* lambda_cmd = app.add_subcommand("lambda", "upper-bound search for lambda(k)");
    int lambda_k = 3;
    int lambda_budget = 10000;
    lambda_cmd->add_option("--k", lambda_k, "matrix size")->check(CLI::Range(1, 12));
    lambda_cmd->add_option("--budget", lambda_budget, "random PSD samples")
        ->check(CLI::Range(0, 10000000));

    auto* fig1 = app.add_subcommand("fig1", "lambda upper-bound curve vs exact gram ratios");
    int p_max = 10;
    fig1->add_option("--p-max", p_max, "largest scale parameter")->check(CLI::Range(1, 100000));

    auto* probe = app.add_subcommand("kernel-probe", "stability diagnostics for a kernel");
    std::string kernel_name;
    double alpha = 0.9, cvalue = 1.0;
    std::uint64_t probe_T = 800;
    int probe_blocks = 10;
    std::string growth = "linear";
    probe->add_option("kernel", kernel_name, "one of: counterexample-v, counterexample-s, "
                      "stable-spline, constant");
    probe->add_option("--alpha", alpha, "stable-spline decay rate, in (0,1)")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    probe->add_option("--c", cvalue, "constant kernel value, > 0")
        ->check(CLI::Range(1e-12, 1e12));
    probe->add_option("--T", probe_T, "largest truncation for entry-based probes")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100000}));
    probe->add_option("--blocks", probe_blocks, "blocks to probe for block operators")
        ->check(CLI::Range(1, 30));
    probe->add_option("--growth", growth, "block scale growth for the counterexamples")
        ->check(CLI::IsMember({"linear", "quadratic"}));

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        detail::OutputTarget target = detail::OutputTarget::make(output_path, out);
        std::ostream& os = target.os();

        if (*verify) {
            const int failures = run_checks(standard_checks(), fail_fast, os);
            return failures == 0 ? 0 : 1;
        }

        if (*norms) {
            os << "p,m,n,l1,opnorm_inf1,asymptotic,asymptotic_log2\n";
            for (int p : norm_ps) {
                const SignMatrixSpec spec(p);
                const auto asym = opnorm_inf1_asymptotic(spec);
                os << p << "," << spec.m << "," << spec.row_count().str() << ","
                   << entrywise_l1(spec).str() << "," << opnorm_inf1_closed(spec).str() << ","
                   << detail::fmt6(asym.value) << "," << detail::fmt6(asym.log2_value) << "\n";
            }
            return 0;
        }

        if (*gram_cmd) {
            os << "p,m,n,l1,opnorm_inf1,ratio,ratio_asymptotic,rel_deviation";
            if (exact_flag) os << ",ratio_fraction";
            os << "\n";
            for (int p : gram_ps) {
                const GramSpec g(p);
                const GramRatio r = ratio(g);
                os << p << "," << g.base.m << "," << g.base.row_count().str() << ","
                   << l1_closed(g).str() << "," << opnorm_inf1_value(g).str() << ","
                   << detail::fmt6(r.value) << "," << detail::fmt6(r.asymptotic) << ","
                   << detail::fmt6(r.rel_deviation);
                if (exact_flag) os << "," << (r.exact_valid ? rat_string(r.exact) : "");
                os << "\n";
            }
            return 0;
        }

        if (*lambda_cmd) {
            LambdaSearchOptions opts;
            opts.samples = lambda_budget;
            opts.seed = seed;
            const LambdaBoundRecord rec = lambda_upper_search(lambda_k, opts);
            os << "k,bound,method,witness";
            if (exact_flag) os << ",bound_fraction";
            os << "\n";
            os << rec.k << "," << detail::fmt6(rec.bound) << "," << to_string(rec.method)
               << ",\"" << rec.witness_desc << "\"";
            if (exact_flag) os << "," << (rec.exact ? rat_string(rec.bound_exact) : "");
            os << "\n";
            return 0;
        }

        if (*fig1) {
            const auto curve = fig1_curve(p_max);
            os << "p,n,fig1_bound,gram_ratio_exact";
            if (exact_flag) os << ",gram_ratio_fraction";
            os << "\n";
            for (const auto& row : curve) {
                const GramRatio r = ratio(GramSpec(row.p));
                os << row.p << "," << row.n.str() << "," << detail::fmt6(row.bound) << ","
                   << (std::isfinite(r.value) && r.value > 0 ? detail::fmt6(r.value) : "");
                if (exact_flag) os << "," << (r.exact_valid ? rat_string(r.exact) : "");
                os << "\n";
            }
            return 0;
        }

        if (*probe) {
            KernelHandle handle;
            const BlockGrowth bg =
                growth == "linear" ? BlockGrowth::linear : BlockGrowth::quadratic;
            if (kernel_name == "counterexample-v") {
                handle = counterexample_v(bg);
            } else if (kernel_name == "counterexample-s") {
                handle = counterexample_s(bg);
            } else if (kernel_name == "stable-spline") {
                handle = stable_spline(alpha);
            } else if (kernel_name == "constant") {
                handle = constant_kernel(cvalue);
            } else {
                err << "unknown kernel '" << kernel_name
                    << "'; available kernels: counterexample-v, counterexample-s, "
                       "stable-spline, constant\n";
                return 2;
            }
            ProbeDepth depth;
            depth.blocks = probe_blocks;
            depth.seed = seed;
            depth.witness_T_cap = probe_T;
            if (!handle.schedule.has_value()) depth.T_list = detail::default_T_grid(probe_T);
            const StabilityReport rep = stability_report(handle, depth);

            if (format == "json-lines") {
                using nlohmann::json;
                for (const auto& pt : rep.l1_partial.points) {
                    json j{{"series", "l1_partial"},
                           {"x", pt.x},
                           {"value", pt.value}};
                    if (pt.exact_valid) j["exact"] = rat_string(pt.exact);
                    os << j.dump() << "\n";
                }
                os << json{{"series", "l1_classification"},
                           {"class", to_string(rep.l1_partial.cls)}}
                          .dump()
                   << "\n";
                for (const auto& pt : rep.opnorm_partial) {
                    json j{{"series", "opnorm_partial"},
                           {"x", pt.T},
                           {"value", pt.value},
                           {"structural", pt.structural}};
                    if (pt.exact_valid) j["exact"] = rat_string(pt.exact);
                    os << j.dump() << "\n";
                }
                for (const auto& ws : rep.witness_growth) {
                    for (std::size_t i = 0; i < ws.T.size(); ++i)
                        os << json{{"series", "witness_growth"},
                                   {"witness", ws.label},
                                   {"x", ws.T[i]},
                                   {"value", ws.g[i]}}
                                  .dump()
                           << "\n";
                }
                os << json{{"series", "verdict"},
                           {"verdict", to_string(rep.verdict)},
                           {"notes", rep.notes}}
                          .dump()
                   << "\n";
            } else {
                os << "series,x,value,exact\n";
                for (const auto& pt : rep.l1_partial.points)
                    os << "l1_partial," << pt.x << "," << detail::fmt6(pt.value) << ","
                       << (pt.exact_valid && exact_flag ? rat_string(pt.exact) : "") << "\n";
                for (const auto& pt : rep.opnorm_partial)
                    os << "opnorm_partial," << pt.T << "," << detail::fmt6(pt.value) << ","
                       << (pt.exact_valid && exact_flag ? rat_string(pt.exact) : "") << "\n";
                for (const auto& ws : rep.witness_growth)
                    for (std::size_t i = 0; i < ws.T.size(); ++i)
                        os << "witness_growth:" << ws.label << "," << ws.T[i] << ","
                           << detail::fmt6(ws.g[i]) << ",\n";
                os << "verdict,,," << to_string(rep.verdict) << "\n";
            }
            return 0;
        }
    } catch (const budget_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace rkstab
