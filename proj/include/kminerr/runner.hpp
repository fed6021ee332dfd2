// Experiment runner behind the command-line tool: resolves a problem
// (generator spec or files), runs the selected methods from x0 = 0, writes
// one trace CSV per method plus a summary JSON, and computes the spectral
// diagnostics when the problem is small enough for dense assembly.
//
// Trace CSVs are reproducible byte-for-byte for identical configurations;
// wall-clock timing is therefore kept in memory only and the wall_ms column
// is always written as 0.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kminerr/accel.hpp"
#include "kminerr/affine_operator.hpp"
#include "kminerr/gmres.hpp"
#include "kminerr/io.hpp"
#include "kminerr/minerr.hpp"
#include "kminerr/numerics.hpp"
#include "kminerr/oracle.hpp"
#include "kminerr/problems.hpp"
#include "kminerr/sweep.hpp"
#include "kminerr/system.hpp"
#include "kminerr/trace.hpp"

namespace kminerr {

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::optional<ProblemSpec> problem;       // generator-backed problem
    std::optional<std::string> matrix_path;   // or file-backed: Matrix Market
    std::optional<std::string> rhs_path;      //   plus one-value-per-line rhs
    std::vector<std::string> methods;         // subset of kaczmarz, gk, minerr, gmres
    std::size_t block_size = 1;
    bool symmetric_sweep = false;
    std::size_t max_iter = 100;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    bool allow_large_assembly = false;
};

/// Problems larger than this skip the spectral summary during run() unless
/// dense diagnostics are requested explicitly; the O(n) assembly cycles and
/// O(n^3) restricted eigensolves dominate everything else beyond desk scale.
inline constexpr std::size_t kRunDiagnosticsDim = 300;

namespace detail {

inline void validate_config(const RunConfig& config, bool need_methods) {
    if (config.tol <= 0.0) throw config_error("tol must be positive");
    if (config.max_iter == 0) throw config_error("max-iter must be >= 1");
    if (config.block_size == 0) throw config_error("block-size must be >= 1");
    const bool has_spec = config.problem.has_value();
    const bool has_files = config.matrix_path || config.rhs_path;
    if (has_spec == has_files)
        throw config_error("specify exactly one problem source: --problem or --matrix/--rhs");
    if (has_files && (!config.matrix_path || !config.rhs_path))
        throw config_error("file-backed problems need both --matrix and --rhs");
    if (need_methods) {
        if (config.methods.empty()) throw config_error("no methods selected");
        for (const auto& m : config.methods)
            if (m != "kaczmarz" && m != "gk" && m != "minerr" && m != "gmres")
                throw config_error("unknown method '" + m +
                                   "' (expected kaczmarz, gk, minerr or gmres)");
    }
}

inline Problem resolve_problem(const RunConfig& config, nlohmann::ordered_json& problem_json) {
    if (config.problem) {
        ProblemSpec spec = *config.problem;
        if (spec.kind == ProblemKind::file)
            throw config_error("problem kind 'file' needs --matrix and --rhs instead");
        to_json(problem_json, spec);
        return generate(spec);
    }
    Problem p;
    p.A = load_matrix_market(*config.matrix_path);
    p.b = load_vector(*config.rhs_path);
    if (p.b.size() != p.A.rows())
        throw config_error("matrix '" + *config.matrix_path + "' has " +
                           std::to_string(p.A.rows()) + " rows but rhs '" + *config.rhs_path +
                           "' has " + std::to_string(p.b.size()) + " entries");
    problem_json = nlohmann::ordered_json{
        {"kind", "file"}, {"matrix", *config.matrix_path}, {"rhs", *config.rhs_path}};
    return p;
}

}  // namespace detail

/// Fixed trace schema. true_error is -1 when no reference solution is known;
/// wall_ms is always 0 (see header comment).
inline void write_trace_csv(const std::string& path, const SolveTrace& trace, const Matrix& A,
                            const Vector& b) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    os << "k,rho,omega,gamma,qtilde_norm,true_error,residual_norm,wall_ms\n";
    for (const auto& rec : trace.records) {
        const Vector resid = sub(b, matvec(A, rec.iterate));
        os << rec.k << "," << format_double(rec.rho) << "," << format_double(rec.omega) << ","
           << format_double(rec.gamma) << "," << format_double(rec.qtilde_norm) << ","
           << (rec.true_error ? format_double(*rec.true_error) : std::string("-1")) << ","
           << format_double(norm(resid)) << ",0\n";
    }
    if (!os) throw io_error("write failure on '" + path + "'");
}

/// Solve with every selected method, write trace CSVs and summary.json into
/// the output directory, and return the summary document.
inline nlohmann::ordered_json run_experiment(const RunConfig& config) {
    detail::validate_config(config, /*need_methods=*/true);
    nlohmann::ordered_json problem_json;
    const Problem problem = detail::resolve_problem(config, problem_json);

    PartitionedSystem sys = partition_uniform(problem.A, problem.b, config.block_size);
    if (config.symmetric_sweep) sys = symmetric_expand(sys);
    const auto projectors = build_projectors(sys);
    const std::size_t n = sys.cols();
    const Vector x0(n, 0.0);

    std::filesystem::create_directories(config.out_dir);

    nlohmann::ordered_json summary;
    summary["problem"] = problem_json;
    summary["methods"] = nlohmann::ordered_json::object();

    for (const auto& method : config.methods) {
        Vector x;
        SolveTrace trace;
        nlohmann::ordered_json entry;

        if (method == "kaczmarz") {
            SolveOptions opts;
            opts.x_star = problem.x_star;
            std::tie(x, trace) = iterate_fixed_point(projectors, x0, config.max_iter, config.tol, opts);
        } else if (method == "gk") {
            GkOptions opts;
            opts.x_star = problem.x_star;
            std::tie(x, trace) = gk_solve(projectors, x0, config.max_iter, config.tol, opts);
        } else if (method == "minerr") {
            MinerrOptions opts;
            opts.x_star = problem.x_star;
            KrylovBasis basis;
            std::tie(x, trace, basis) = minerr_solve(projectors, x0, config.max_iter, config.tol, opts);
            if (basis.size() > 0) {
                auto [x_opt, k_opt] = heuristic_best(trace, basis, x0);
                entry["k_opt"] = k_opt;
                if (problem.x_star)
                    entry["heuristic_error"] = norm(sub(x_opt, *problem.x_star));
            }
        } else {  // gmres
            const Vector g = kaczmarz_offset(projectors, n);
            GmresOptions opts;
            opts.x_star = problem.x_star;
            auto res = gmres_solve(
                [&](const Vector& v) { return apply_C(projectors, g, v); }, g, x0,
                config.max_iter, config.tol, opts);
            x = std::move(res.x);
            trace = std::move(res.trace);
        }

        write_trace_csv(config.out_dir + "/trace_" + method + ".csv", trace, sys.A, sys.b);

        nlohmann::ordered_json m;
        m["status"] = to_string(trace.status);
        m["iters"] = trace.records.size();
        if (problem.x_star) m["final_error"] = norm(sub(x, *problem.x_star));
        for (auto& [key, value] : entry.items()) m[key] = value;
        summary["methods"][method] = std::move(m);
    }

    if (n <= kRunDiagnosticsDim || config.allow_large_assembly) {
        const AffineOperator op = assemble_operator(
            projectors, n, AssembleOptions{4096, config.allow_large_assembly});
        const SpectralReport rep = spectral_report(op, sys.A);
        summary["t2_norm"] = rep.t2_norm;
        summary["quasi_opt_factor"] = rep.quasi_opt_factor;
        if (rep.kappa) {
            summary["kappa"] = *rep.kappa;
            // Reference decay factor 2((sqrt(k)-1)/(sqrt(k)+1))^j for the
            // symmetric-sweep error bound, relative to the initial error.
            if (config.symmetric_sweep) {
                const double root = std::sqrt(*rep.kappa);
                const double theta = (root - 1.0) / (root + 1.0);
                std::ofstream os(config.out_dir + "/cg_bound.csv");
                if (!os) throw io_error("cannot open cg_bound.csv for writing");
                os << "k,error_bound_factor\n";
                double factor = 2.0;
                for (std::size_t k = 0; k <= config.max_iter; ++k) {
                    os << k << "," << format_double(std::min(factor, 2.0)) << "\n";
                    factor *= theta;
                }
            }
        }
        if (norm(op.g) > 0.0) {
            const auto krylov = explicit_krylov(
                [&](const Vector& v) { return apply_C(projectors, op.g, v); }, op.g, n + 1, 1e-10);
            if (krylov.degree_d) summary["degree_d"] = *krylov.degree_d;
        } else {
            summary["degree_d"] = 0;
        }
    }

    std::ofstream os(config.out_dir + "/summary.json");
    if (!os) throw io_error("cannot open summary.json for writing");
    os << summary.dump(2) << "\n";
    return summary;
}

/// Dense-assembly diagnostics only; honors the size gate unless overridden.
inline nlohmann::ordered_json diagnose(const RunConfig& config) {
    detail::validate_config(config, /*need_methods=*/false);
    nlohmann::ordered_json problem_json;
    const Problem problem = detail::resolve_problem(config, problem_json);

    PartitionedSystem sys = partition_uniform(problem.A, problem.b, config.block_size);
    if (config.symmetric_sweep) sys = symmetric_expand(sys);
    const auto projectors = build_projectors(sys);
    const std::size_t n = sys.cols();

    const AffineOperator op =
        assemble_operator(projectors, n, AssembleOptions{4096, config.allow_large_assembly});
    const SpectralReport rep = spectral_report(op, sys.A);

    nlohmann::ordered_json out;
    out["problem"] = problem_json;
    out["t2_norm"] = rep.t2_norm;
    out["quasi_opt_factor"] = rep.quasi_opt_factor;
    out["c2_symmetric"] = rep.c2_symmetric;
    out["c2_asymmetry"] = rep.c2_asymmetry;
    if (rep.kappa) out["kappa"] = *rep.kappa;
    if (norm(op.g) > 0.0) {
        const auto krylov = explicit_krylov(
            [&](const Vector& v) { return apply_C(projectors, op.g, v); }, op.g, n + 1, 1e-10);
        if (krylov.degree_d) out["degree_d"] = *krylov.degree_d;
    } else {
        out["degree_d"] = 0;
    }
    return out;
}

}  // namespace kminerr
