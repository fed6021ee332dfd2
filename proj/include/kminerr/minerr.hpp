// Gram-Schmidt-based minimal-error Krylov method preconditioned by the block
// Kaczmarz cycle. Each step orthogonalizes the cycle residual r_k = P(x_k) - x_k
// against the basis built so far and moves by nu_{k+1} gamma_{k+1} along the
// new unit direction, which is exactly the coordinate of x* in that direction.
// Also provides the gamma-argmin stopping heuristic that truncates a solve at
// the most trustworthy iterate once the method has gone unstable.
#pragma once

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "kminerr/accel.hpp"
#include "kminerr/numerics.hpp"
#include "kminerr/sweep.hpp"
#include "kminerr/system.hpp"
#include "kminerr/trace.hpp"

namespace kminerr {

/// Orthonormal update directions q_1, ..., q_k and the coefficients
/// c_j = nu_j * gamma_j actually applied, so that
/// x_k = x_0 + sum_j c_j q_j reproduces the iterate.
struct KrylovBasis {
    std::vector<Vector> q;
    std::vector<double> coeffs;

    std::size_t size() const { return q.size(); }
};

struct MinerrOptions : SolveOptions {
    /// Second Gram-Schmidt pass (CGS2). The single-pass variant follows the
    /// written algorithm literally and loses basis orthogonality earlier,
    /// which reproduces the instability near the solution.
    bool reorthogonalize = true;
    /// Breakdown when ||q~_{k+1}|| <= breakdown_tol * ||r_k||: the residual is
    /// not small but carries no numerically new direction.
    double breakdown_tol = 1e-12;
};

enum class StepKind { stepped, converged, breakdown };

struct MinerrStepResult {
    StepKind kind = StepKind::stepped;
    Vector x_next;  // valid when kind == stepped
    double rho = 0.0;
    double omega = 0.0;
    double gamma = 0.0;
    double qtilde_norm = 0.0;
};

/// One step from x_k. On success the basis gains q_{k+1} and its applied
/// coefficient, and x_{k+1} is returned.
inline MinerrStepResult minerr_step(const std::vector<BlockProjector>& projectors,
                                    const Vector& x_k, KrylovBasis& basis, double tol,
                                    const MinerrOptions& opts = {}) {
    MinerrStepResult res;
    CycleOutcome out = cycle(projectors, x_k, opts.compensated_omega);
    Vector r = sub(out.y, x_k);
    res.rho = norm_sq(r);
    res.omega = out.omega;
    res.gamma = gamma_coefficient(out.omega, res.rho);

    const double r_norm = std::sqrt(res.rho);
    if (r_norm <= tol * (1.0 + norm(x_k))) {
        res.kind = StepKind::converged;
        return res;
    }

    Vector qt = std::move(r);
    for (const auto& q : basis.q) axpy(-dot(qt, q), q, qt);
    if (opts.reorthogonalize)
        for (const auto& q : basis.q) axpy(-dot(qt, q), q, qt);

    res.qtilde_norm = norm(qt);
    if (res.qtilde_norm <= opts.breakdown_tol * r_norm) {
        res.kind = StepKind::breakdown;
        return res;
    }

    const double nu = 1.0 / res.qtilde_norm;
    for (double& v : qt) v *= nu;
    const double coeff = nu * res.gamma;

    res.x_next = x_k;
    axpy(coeff, qt, res.x_next);
    basis.q.push_back(std::move(qt));
    basis.coeffs.push_back(coeff);
    res.kind = StepKind::stepped;
    return res;
}

/// Full minimal-error solve from x0.
inline std::tuple<Vector, SolveTrace, KrylovBasis> minerr_solve(
    const std::vector<BlockProjector>& projectors, const Vector& x0, std::size_t max_iter,
    double tol, const MinerrOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    Vector x = x0;
    KrylovBasis basis;
    SolveTrace trace;
    trace.status = SolveStatus::max_iter;

    for (std::size_t k = 0; k < max_iter; ++k) {
        MinerrStepResult res = minerr_step(projectors, x, basis, tol, opts);

        TraceRecord rec;
        rec.k = k;
        rec.rho = res.rho;
        rec.omega = res.omega;
        rec.gamma = res.gamma;
        rec.qtilde_norm = res.qtilde_norm;
        if (opts.x_star) rec.true_error = norm(sub(x, *opts.x_star));
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();
        rec.iterate = x;
        trace.records.push_back(std::move(rec));

        if (res.kind == StepKind::converged) {
            trace.status = SolveStatus::converged;
            return {std::move(x), std::move(trace), std::move(basis)};
        }
        if (res.kind == StepKind::breakdown) {
            trace.status = SolveStatus::breakdown;
            trace.breakdown_step = k;
            return {std::move(x), std::move(trace), std::move(basis)};
        }
        x = std::move(res.x_next);
    }
    return {std::move(x), std::move(trace), std::move(basis)};
}

/// Heuristic truncation: k_opt is the first minimizer of the stored gamma_k
/// over all applied steps, and x_opt = x_0 + sum_{j<=k_opt} c_j q_j rebuilt
/// from the applied coefficients. Returns (x_opt, k_opt) with k_opt 1-based.
inline std::pair<Vector, std::size_t> heuristic_best(const SolveTrace& trace,
                                                     const KrylovBasis& basis, const Vector& x0) {
    const std::size_t applied = basis.size();
    if (applied == 0)
        throw std::invalid_argument("heuristic_best: no completed iteration");
    if (trace.records.size() < applied)
        throw std::invalid_argument("heuristic_best: trace and basis do not belong together");

    std::size_t best = 0;
    for (std::size_t j = 1; j < applied; ++j)
        if (trace.records[j].gamma < trace.records[best].gamma) best = j;

    Vector x_opt = x0;
    for (std::size_t j = 0; j <= best; ++j) axpy(basis.coeffs[j], basis.q[j], x_opt);
    return {std::move(x_opt), best + 1};
}

}  // namespace kminerr
