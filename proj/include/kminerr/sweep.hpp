// One block Kaczmarz cycle P = P_p ∘ ... ∘ P_1 together with the squared
// update norms ||d_j||^2 it produces as a byproduct, and the plain fixed-point
// iteration x <- P(x) as the unaccelerated baseline.
#pragma once

#include <chrono>
#include <cstddef>
#include <utility>
#include <vector>

#include "kminerr/numerics.hpp"
#include "kminerr/system.hpp"
#include "kminerr/trace.hpp"

namespace kminerr {

/// Result of one full cycle from x: y = P(x), omega = ||w(x)||^2 and the
/// per-block squared update norms with omega = sum(w_sq).
struct CycleOutcome {
    Vector y;
    double omega = 0.0;
    Vector w_sq;
};

/// Orthogonal projection of x onto H_j = {z : A_j z = b_j}:
/// y = x + A_jᵀ (A_j A_jᵀ)† (b_j - A_j x). Returns (y, ||y - x||^2).
inline std::pair<Vector, double> apply_block(const BlockProjector& proj, const Vector& x) {
    Vector resid = matvec(proj.A_j, x);
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = proj.b_j[i] - resid[i];
    const Vector coeff = pseudo_apply(proj.gram_eig, resid, proj.rank_tol);
    const Vector d = matvec_transpose(proj.A_j, coeff);
    Vector y = x;
    axpy(1.0, d, y);
    return {std::move(y), norm_sq(d)};
}

/// One block Kaczmarz cycle through all projectors in order. When
/// compensated is set, omega is accumulated with Kahan summation (the
/// per-block w_sq entries are unaffected).
inline CycleOutcome cycle(const std::vector<BlockProjector>& projectors, const Vector& x,
                          bool compensated = false) {
    CycleOutcome out;
    out.y = x;
    out.w_sq.reserve(projectors.size());
    double comp = 0.0;
    for (const auto& proj : projectors) {
        auto [y, d_sq] = apply_block(proj, out.y);
        out.y = std::move(y);
        out.w_sq.push_back(d_sq);
        if (compensated) {
            const double t = d_sq - comp;
            const double s = out.omega + t;
            comp = (s - out.omega) - t;
            out.omega = s;
        } else {
            out.omega += d_sq;
        }
    }
    return out;
}

/// Plain fixed-point iteration x <- P(x), stopped when the cycle step
/// satisfies ||P(x) - x|| <= tol * (1 + ||x||) or after max_cycles.
inline std::pair<Vector, SolveTrace> iterate_fixed_point(
    const std::vector<BlockProjector>& projectors, const Vector& x0, std::size_t max_cycles,
    double tol, const SolveOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    Vector x = x0;
    SolveTrace trace;
    trace.status = SolveStatus::max_iter;
    for (std::size_t k = 0; k < max_cycles; ++k) {
        CycleOutcome out = cycle(projectors, x, opts.compensated_omega);
        const double rho = norm_sq(sub(out.y, x));

        TraceRecord rec;
        rec.k = k;
        rec.rho = rho;
        rec.omega = out.omega;
        rec.gamma = 0.5 * (out.omega + rho);
        if (opts.x_star) rec.true_error = norm(sub(x, *opts.x_star));
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();
        rec.iterate = x;
        trace.records.push_back(std::move(rec));

        if (std::sqrt(rho) <= tol * (1.0 + norm(x))) {
            trace.status = SolveStatus::converged;
            return {std::move(x), std::move(trace)};
        }
        x = std::move(out.y);
    }
    return {std::move(x), std::move(trace)};
}

}  // namespace kminerr
