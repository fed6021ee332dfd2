// Gearhart-Koshy acceleration extended from a line search to affine
// subspaces: at every step, pick the point of aff(x_0, ..., x_k, P(x_k))
// closest to the exact solution. The normal equations of that least-squares
// problem have the computable right-hand side (0, ..., 0, gamma_k) with
// gamma_k = (||w(x_k)||^2 + ||P(x_k) - x_k||^2) / 2, so the unknown solution
// never has to be evaluated.
#pragma once

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kminerr/numerics.hpp"
#include "kminerr/sweep.hpp"
#include "kminerr/system.hpp"
#include "kminerr/trace.hpp"

namespace kminerr {

/// gamma = (omega + rho) / 2, the computable value of <x* - x, P(x) - x>.
inline double gamma_coefficient(double omega, double rho) {
    if (omega < 0.0 || rho < 0.0)
        throw std::invalid_argument("gamma_coefficient: omega and rho must be nonnegative");
    return 0.5 * (omega + rho);
}

/// Thrown when the affine search directions become numerically dependent,
/// which marks the onset of the method's instability near the solution.
class rank_deficiency_error : public std::runtime_error {
public:
    rank_deficiency_error(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

/// Iterate history x_0, ..., x_k of an accelerated solve.
struct AffineSearchState {
    std::vector<Vector> iterates;  // x_0 at the front, x_k at the back

    const Vector& current() const { return iterates.back(); }
    std::size_t step() const { return iterates.size() - 1; }
};

struct GkOptions : SolveOptions {
    double gram_rank_tol = 1e-12;  // numerical-singularity threshold for M_kᵀM_k
};

/// One acceleration step: minimize ||x - x*|| over aff(x_0,...,x_k,P(x_k)) by
/// solving M_kᵀ M_k s = (0,...,0,gamma_k) with
/// M_k = (x_0 - x_k, ..., x_{k-1} - x_k, P(x_k) - x_k). Columns are
/// norm-equilibrated before the Gram matrix is formed; a numerically singular
/// Gram raises rank_deficiency_error carrying the step index.
inline Vector gk_step(const AffineSearchState& state, const CycleOutcome& cycle_out,
                      double gram_rank_tol = 1e-12) {
    const std::size_t k = state.step();
    const Vector& x_k = state.current();

    std::vector<Vector> cols;
    cols.reserve(k + 1);
    for (std::size_t i = 0; i < k; ++i) cols.push_back(sub(state.iterates[i], x_k));
    cols.push_back(sub(cycle_out.y, x_k));

    std::vector<double> col_norm(k + 1);
    for (std::size_t j = 0; j <= k; ++j) {
        col_norm[j] = norm(cols[j]);
        if (col_norm[j] == 0.0)
            throw rank_deficiency_error(k, "zero search direction in column " + std::to_string(j));
        for (double& v : cols[j]) v /= col_norm[j];
    }

    Matrix gram(k + 1, k + 1);
    for (std::size_t i = 0; i <= k; ++i)
        for (std::size_t j = i; j <= k; ++j) gram(i, j) = gram(j, i) = dot(cols[i], cols[j]);

    const SymEig eig = sym_eig(gram);
    const double lam_max = eig.eigenvalues.front();
    const double lam_min = eig.eigenvalues.back();
    if (lam_min <= gram_rank_tol * lam_max)
        throw rank_deficiency_error(k, "normal-equations matrix numerically singular");

    const double gamma = gamma_coefficient(cycle_out.omega, norm_sq(sub(cycle_out.y, x_k)));
    Vector rhs(k + 1, 0.0);
    rhs[k] = gamma / col_norm[k];

    // Solve via the full eigendecomposition; all eigenvalues were just
    // checked against the rank threshold.
    Vector s(k + 1, 0.0);
    for (std::size_t j = 0; j <= k; ++j) {
        double c = 0.0;
        for (std::size_t i = 0; i <= k; ++i) c += eig.eigenvectors(i, j) * rhs[i];
        c /= eig.eigenvalues[j];
        for (std::size_t i = 0; i <= k; ++i) s[i] += c * eig.eigenvectors(i, j);
    }

    Vector x_next = x_k;
    for (std::size_t j = 0; j <= k; ++j) axpy(s[j], cols[j], x_next);
    return x_next;
}

/// Accelerated solve. Stops when ||P(x_k) - x_k|| <= tol * (1 + ||x_k||); on
/// rank deficiency the last accepted iterate is returned and the trace is
/// flagged as breakdown.
inline std::pair<Vector, SolveTrace> gk_solve(const std::vector<BlockProjector>& projectors,
                                              const Vector& x0, std::size_t max_iter, double tol,
                                              const GkOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    AffineSearchState state;
    state.iterates.push_back(x0);
    SolveTrace trace;
    trace.status = SolveStatus::max_iter;

    for (std::size_t k = 0; k < max_iter; ++k) {
        const Vector& x_k = state.current();
        CycleOutcome out = cycle(projectors, x_k, opts.compensated_omega);
        const double rho = norm_sq(sub(out.y, x_k));

        TraceRecord rec;
        rec.k = k;
        rec.rho = rho;
        rec.omega = out.omega;
        rec.gamma = gamma_coefficient(out.omega, rho);
        if (opts.x_star) rec.true_error = norm(sub(x_k, *opts.x_star));
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();
        rec.iterate = x_k;
        trace.records.push_back(std::move(rec));

        if (std::sqrt(rho) <= tol * (1.0 + norm(x_k))) {
            trace.status = SolveStatus::converged;
            return {x_k, std::move(trace)};
        }

        try {
            state.iterates.push_back(gk_step(state, out, opts.gram_rank_tol));
        } catch (const rank_deficiency_error& err) {
            trace.status = SolveStatus::breakdown;
            trace.breakdown_step = err.step();
            return {x_k, std::move(trace)};
        }
    }
    return {state.current(), std::move(trace)};
}

}  // namespace kminerr
