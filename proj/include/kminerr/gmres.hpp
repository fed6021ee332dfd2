// Full GMRES on the preconditioned system Cx = g, used as the
// residual-minimizing baseline: at every k the iterate minimizes
// ||g - Cx|| = ||P(x) - x|| over x_0 + K_k(C, r_0). Modified Gram-Schmidt
// Arnoldi with one re-orthogonalization pass and a Givens-rotation least
// squares solve; no restarting.
#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "kminerr/numerics.hpp"
#include "kminerr/trace.hpp"

namespace kminerr {

/// Arnoldi data for K_k(C, r0): orthonormal basis vectors v_1, ..., v_k and
/// the upper-Hessenberg coefficients, stored by column (column j holds
/// h_{1,j}, ..., h_{j+1,j}).
struct ArnoldiState {
    std::vector<Vector> v;
    std::vector<Vector> h_cols;
};

struct GmresOptions : SolveOptions {
    double breakdown_tol = 1e-12;  // lucky-breakdown threshold on h_{k+1,k}
};

struct GmresResult {
    Vector x;
    SolveTrace trace;
    ArnoldiState arnoldi;
};

/// apply_c must be a callable Vector(const Vector&) evaluating v -> Cv.
template <class Op>
GmresResult gmres_solve(Op&& apply_c, const Vector& g, const Vector& x0, std::size_t max_iter,
                        double tol, const GmresOptions& opts = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    GmresResult res;
    res.x = x0;
    res.trace.status = SolveStatus::max_iter;

    auto record = [&](std::size_t k, const Vector& x, double rho, double h_next) {
        TraceRecord rec;
        rec.k = k;
        rec.rho = rho;
        rec.qtilde_norm = h_next;
        if (opts.x_star) rec.true_error = norm(sub(x, *opts.x_star));
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();
        rec.iterate = x;
        res.trace.records.push_back(std::move(rec));
    };

    Vector r0 = sub(g, apply_c(x0));
    const double beta = norm(r0);
    record(0, x0, beta * beta, 0.0);
    if (beta <= tol * (1.0 + norm(x0))) {
        res.trace.status = SolveStatus::converged;
        return res;
    }

    res.arnoldi.v.push_back(scaled(r0, 1.0 / beta));

    // Givens-rotated upper-triangular factor of H and the rotated rhs.
    std::vector<Vector> r_cols;
    Vector rhs{beta};
    std::vector<double> cs, sn;

    bool exhausted = false;
    for (std::size_t j = 1; j <= max_iter && !exhausted; ++j) {
        Vector w = apply_c(res.arnoldi.v[j - 1]);
        const double w_norm0 = norm(w);
        Vector h(j + 1, 0.0);
        for (std::size_t i = 0; i < j; ++i) {
            const double c = dot(w, res.arnoldi.v[i]);
            h[i] = c;
            axpy(-c, res.arnoldi.v[i], w);
        }
        for (std::size_t i = 0; i < j; ++i) {
            const double c = dot(w, res.arnoldi.v[i]);
            h[i] += c;
            axpy(-c, res.arnoldi.v[i], w);
        }
        h[j] = norm(w);
        res.arnoldi.h_cols.push_back(h);

        if (h[j] <= opts.breakdown_tol * std::max(w_norm0, 1e-300)) {
            // Krylov space exhausted; solve with the basis built so far.
            exhausted = true;
        } else {
            res.arnoldi.v.push_back(scaled(w, 1.0 / h[j]));
        }

        // Apply previous rotations to the new column, then zero its subdiagonal.
        Vector col(h.begin(), h.end());
        for (std::size_t i = 0; i + 1 < j; ++i) {
            const double t1 = cs[i] * col[i] + sn[i] * col[i + 1];
            const double t2 = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t1;
            col[i + 1] = t2;
        }
        double c = 1.0, s = 0.0;
        const double denom = std::hypot(col[j - 1], col[j]);
        if (denom > 0.0) {
            c = col[j - 1] / denom;
            s = col[j] / denom;
        }
        cs.push_back(c);
        sn.push_back(s);
        col[j - 1] = denom;
        col[j] = 0.0;
        r_cols.push_back(Vector(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(j)));
        const double rotated = -s * rhs[j - 1];
        rhs[j - 1] = c * rhs[j - 1];
        rhs.push_back(rotated);

        // Back-substitute R y = rhs[0..j) and form the iterate.
        Vector y(j, 0.0);
        for (std::size_t i = j; i-- > 0;) {
            double sum = rhs[i];
            for (std::size_t l = i + 1; l < j; ++l) sum -= r_cols[l][i] * y[l];
            y[i] = sum / r_cols[i][i];
        }
        Vector x = x0;
        for (std::size_t i = 0; i < j; ++i) axpy(y[i], res.arnoldi.v[i], x);

        const Vector resid = sub(g, apply_c(x));
        const double rho = norm_sq(resid);
        record(j, x, rho, h[j]);
        res.x = std::move(x);

        if (std::sqrt(rho) <= tol * (1.0 + norm(res.x)) || exhausted) {
            res.trace.status = SolveStatus::converged;
            return res;
        }
    }
    return res;
}

}  // namespace kminerr
