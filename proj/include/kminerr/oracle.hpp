// Brute-force ground truth for the Krylov claims: explicit power bases of
// K_k(C, r0) with degree detection, exact minimal-error projections into the
// affine Krylov spaces, and the representation identities of the abstract
// minimal-error theory. Everything here works from raw operator applications
// and deliberately shares no code path with the solvers it is used to check.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kminerr/numerics.hpp"

namespace kminerr {

/// Power vectors r0, Cr0, C^2 r0, ... (stored normalized) together with the
/// nested orthonormal basis of the spaces K_k and the degree d at which the
/// rank stagnates, i.e. the degree of the minimal polynomial of r0.
struct ExplicitKrylov {
    std::vector<Vector> powers;  // unit vectors along C^k r0
    std::vector<Vector> basis;   // q_1, ..., q_rank; (q_1..q_k) spans K_k
    std::optional<std::size_t> degree_d;  // set when stagnation was observed
};

/// Build the explicit Krylov data by repeated operator application. The raw
/// power vectors are stored normalized (contraction would underflow them);
/// the nested basis is grown by orthogonalizing C q_k against q_1..q_k, which
/// spans the same K_{k+1} but keeps the construction well-conditioned where
/// the raw powers have long since collapsed onto the dominant eigendirection.
/// Stagnation (remainder at most rank_tol * ||C q_k||) fixes the degree d.
template <class Op>
ExplicitKrylov explicit_krylov(Op&& apply_c, const Vector& r0, std::size_t k_max,
                               double rank_tol) {
    if (norm(r0) == 0.0)
        throw std::invalid_argument("explicit_krylov: r0 = 0, system already solved");
    ExplicitKrylov out;
    if (k_max == 0) return out;

    const Vector u0 = scaled(r0, 1.0 / norm(r0));
    out.powers.push_back(u0);
    out.basis.push_back(u0);

    for (std::size_t k = 1; k < k_max; ++k) {
        const Vector up = apply_c(out.powers.back());
        const double un = norm(up);
        if (un == 0.0) {  // C annihilated the direction; the space is exhausted
            out.degree_d = out.basis.size();
            return out;
        }
        out.powers.push_back(scaled(up, 1.0 / un));

        Vector w = apply_c(out.basis.back());
        const double w_scale = norm(w);
        if (w_scale == 0.0) {
            out.degree_d = out.basis.size();
            return out;
        }
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : out.basis) axpy(-dot(w, q), q, w);
        const double wn = norm(w);
        if (wn <= rank_tol * w_scale) {
            out.degree_d = out.basis.size();
            return out;
        }
        out.basis.push_back(scaled(w, 1.0 / wn));
    }
    return out;
}

/// Closest point to x_star in the affine space x0 + span(q_1, ..., q_k).
inline Vector best_in_krylov(const Vector& x0, const std::vector<Vector>& basis, std::size_t k,
                             const Vector& x_star) {
    if (k > basis.size())
        throw std::invalid_argument("best_in_krylov: k exceeds basis size");
    const Vector diff = sub(x_star, x0);
    Vector out = x0;
    for (std::size_t j = 0; j < k; ++j) axpy(dot(diff, basis[j]), basis[j], out);
    return out;
}

inline Vector best_in_krylov(const Vector& x0, const std::vector<Vector>& basis,
                             const Vector& x_star) {
    return best_in_krylov(x0, basis, basis.size(), x_star);
}

/// Deviations of the minimal-error representation identities, all scaled
/// relative: (i) x* = x0 + sum mu_i q_i, (ii) the coordinate iterates match
/// the direct projections, (iii) e_k = sum_{i>k} mu_i q_i, (iv)
/// mu_{k+1} = <e_k, r_k> / u_{k+1,k+1}. Steps where the diagonal entry
/// u_{k+1,k+1} vanishes numerically are skipped and listed.
struct AbstractReport {
    double dev_solution = 0.0;    // identity (i)
    double dev_iterates = 0.0;    // identity (ii), max over k
    double dev_errors = 0.0;      // identity (iii), max over k
    double dev_coordinates = 0.0; // identity (iv), max over unskipped k
    /// Residual content outside K_{k+1}, max over k, on the scale of the
    /// largest residual. (Late residuals are floating-point noise; comparing
    /// the leak against their own vanishing norms would measure nothing.)
    double dev_triangular = 0.0;
    std::vector<std::size_t> skipped_k;

    double max_deviation() const {
        double m = dev_solution;
        m = std::max(m, dev_iterates);
        m = std::max(m, dev_errors);
        m = std::max(m, dev_coordinates);
        return m;
    }
};

/// q must be the nested orthonormal basis q_1..q_d and residuals the vectors
/// r_0..r_{d-1} with r_k = g - C x_k evaluated at the optimal iterates.
inline AbstractReport verify_abstract_representation(const Vector& x0, const Vector& x_star,
                                                     const std::vector<Vector>& q,
                                                     const std::vector<Vector>& residuals,
                                                     double diag_guard_tol = 1e-12) {
    const std::size_t d = q.size();
    if (residuals.size() != d)
        throw std::invalid_argument("verify_abstract_representation: need one residual per basis vector");
    AbstractReport rep;
    const Vector diff = sub(x_star, x0);
    const double x_scale = 1.0 + norm(x_star);
    double r_scale = 0.0;
    for (const auto& r : residuals) r_scale = std::max(r_scale, norm(r));
    r_scale += 1e-300;

    Vector mu(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) mu[i] = dot(diff, q[i]);

    // (i) the solution is reproduced by its coordinates
    Vector rebuilt = x0;
    for (std::size_t i = 0; i < d; ++i) axpy(mu[i], q[i], rebuilt);
    rep.dev_solution = norm(sub(rebuilt, x_star)) / x_scale;

    for (std::size_t k = 0; k <= d; ++k) {
        // (ii) coordinate form of the iterate vs. direct projection
        Vector x_k = x0;
        for (std::size_t i = 0; i < k; ++i) axpy(mu[i], q[i], x_k);
        const Vector x_proj = best_in_krylov(x0, q, k, x_star);
        rep.dev_iterates = std::max(rep.dev_iterates, norm(sub(x_k, x_proj)) / x_scale);

        // (iii) the error is the tail of the coordinate expansion
        Vector tail(x0.size(), 0.0);
        for (std::size_t i = k; i < d; ++i) axpy(mu[i], q[i], tail);
        const Vector e_k = sub(x_star, x_proj);
        rep.dev_errors = std::max(rep.dev_errors, norm(sub(e_k, tail)) / x_scale);

        if (k == d) break;
        const Vector& r_k = residuals[k];
        const double r_norm = norm(r_k);

        // residual expansion must live in K_{k+1}
        Vector r_in(x0.size(), 0.0);
        for (std::size_t i = 0; i <= k; ++i) axpy(dot(r_k, q[i]), q[i], r_in);
        rep.dev_triangular = std::max(rep.dev_triangular, norm(sub(r_k, r_in)) / r_scale);

        // (iv) the next coordinate from the computable inner product
        const double u_diag = dot(r_k, q[k]);
        if (std::abs(u_diag) <= diag_guard_tol * std::max(r_norm, 1e-300)) {
            rep.skipped_k.push_back(k);
            continue;
        }
        const double mu_from_inner = dot(e_k, r_k) / u_diag;
        rep.dev_coordinates = std::max(
            rep.dev_coordinates, std::abs(mu[k] - mu_from_inner) / (1.0 + std::abs(mu[k])));
    }
    return rep;
}

}  // namespace kminerr
