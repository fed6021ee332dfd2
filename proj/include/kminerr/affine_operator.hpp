// The block Kaczmarz cycle is an affine map P(x) = Tx + g; its fixed-point
// equation is the square preconditioned system Cx = g with C = I - T. This
// header assembles (T, g, C) densely by probing the cycle with canonical basis
// vectors, offers the matrix-free application of C, and computes the spectral
// diagnostics of the restriction to R(Aᵀ): the contraction norm ||T_2||, the
// quasi-optimality factor (1 + ||T_2||)/(1 - ||T_2||) and, when the restricted
// C is symmetric, its spectral condition number.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kminerr/numerics.hpp"
#include "kminerr/sweep.hpp"
#include "kminerr/system.hpp"

namespace kminerr {

struct AffineOperator {
    Matrix T;  // n x n
    Vector g;  // = P(0)
    Matrix C;  // I - T, formed by subtraction

    std::size_t dim() const { return T.rows(); }
};

struct AssembleOptions {
    std::size_t max_dim = 4096;  // dense assembly is a diagnostics path
    bool allow_large = false;
};

/// g = P(0); column i of T is P(e_i) - g. Costs n + 1 cycles, so this is a
/// diagnostics path, not a solve path.
inline AffineOperator assemble_operator(const std::vector<BlockProjector>& projectors,
                                        std::size_t n, const AssembleOptions& opts = {}) {
    if (n > opts.max_dim && !opts.allow_large)
        throw std::invalid_argument("assemble_operator: dimension " + std::to_string(n) +
                                    " exceeds the dense-assembly limit " +
                                    std::to_string(opts.max_dim) +
                                    " (pass allow_large to override)");
    AffineOperator op;
    op.g = cycle(projectors, Vector(n, 0.0)).y;
    op.T = Matrix(n, n);
    Vector e(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = 1.0;
        const Vector col = cycle(projectors, e).y;
        for (std::size_t r = 0; r < n; ++r) op.T(r, i) = col[r] - op.g[r];
        e[i] = 0.0;
    }
    op.C = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            op.C(i, j) = (i == j ? 1.0 : 0.0) - op.T(i, j);
    return op;
}

inline Vector apply_affine(const AffineOperator& op, const Vector& x) {
    Vector y = matvec(op.T, x);
    axpy(1.0, op.g, y);
    return y;
}

inline Vector apply_C(const AffineOperator& op, const Vector& v) { return matvec(op.C, v); }

/// Matrix-free C v = v - P(v) + g, costing one cycle. g must be P(0).
inline Vector apply_C(const std::vector<BlockProjector>& projectors, const Vector& g,
                      const Vector& v) {
    const Vector pv = cycle(projectors, v).y;
    Vector out = v;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += g[i] - pv[i];
    return out;
}

/// The constant part g = P(0) of the cycle map.
inline Vector kaczmarz_offset(const std::vector<BlockProjector>& projectors, std::size_t n) {
    return cycle(projectors, Vector(n, 0.0)).y;
}

inline double quasi_opt_factor(double t_norm) {
    if (t_norm >= 1.0) return std::numeric_limits<double>::infinity();
    return (1.0 + t_norm) / (1.0 - t_norm);
}

struct SpectralReport {
    double t2_norm = 0.0;                // operator norm of T restricted to R(Aᵀ)
    double quasi_opt_factor = 1.0;       // (1 + t2_norm) / (1 - t2_norm)
    bool c2_symmetric = false;
    double c2_asymmetry = 0.0;           // max |C2 - C2ᵀ|
    std::optional<double> kappa;         // λ_max/λ_min of C2 in the symmetric SPD case
    std::optional<Vector> c2_eigenvalues;  // descending, symmetric case only
    std::size_t range_dim = 0;           // numerical rank of A
};

/// Diagnostics of the restriction to R(Aᵀ). B is an orthonormal range basis;
/// ||T_2|| is the largest singular value of BᵀTB (T maps R(Aᵀ) into itself),
/// computed through the eigendecomposition of its Gram matrix.
inline SpectralReport spectral_report(const AffineOperator& op, const Matrix& A,
                                      double rank_tol = -1.0) {
    if (A.cols() != op.dim())
        throw std::invalid_argument("spectral_report: operator and matrix dimensions differ");
    SpectralReport rep;
    const double tol = rank_tol > 0.0 ? rank_tol : default_rank_tol(A.rows(), A.cols());
    const Matrix B = orthonormal_range_basis(A, tol);
    const std::size_t r = B.cols();
    rep.range_dim = r;
    if (r == 0) {
        rep.c2_symmetric = true;
        rep.quasi_opt_factor = quasi_opt_factor(0.0);
        return rep;
    }

    const Matrix TB = matmul(op.T, B);
    const Matrix T2 = matmul(transpose(B), TB);
    Matrix gram(r, r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i; j < r; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < r; ++k) s += T2(k, i) * T2(k, j);
            gram(i, j) = gram(j, i) = s;
        }
    const SymEig gram_eig = sym_eig(gram);
    rep.t2_norm = std::sqrt(std::max(gram_eig.eigenvalues.front(), 0.0));
    rep.quasi_opt_factor = quasi_opt_factor(rep.t2_norm);

    const Matrix C2 = matmul(transpose(B), matmul(op.C, B));
    double asym = 0.0, amax = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) {
            asym = std::max(asym, std::abs(C2(i, j) - C2(j, i)));
            amax = std::max(amax, std::abs(C2(i, j)));
        }
    rep.c2_asymmetry = asym;
    rep.c2_symmetric = asym <= 1e-8 * std::max(1.0, amax);
    if (rep.c2_symmetric) {
        Matrix sym(r, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) sym(i, j) = 0.5 * (C2(i, j) + C2(j, i));
        const SymEig eig = sym_eig(sym);
        rep.c2_eigenvalues = eig.eigenvalues;
        const double lam_max = eig.eigenvalues.front();
        const double lam_min = eig.eigenvalues.back();
        if (lam_min > 0.0) rep.kappa = lam_max / lam_min;
    }
    return rep;
}

}  // namespace kminerr
