// Dense linear-algebra kernels: vectors, row-major matrices, a cyclic Jacobi
// eigensolver for symmetric matrices, rank-truncated pseudoinverse application
// and orthonormal range bases. Everything is deterministic: fixed sweep orders,
// no parallel reductions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace kminerr {

using Vector = std::vector<double>;

/// Row-major dense matrix of doubles.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), a_(std::move(entries)) {
        if (a_.size() != rows_ * cols_)
            throw std::invalid_argument("Matrix: entry count " + std::to_string(a_.size()) +
                                        " does not match " + std::to_string(rows_) + "x" +
                                        std::to_string(cols_));
        for (double v : a_)
            if (!std::isfinite(v))
                throw std::invalid_argument("Matrix: non-finite entry");
    }

    static Matrix identity(std::size_t n) {
        Matrix I(n, n);
        for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    /// Rows [begin, end) as a new matrix.
    Matrix row_slice(std::size_t begin, std::size_t end) const {
        if (begin > end || end > rows_)
            throw std::invalid_argument("Matrix::row_slice: bad range");
        Matrix out(end - begin, cols_);
        std::copy(a_.begin() + static_cast<std::ptrdiff_t>(begin * cols_),
                  a_.begin() + static_cast<std::ptrdiff_t>(end * cols_), out.a_.begin());
        return out;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> a_;
};

inline double dot(const Vector& x, const Vector& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("dot: length mismatch " + std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm_sq(const Vector& x) { return dot(x, x); }
inline double norm(const Vector& x) { return std::sqrt(norm_sq(x)); }

/// y += alpha * x
inline void axpy(double alpha, const Vector& x, Vector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline Vector scaled(const Vector& x, double alpha) {
    Vector y(x);
    for (double& v : y) v *= alpha;
    return y;
}

inline Vector add(const Vector& x, const Vector& y) {
    Vector z(x);
    axpy(1.0, y, z);
    return z;
}

inline Vector sub(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw std::invalid_argument("sub: length mismatch");
    Vector z(x);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] -= y[i];
    return z;
}

inline Vector matvec(const Matrix& A, const Vector& x) {
    if (x.size() != A.cols())
        throw std::invalid_argument("matvec: " + std::to_string(A.rows()) + "x" +
                                    std::to_string(A.cols()) + " times vector of length " +
                                    std::to_string(x.size()));
    Vector y(A.rows(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < A.cols(); ++j) s += A(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

/// Aᵀ x without forming the transpose.
inline Vector matvec_transpose(const Matrix& A, const Vector& x) {
    if (x.size() != A.rows())
        throw std::invalid_argument("matvec_transpose: length mismatch");
    Vector y(A.cols(), 0.0);
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) y[j] += A(i, j) * x[i];
    return y;
}

inline Matrix matmul(const Matrix& A, const Matrix& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
    Matrix C(A.rows(), B.cols());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t k = 0; k < A.cols(); ++k) {
            const double a = A(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
        }
    return C;
}

inline Matrix transpose(const Matrix& A) {
    Matrix T(A.cols(), A.rows());
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
    return T;
}

inline double max_abs(const Matrix& A) {
    double m = 0.0;
    for (double v : A.data()) m = std::max(m, std::abs(v));
    return m;
}

/// Numerical-rank tolerance convention: max(rows, cols) * 2^-52, to be applied
/// relative to the dominant eigenvalue / row norm.
inline double default_rank_tol(std::size_t rows, std::size_t cols) {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

/// Eigendecomposition of a symmetric matrix: S = Q diag(eigenvalues) Qᵀ with
/// eigenvalues sorted in descending order and orthonormal columns in Q.
struct SymEig {
    Vector eigenvalues;
    Matrix eigenvectors;  // columns are the eigenvectors, same order as eigenvalues
};

/// Cyclic Jacobi eigensolver. Intended for the small Gram matrices this
/// library produces; O(n^3) per sweep.
inline SymEig sym_eig(const Matrix& S) {
    const std::size_t n = S.rows();
    if (n != S.cols())
        throw std::invalid_argument("sym_eig: matrix is " + std::to_string(S.rows()) + "x" +
                                    std::to_string(S.cols()) + ", not square");
    const double amax = max_abs(S);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(S(i, j) - S(j, i)) > 1e-12 * std::max(1.0, amax))
                throw std::invalid_argument("sym_eig: input not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");

    Matrix B(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        B(i, i) = S(i, i);
        for (std::size_t j = i + 1; j < n; ++j) B(i, j) = B(j, i) = 0.5 * (S(i, j) + S(j, i));
    }
    Matrix V = Matrix::identity(n);

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += B(i, j) * B(i, j);
        return std::sqrt(2.0 * s);
    };

    double frob = 0.0;
    for (double v : B.data()) frob += v * v;
    frob = std::sqrt(frob);
    const double stop = 1e-14 * std::max(frob, std::numeric_limits<double>::min());

    const int max_sweeps = 50;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > stop; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = B(p, q);
                if (apq == 0.0) continue;
                const double tau = (B(q, q) - B(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                // B <- Jᵀ B J with the rotation in the (p,q) plane.
                for (std::size_t k = 0; k < n; ++k) {
                    const double bkp = B(k, p), bkq = B(k, q);
                    B(k, p) = c * bkp - s * bkq;
                    B(k, q) = s * bkp + c * bkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double bpk = B(p, k), bqk = B(q, k);
                    B(p, k) = c * bpk - s * bqk;
                    B(q, k) = s * bpk + c * bqk;
                }
                B(p, q) = B(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    // Sort eigenpairs descending; stable so repeated eigenvalues keep sweep order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return B(a, a) > B(b, b); });

    SymEig out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = B(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = V(i, order[j]);
    }
    return out;
}

/// Apply the rank-truncated pseudoinverse S† v for a positive semidefinite S
/// given by its eigendecomposition: eigenvalues at or below rank_tol * λ_max
/// are treated as zero.
inline Vector pseudo_apply(const SymEig& eig, const Vector& v, double rank_tol) {
    const std::size_t n = eig.eigenvalues.size();
    if (v.size() != n)
        throw std::invalid_argument("pseudo_apply: vector length " + std::to_string(v.size()) +
                                    " does not match dimension " + std::to_string(n));
    Vector out(n, 0.0);
    if (n == 0) return out;
    const double lam_max = std::max(eig.eigenvalues[0], 0.0);
    const double threshold = rank_tol * lam_max;
    for (std::size_t j = 0; j < n; ++j) {
        const double lam = eig.eigenvalues[j];
        if (lam <= threshold || lam <= 0.0) continue;
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i) c += eig.eigenvectors(i, j) * v[i];
        c /= lam;
        for (std::size_t i = 0; i < n; ++i) out[i] += c * eig.eigenvectors(i, j);
    }
    return out;
}

/// Orthonormal basis of the row space R(Aᵀ), as columns of an n x r matrix.
/// Pivoted Gram-Schmidt with one re-orthogonalization pass; rows whose
/// remainder drops to rank_tol times the largest row norm are discarded, so r
/// is the numerical rank of A.
inline Matrix orthonormal_range_basis(const Matrix& A, double rank_tol) {
    const std::size_t m = A.rows(), n = A.cols();
    if (m == 0 || n == 0)
        throw std::invalid_argument("orthonormal_range_basis: empty matrix");

    std::vector<Vector> cand(m, Vector(n));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) cand[i][j] = A(i, j);

    double max_norm0 = 0.0;
    for (const auto& r : cand) max_norm0 = std::max(max_norm0, norm(r));
    std::vector<Vector> basis;
    if (max_norm0 == 0.0) return Matrix(n, 0);
    const double threshold = rank_tol * max_norm0;

    std::vector<bool> used(m, false);
    for (std::size_t step = 0; step < m && basis.size() < std::min(m, n); ++step) {
        std::size_t pivot = m;
        double best = threshold;
        for (std::size_t i = 0; i < m; ++i) {
            if (used[i]) continue;
            const double nv = norm(cand[i]);
            if (nv > best) {
                best = nv;
                pivot = i;
            }
        }
        if (pivot == m) break;
        used[pivot] = true;
        Vector q = cand[pivot];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) axpy(-dot(q, b), b, q);
        const double nq = norm(q);
        if (nq <= threshold) continue;
        for (double& v : q) v /= nq;
        for (std::size_t i = 0; i < m; ++i)
            if (!used[i]) axpy(-dot(cand[i], q), q, cand[i]);
        basis.push_back(std::move(q));
    }

    Matrix B(n, basis.size());
    for (std::size_t j = 0; j < basis.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) B(i, j) = basis[j][i];
    return B;
}

}  // namespace kminerr
