// Shared helpers for the test suites: seeded random-system corpora and the
// reference solution in x0 + R(Aᵀ) that all optimality claims refer to.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "kminerr/numerics.hpp"
#include "kminerr/problems.hpp"
#include "kminerr/system.hpp"

namespace testkit {

using kminerr::Matrix;
using kminerr::Vector;

/// Solution of Ax = b closest to x0: x0 + A†(b - A x0), via the Gram
/// eigendecomposition. Independent of the solver code paths under test.
inline Vector range_solution(const Matrix& A, const Vector& b, const Vector& x0) {
    const std::size_t m = A.rows();
    Matrix gram(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < A.cols(); ++k) s += A(i, k) * A(j, k);
            gram(i, j) = gram(j, i) = s;
        }
    const auto eig = kminerr::sym_eig(gram);
    Vector resid = b;
    const Vector ax0 = kminerr::matvec(A, x0);
    for (std::size_t i = 0; i < m; ++i) resid[i] -= ax0[i];
    const Vector coeff = kminerr::pseudo_apply(eig, resid, kminerr::default_rank_tol(m, A.cols()));
    Vector x = x0;
    kminerr::axpy(1.0, kminerr::matvec_transpose(A, coeff), x);
    return x;
}

/// A point x such that the solution of Theorem-type statements for x is the
/// given x_star: x = x_star + Aᵀ u with random u, i.e. x_star in x + R(Aᵀ).
inline Vector random_range_offset_point(const Matrix& A, const Vector& x_star,
                                        kminerr::SplitMix64& rng, double scale = 1.0) {
    Vector u(A.rows());
    for (auto& v : u) v = scale * rng.next_gaussian();
    Vector x = x_star;
    kminerr::axpy(1.0, kminerr::matvec_transpose(A, u), x);
    return x;
}

struct CorpusItem {
    kminerr::Problem problem;
    std::size_t block_size;
    std::vector<kminerr::BlockProjector> projectors;
    kminerr::PartitionedSystem sys;
};

/// Deterministic corpus of consistent random systems with m <= 60, n <= 30
/// and 1..6 blocks.
inline CorpusItem corpus_item(std::uint64_t seed) {
    kminerr::SplitMix64 rng(seed ^ 0xABCDEF1234567890ULL);
    const std::size_t n = 2 + rng.next() % 29;   // 2..30
    const std::size_t m = 2 + rng.next() % 59;   // 2..60
    const std::size_t p = 1 + rng.next() % 6;    // 1..6 blocks
    const std::size_t block = (m + p - 1) / p;

    CorpusItem item;
    item.problem = kminerr::gen_random(m, n, seed);
    item.block_size = block;
    item.sys = kminerr::partition_uniform(item.problem.A, item.problem.b, block);
    item.projectors = kminerr::build_projectors(item.sys);
    return item;
}

/// Like corpus_item but guaranteed full column rank (m >= n), so d = n and
/// the generated x_star is the unique solution.
inline CorpusItem tall_corpus_item(std::uint64_t seed, std::size_t n_max = 20) {
    kminerr::SplitMix64 rng(seed ^ 0x1234567890ABCDEFULL);
    const std::size_t n = 2 + rng.next() % (n_max - 1);
    const std::size_t m = n + rng.next() % (2 * n);
    const std::size_t p = 1 + rng.next() % 6;
    const std::size_t block = (m + p - 1) / p;

    CorpusItem item;
    item.problem = kminerr::gen_random(m, n, seed);
    item.block_size = block;
    item.sys = kminerr::partition_uniform(item.problem.A, item.problem.b, block);
    item.projectors = kminerr::build_projectors(item.sys);
    return item;
}

}  // namespace testkit
