// A consistent linear system Ax = b partitioned into contiguous row blocks,
// and the per-block projector data (eigendecomposition of A_j A_jᵀ) that lets
// every orthogonal block projection be applied without refactorizing.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "kminerr/numerics.hpp"

namespace kminerr {

/// Half-open row range [begin, end).
struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

struct PartitionedSystem {
    Matrix A;
    Vector b;
    std::vector<RowRange> blocks;  // disjoint, ordered, covering all rows

    std::size_t rows() const { return A.rows(); }
    std::size_t cols() const { return A.cols(); }
    std::size_t block_count() const { return blocks.size(); }
};

inline void validate(const PartitionedSystem& sys) {
    if (sys.b.size() != sys.A.rows())
        throw std::invalid_argument("PartitionedSystem: b has length " +
                                    std::to_string(sys.b.size()) + " but A has " +
                                    std::to_string(sys.A.rows()) + " rows");
    std::size_t next = 0;
    for (const auto& r : sys.blocks) {
        if (r.begin != next || r.end <= r.begin)
            throw std::invalid_argument("PartitionedSystem: blocks must be nonempty, ordered and contiguous");
        next = r.end;
    }
    if (next != sys.A.rows())
        throw std::invalid_argument("PartitionedSystem: blocks do not cover all rows");
}

/// Split (A, b) into consecutive blocks of block_size rows; the final block
/// absorbs the remainder.
inline PartitionedSystem partition_uniform(Matrix A, Vector b, std::size_t block_size) {
    if (block_size == 0) throw std::invalid_argument("partition_uniform: block_size must be >= 1");
    if (b.size() != A.rows())
        throw std::invalid_argument("partition_uniform: A is " + std::to_string(A.rows()) + "x" +
                                    std::to_string(A.cols()) + " but b has length " +
                                    std::to_string(b.size()));
    PartitionedSystem sys{std::move(A), std::move(b), {}};
    for (std::size_t begin = 0; begin < sys.A.rows(); begin += block_size)
        sys.blocks.push_back({begin, std::min(begin + block_size, sys.A.rows())});
    return sys;
}

/// One row block A_j together with b_j and the eigendecomposition of the Gram
/// matrix A_j A_jᵀ, which realizes the pseudoinverse in the projection
/// P_j(x) = x - A_jᵀ (A_j A_jᵀ)† (A_j x - b_j).
struct BlockProjector {
    Matrix A_j;
    Vector b_j;
    SymEig gram_eig;
    double rank_tol = 0.0;

    std::size_t block_rows() const { return A_j.rows(); }
    std::size_t dim() const { return A_j.cols(); }
};

/// Precompute one projector per block. rank_tol <= 0 selects the default
/// numerical-rank convention per block.
inline std::vector<BlockProjector> build_projectors(const PartitionedSystem& sys,
                                                    double rank_tol = -1.0) {
    validate(sys);
    std::vector<BlockProjector> out;
    out.reserve(sys.blocks.size());
    for (const auto& range : sys.blocks) {
        BlockProjector proj;
        proj.A_j = sys.A.row_slice(range.begin, range.end);
        proj.b_j.assign(sys.b.begin() + static_cast<std::ptrdiff_t>(range.begin),
                        sys.b.begin() + static_cast<std::ptrdiff_t>(range.end));
        const std::size_t mj = proj.A_j.rows();
        Matrix gram(mj, mj);
        for (std::size_t r = 0; r < mj; ++r) {
            for (std::size_t c = r; c < mj; ++c) {
                double s = 0.0;
                for (std::size_t k = 0; k < proj.A_j.cols(); ++k)
                    s += proj.A_j(r, k) * proj.A_j(c, k);
                gram(r, c) = gram(c, r) = s;
            }
        }
        proj.gram_eig = sym_eig(gram);
        for (double& lam : proj.gram_eig.eigenvalues)
            if (lam < 0.0) lam = 0.0;  // Gram matrices are PSD; negatives are roundoff
        proj.rank_tol = rank_tol > 0.0 ? rank_tol : default_rank_tol(mj, proj.A_j.cols());
        out.push_back(std::move(proj));
    }
    return out;
}

/// Palindromic block sequence (A_1,...,A_p,A_{p-1},...,A_1) of 2p-1 blocks.
/// The cycle over the expanded system is the symmetric sweep
/// P_1 ∘ ... ∘ P_p ∘ ... ∘ P_1, whose restriction to R(Aᵀ) is symmetric.
inline PartitionedSystem symmetric_expand(const PartitionedSystem& sys) {
    validate(sys);
    const std::size_t p = sys.blocks.size();
    if (p <= 1) return sys;

    std::size_t extra = 0;
    for (std::size_t j = p - 1; j-- > 0;) extra += sys.blocks[j].size();

    Matrix A2(sys.rows() + extra, sys.cols());
    Vector b2;
    b2.reserve(sys.rows() + extra);
    std::vector<RowRange> blocks2;

    std::size_t row = 0;
    auto append_block = [&](const RowRange& r) {
        blocks2.push_back({row, row + r.size()});
        for (std::size_t i = r.begin; i < r.end; ++i, ++row) {
            for (std::size_t j = 0; j < sys.cols(); ++j) A2(row, j) = sys.A(i, j);
            b2.push_back(sys.b[i]);
        }
    };
    for (std::size_t j = 0; j < p; ++j) append_block(sys.blocks[j]);
    for (std::size_t j = p - 1; j-- > 0;) append_block(sys.blocks[j]);

    return PartitionedSystem{std::move(A2), std::move(b2), std::move(blocks2)};
}

}  // namespace kminerr
