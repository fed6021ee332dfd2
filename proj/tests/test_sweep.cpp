#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kminerr/numerics.hpp"
#include "kminerr/problems.hpp"
#include "kminerr/sweep.hpp"
#include "support.hpp"

using namespace kminerr;

namespace {

// The fully hand-traceable system: rows (1,0) and (1,1) as singleton blocks,
// b = (1, 2), solution (1, 1).
std::vector<BlockProjector> two_row_projectors() {
    return build_projectors(partition_uniform(Matrix(2, 2, {1, 0, 1, 1}), Vector{1, 2}, 1));
}

}  // namespace

TEST_CASE("apply_block projects onto the block hyperplane") {
    // row (1,0), b = 2 fixes the first coordinate
    const auto vertical = build_projectors(partition_uniform(Matrix(1, 2, {1, 0}), Vector{2}, 1));
    const auto [y1, d1] = apply_block(vertical[0], Vector{0.0, 5.0});
    CHECK(y1[0] == Catch::Approx(2.0));
    CHECK(y1[1] == 5.0);
    CHECK(d1 == Catch::Approx(4.0));

    // a point already on H_j is fixed
    const auto [y2, d2] = apply_block(vertical[0], Vector{2.0, -3.0});
    CHECK(y2 == Vector{2.0, -3.0});
    CHECK(d2 == 0.0);

    // row (1,1), b = 2 from (1,0): rank-1 projection lands at (1.5, 0.5)
    const auto diag = build_projectors(partition_uniform(Matrix(1, 2, {1, 1}), Vector{2}, 1));
    const auto [y3, d3] = apply_block(diag[0], Vector{1.0, 0.0});
    CHECK(y3[0] == Catch::Approx(1.5));
    CHECK(y3[1] == Catch::Approx(0.5));
    CHECK(d3 == Catch::Approx(0.5));

    CHECK_THROWS_AS(apply_block(diag[0], Vector{1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("cycle on the hand-traceable system") {
    const auto projectors = two_row_projectors();
    const auto out = cycle(projectors, Vector{0.0, 0.0});
    CHECK(out.y[0] == Catch::Approx(1.5));
    CHECK(out.y[1] == Catch::Approx(0.5));
    CHECK(out.omega == Catch::Approx(1.5));
    REQUIRE(out.w_sq.size() == 2);
    CHECK(out.w_sq[0] == Catch::Approx(1.0));
    CHECK(out.w_sq[1] == Catch::Approx(0.5));

    // error-reduction cross-check with x* = (1, 1):
    // ||x - x*||^2 - ||y - x*||^2 = 2 - 0.5 = 1.5 = omega
    const Vector x_star{1.0, 1.0};
    CHECK(norm_sq(sub(Vector{0.0, 0.0}, x_star)) - norm_sq(sub(out.y, x_star)) ==
          Catch::Approx(out.omega));
}

TEST_CASE("cycle fixes solutions and solves orthogonal systems in one pass") {
    const auto projectors = two_row_projectors();
    const auto fixed = cycle(projectors, Vector{1.0, 1.0});
    CHECK(fixed.y[0] == Catch::Approx(1.0));
    CHECK(fixed.y[1] == Catch::Approx(1.0));
    CHECK(fixed.omega == Catch::Approx(0.0).margin(1e-30));

    // A = I in two singleton blocks solves in one cycle with omega = ||x0-x*||^2
    const auto id = build_projectors(partition_uniform(Matrix::identity(2), Vector{1, 2}, 1));
    const auto out = cycle(id, Vector{0.0, 0.0});
    CHECK(out.y == Vector{1.0, 2.0});
    CHECK(out.omega == Catch::Approx(5.0));
}

TEST_CASE("omega equals the sum of the block update norms as accumulated") {
    const auto item = testkit::corpus_item(31);
    SplitMix64 rng(5);
    Vector x(item.sys.cols());
    for (auto& v : x) v = rng.next_gaussian();
    const auto out = cycle(item.projectors, x);
    double sum = 0.0;
    for (double w : out.w_sq) sum += w;
    CHECK(out.omega == sum);  // exact: same accumulation order

    const auto comp = cycle(item.projectors, x, /*compensated=*/true);
    CHECK(comp.omega == Catch::Approx(out.omega).epsilon(1e-14));
    CHECK(comp.y == out.y);
}

TEST_CASE("per-block Pythagoras identity") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const auto item = testkit::corpus_item(1000 + trial);
        const auto& proj = item.projectors[rng.next() % item.projectors.size()];
        Vector x(item.sys.cols());
        for (auto& v : x) v = rng.next_gaussian();

        // a random point of H_j: x* plus a null-space perturbation of A_j
        Vector z = *item.problem.x_star;
        Vector pert(z.size());
        for (auto& v : pert) v = rng.next_gaussian();
        const auto [proj_pert, unused] = apply_block(
            BlockProjector{proj.A_j, Vector(proj.block_rows(), 0.0), proj.gram_eig, proj.rank_tol},
            pert);
        axpy(1.0, proj_pert, z);  // A_j z = b_j still

        const auto [y, d_sq] = apply_block(proj, x);
        const double lhs = norm_sq(sub(x, z));
        const double rhs = d_sq + norm_sq(sub(y, z));
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("error-reduction identity over whole cycles") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        const auto item = testkit::corpus_item(2000 + trial);
        const Vector& x_star = *item.problem.x_star;
        const Vector x = testkit::random_range_offset_point(item.problem.A, x_star, rng);
        const auto out = cycle(item.projectors, x);
        const double err_sq = norm_sq(sub(x, x_star));
        const double lhs = norm_sq(sub(out.y, x_star));
        const double rhs = err_sq - out.omega;
        CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + err_sq));
    }
}

TEST_CASE("strict decrease or fixed point") {
    SplitMix64 rng(321);
    for (int trial = 0; trial < 15; ++trial) {
        const auto item = testkit::corpus_item(3000 + trial);
        const Vector& x_star = *item.problem.x_star;
        const Vector x = testkit::random_range_offset_point(item.problem.A, x_star, rng);
        const auto out = cycle(item.projectors, x);
        if (norm(sub(out.y, x)) > 1e-12 * (1.0 + norm(x)))
            CHECK(norm(sub(out.y, x_star)) < norm(sub(x, x_star)));
    }
}

TEST_CASE("iterates stay in x0 + R(Aᵀ)") {
    const auto item = testkit::corpus_item(4000);
    const Matrix B = orthonormal_range_basis(item.problem.A,
                                             default_rank_tol(item.sys.rows(), item.sys.cols()));
    SplitMix64 rng(9);
    Vector x0(item.sys.cols());
    for (auto& v : x0) v = rng.next_gaussian();

    Vector x = x0;
    for (int k = 0; k < 5; ++k) {
        x = cycle(item.projectors, x).y;
        // the step x - x0 must have no component orthogonal to R(Aᵀ)
        Vector step = sub(x, x0);
        Vector in_range(step.size(), 0.0);
        for (std::size_t c = 0; c < B.cols(); ++c) {
            Vector q(B.rows());
            for (std::size_t i = 0; i < B.rows(); ++i) q[i] = B(i, c);
            axpy(dot(step, q), q, in_range);
        }
        CHECK(norm(sub(step, in_range)) <= 1e-8 * (1.0 + norm(step)));
    }
}

TEST_CASE("fixed-point iteration") {
    const auto projectors = two_row_projectors();

    // starting at the solution returns after one cycle check
    const auto [x_fix, trace_fix] =
        iterate_fixed_point(projectors, Vector{1.0, 1.0}, 50, 1e-12);
    CHECK(trace_fix.status == SolveStatus::converged);
    CHECK(trace_fix.records.size() == 1);
    CHECK(x_fix == Vector{1.0, 1.0});

    // orthogonal system converges in one cycle
    const auto id = build_projectors(partition_uniform(Matrix::identity(2), Vector{1, 2}, 1));
    const auto [x_id, trace_id] = iterate_fixed_point(id, Vector{0.0, 0.0}, 50, 1e-12);
    CHECK(trace_id.status == SolveStatus::converged);
    CHECK(trace_id.records.size() <= 2);
    CHECK(norm(sub(x_id, Vector{1.0, 2.0})) <= 1e-10);

    // the error decreases strictly every cycle on the hand system, whose
    // per-cycle contraction factor is exactly 1/2
    SolveOptions opts;
    opts.x_star = Vector{1.0, 1.0};
    const auto [x, trace] = iterate_fixed_point(projectors, Vector{0.0, 0.0}, 120, 1e-12, opts);
    REQUIRE(trace.records.size() >= 3);
    for (std::size_t k = 1; k < trace.records.size(); ++k)
        CHECK(*trace.records[k].true_error < *trace.records[k - 1].true_error);
    CHECK(trace.status == SolveStatus::converged);
    CHECK(norm(sub(x, Vector{1.0, 1.0})) <= 1e-10);
}

TEST_CASE("fixed-point iteration reports non-convergence in the trace") {
    const auto projectors = two_row_projectors();
    const auto [x, trace] = iterate_fixed_point(projectors, Vector{0.0, 0.0}, 2, 1e-14);
    CHECK(trace.status == SolveStatus::max_iter);
    CHECK(trace.records.size() == 2);
}
