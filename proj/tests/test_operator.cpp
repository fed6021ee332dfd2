#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kminerr/affine_operator.hpp"
#include "kminerr/problems.hpp"
#include "kminerr/sweep.hpp"
#include "support.hpp"

using namespace kminerr;

TEST_CASE("assemble_operator on the identity system") {
    const Vector b{1.0, -2.0, 0.5};
    const auto projectors = build_projectors(partition_uniform(Matrix::identity(3), b, 2));
    const auto op = assemble_operator(projectors, 3);
    CHECK(max_abs(op.T) <= 1e-14);
    CHECK(norm(sub(op.g, b)) <= 1e-14);
    for (std::size_t i = 0; i < 3; ++i) CHECK(op.C(i, i) == Catch::Approx(1.0));
}

TEST_CASE("assembled operator agrees with the matrix-free cycle") {
    const auto projectors =
        build_projectors(partition_uniform(Matrix(2, 2, {1, 0, 1, 1}), Vector{1, 2}, 1));
    const auto op = assemble_operator(projectors, 2);

    SplitMix64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        Vector x{rng.next_gaussian(), rng.next_gaussian()};
        const Vector via_op = apply_affine(op, x);
        const Vector via_cycle = cycle(projectors, x).y;
        CHECK(norm(sub(via_op, via_cycle)) <= 1e-8 * (1.0 + norm(x)));

        const Vector cv_dense = apply_C(op, x);
        const Vector cv_free = apply_C(projectors, op.g, x);
        CHECK(norm(sub(cv_dense, cv_free)) <= 1e-8 * (1.0 + norm(x)));
    }
}

TEST_CASE("appending a zero block leaves T unchanged") {
    const auto problem = gen_random(4, 3, 50);
    const auto base = build_projectors(partition_uniform(problem.A, problem.b, 2));
    const auto op_base = assemble_operator(base, 3);

    Matrix A2(6, 3);
    Vector b2(6, 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
        b2[i] = problem.b[i];
        for (std::size_t j = 0; j < 3; ++j) A2(i, j) = problem.A(i, j);
    }
    const auto extended = build_projectors(partition_uniform(A2, b2, 2));
    const auto op_ext = assemble_operator(extended, 3);

    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(op_ext.T(i, j) == Catch::Approx(op_base.T(i, j)).margin(1e-12));
}

TEST_CASE("apply_C basics") {
    const auto item = testkit::corpus_item(70);
    const std::size_t n = item.sys.cols();
    const auto op = assemble_operator(item.projectors, n);

    CHECK(norm(apply_C(op, Vector(n, 0.0))) == 0.0);

    // fixed point: C x* = g for any solution
    const Vector cx = apply_C(op, *item.problem.x_star);
    CHECK(norm(sub(cx, op.g)) <= 1e-8 * (1.0 + norm(op.g)));

    CHECK_THROWS_AS(apply_C(op, Vector(n + 1, 0.0)), std::invalid_argument);
}

TEST_CASE("null space of A is annihilated by C") {
    const auto problem = gen_rank_deficient(10, 7, 3, 71);
    const auto projectors = build_projectors(partition_uniform(problem.A, problem.b, 3));
    const auto op = assemble_operator(projectors, 7);
    const Matrix B = orthonormal_range_basis(problem.A, default_rank_tol(10, 7));
    REQUIRE(B.cols() == 3);

    SplitMix64 rng(4);
    for (int trial = 0; trial < 8; ++trial) {
        // random null-space vector: z = v - B Bᵀ v
        Vector v(7);
        for (auto& e : v) e = rng.next_gaussian();
        Vector z = v;
        for (std::size_t c = 0; c < B.cols(); ++c) {
            Vector q(7);
            for (std::size_t i = 0; i < 7; ++i) q[i] = B(i, c);
            axpy(-dot(v, q), q, z);
        }
        CHECK(norm(matvec(problem.A, z)) <= 1e-8 * (1.0 + norm(z)));
        CHECK(norm(apply_C(op, z)) <= 1e-8 * norm(z));
    }
}

TEST_CASE("quasi_opt_factor formula") {
    CHECK(quasi_opt_factor(0.0) == 1.0);
    CHECK(quasi_opt_factor(0.5) == 3.0);
    CHECK(quasi_opt_factor(0.9) == Catch::Approx(19.0));
    CHECK(std::isinf(quasi_opt_factor(1.0)));
}

TEST_CASE("spectral_report on the identity system") {
    const auto projectors =
        build_projectors(partition_uniform(Matrix::identity(4), Vector{1, 2, 3, 4}, 2));
    const auto op = assemble_operator(projectors, 4);
    const auto rep = spectral_report(op, Matrix::identity(4));
    CHECK(rep.t2_norm <= 1e-10);
    CHECK(rep.quasi_opt_factor == Catch::Approx(1.0));
    CHECK(rep.range_dim == 4);
}

TEST_CASE("contraction and sharpness of t2_norm") {
    for (std::uint64_t seed : {81u, 82u, 83u}) {
        const auto item = testkit::corpus_item(seed);
        const std::size_t n = item.sys.cols();
        const auto op = assemble_operator(item.projectors, n);
        const auto rep = spectral_report(op, item.problem.A);
        CHECK(rep.t2_norm >= 0.0);
        CHECK(rep.t2_norm < 1.0);
        CHECK(rep.quasi_opt_factor ==
              Catch::Approx((1.0 + rep.t2_norm) / (1.0 - rep.t2_norm)));

        const Matrix B = orthonormal_range_basis(
            item.problem.A, default_rank_tol(item.sys.rows(), n));
        SplitMix64 rng(seed);
        for (int trial = 0; trial < 6; ++trial) {
            // random v in R(Aᵀ)
            Vector coeff(B.cols());
            for (auto& c : coeff) c = rng.next_gaussian();
            Vector v(n, 0.0);
            for (std::size_t c = 0; c < B.cols(); ++c)
                for (std::size_t i = 0; i < n; ++i) v[i] += coeff[c] * B(i, c);
            CHECK(norm(matvec(op.T, v)) <= rep.t2_norm * norm(v) * (1.0 + 1e-8) + 1e-12);

            // the cycle contracts the error at rate at most t2_norm
            const Vector& x_star = *item.problem.x_star;
            Vector x = x_star;
            axpy(1.0, v, x);
            const Vector y = cycle(item.projectors, x).y;
            CHECK(norm(sub(y, x_star)) <=
                  rep.t2_norm * norm(sub(x, x_star)) * (1.0 + 1e-8) + 1e-12);
        }
    }
}

TEST_CASE("symmetric sweep gives a symmetric positive definite restriction") {
    for (std::uint64_t seed : {91u, 92u}) {
        const auto problem = gen_random(14, 6, seed);
        auto sys = partition_uniform(problem.A, problem.b, 4);
        sys = symmetric_expand(sys);
        const auto projectors = build_projectors(sys);
        const auto op = assemble_operator(projectors, 6);
        const auto rep = spectral_report(op, sys.A);

        CHECK(rep.c2_symmetric);
        REQUIRE(rep.kappa.has_value());
        CHECK(*rep.kappa >= 1.0);
        REQUIRE(rep.c2_eigenvalues.has_value());
        for (double lam : *rep.c2_eigenvalues) {
            CHECK(lam > 0.0);
            CHECK(lam < 2.0);
        }
    }
}

TEST_CASE("plain sweeps are generally not symmetric") {
    const auto problem = gen_random(14, 6, 93);
    const auto projectors = build_projectors(partition_uniform(problem.A, problem.b, 4));
    const auto op = assemble_operator(projectors, 6);
    const auto rep = spectral_report(op, problem.A);
    CHECK_FALSE(rep.c2_symmetric);
    CHECK(rep.c2_asymmetry > 1e-6);
}

TEST_CASE("dense assembly size gate") {
    const auto problem = gen_random(4, 3, 94);
    const auto projectors = build_projectors(partition_uniform(problem.A, problem.b, 2));
    AssembleOptions opts;
    opts.max_dim = 2;
    CHECK_THROWS_AS(assemble_operator(projectors, 3, opts), std::invalid_argument);
    opts.allow_large = true;
    CHECK_NOTHROW(assemble_operator(projectors, 3, opts));
}
