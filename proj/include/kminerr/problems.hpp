// Seeded generators for consistent test systems: dense Gaussian, factored
// rank-deficient, and a toy parallel-beam tomography geometry with exact
// pixel-chord intersection lengths. All randomness flows through a SplitMix64
// stream so identical (spec, seed) pairs give bit-identical problems in any
// implementation of the same recipe.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kminerr/numerics.hpp"

namespace kminerr {

/// SplitMix64: state advances by the golden-gamma constant, output is the
/// mixed state. Doubles take the top 53 bits; Gaussians are Box-Muller on
/// two consecutive outputs (no caching), so the stream layout is trivial to
/// reproduce elsewhere.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes exactly two outputs.
    double next_gaussian() {
        const double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(next() >> 11) * 0x1.0p-53;        // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::uint64_t state_;
};

/// A consistent system with, when the generator knows it, the reference
/// solution used for true-error diagnostics. For rank-deficient problems this
/// is the solution in 0 + R(Aᵀ).
struct Problem {
    Matrix A;
    Vector b;
    std::optional<Vector> x_star;
};

enum class ProblemKind { random, rank_deficient, tomography, file };

inline std::string to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::random: return "random";
        case ProblemKind::rank_deficient: return "rank_deficient";
        case ProblemKind::tomography: return "tomography";
        case ProblemKind::file: return "file";
    }
    return "unknown";
}

/// Serializable description of a generated problem. noise must stay zero:
/// every generator produces exactly consistent systems.
struct ProblemSpec {
    ProblemKind kind = ProblemKind::random;
    std::size_t m = 0, n = 0;          // random, rank_deficient
    std::size_t rank = 0;              // rank_deficient
    std::size_t pixels = 0;            // tomography
    std::size_t n_angles = 0, n_rays = 0;
    std::uint64_t seed = 0;
    double noise = 0.0;
};

inline void to_json(nlohmann::ordered_json& j, const ProblemSpec& spec) {
    nlohmann::ordered_json dims;
    switch (spec.kind) {
        case ProblemKind::random:
            dims = {{"m", spec.m}, {"n", spec.n}};
            break;
        case ProblemKind::rank_deficient:
            dims = {{"m", spec.m}, {"n", spec.n}, {"rank", spec.rank}};
            break;
        case ProblemKind::tomography:
            dims = {{"pixels", spec.pixels}, {"n_angles", spec.n_angles}, {"n_rays", spec.n_rays}};
            break;
        case ProblemKind::file:
            dims = nlohmann::ordered_json::object();
            break;
    }
    j = nlohmann::ordered_json{
        {"kind", to_string(spec.kind)}, {"dims", dims}, {"seed", spec.seed}, {"noise", spec.noise}};
}

inline void from_json(const nlohmann::ordered_json& j, ProblemSpec& spec) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "random")
        spec.kind = ProblemKind::random;
    else if (kind == "rank_deficient")
        spec.kind = ProblemKind::rank_deficient;
    else if (kind == "tomography")
        spec.kind = ProblemKind::tomography;
    else if (kind == "file")
        spec.kind = ProblemKind::file;
    else
        throw std::invalid_argument("ProblemSpec: unknown kind '" + kind + "'");

    const auto& dims = j.at("dims");
    if (spec.kind == ProblemKind::random || spec.kind == ProblemKind::rank_deficient) {
        spec.m = dims.at("m").get<std::size_t>();
        spec.n = dims.at("n").get<std::size_t>();
    }
    if (spec.kind == ProblemKind::rank_deficient) spec.rank = dims.at("rank").get<std::size_t>();
    if (spec.kind == ProblemKind::tomography) {
        spec.pixels = dims.at("pixels").get<std::size_t>();
        spec.n_angles = dims.at("n_angles").get<std::size_t>();
        spec.n_rays = dims.at("n_rays").get<std::size_t>();
    }
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.noise = j.value("noise", 0.0);
    if (spec.noise != 0.0)
        throw std::invalid_argument("ProblemSpec: noise must be zero (systems are consistent)");
}

/// Dense Gaussian A (m x n), Gaussian x*, b = A x*. Stream order: the matrix
/// entries row-major, then x*.
inline Problem gen_random(std::size_t m, std::size_t n, std::uint64_t seed) {
    if (m == 0 || n == 0) throw std::invalid_argument("gen_random: m, n must be >= 1");
    SplitMix64 rng(seed);
    Matrix A(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) A(i, j) = rng.next_gaussian();
    Vector x_star(n);
    for (auto& v : x_star) v = rng.next_gaussian();
    Problem p;
    p.b = matvec(A, x_star);
    p.A = std::move(A);
    p.x_star = std::move(x_star);
    return p;
}

/// A = L R with Gaussian factors of inner dimension r < min(m, n), so A has
/// rank r almost surely. b = A x_raw for a Gaussian x_raw; the stored x_star
/// is the solution in 0 + R(Aᵀ), i.e. A† b, which is what the iterations
/// converge to from x0 = 0. Stream order: L row-major, R row-major, x_raw.
inline Problem gen_rank_deficient(std::size_t m, std::size_t n, std::size_t r,
                                  std::uint64_t seed) {
    if (r == 0 || r >= std::min(m, n))
        throw std::invalid_argument("gen_rank_deficient: need 1 <= rank < min(m, n)");
    SplitMix64 rng(seed);
    Matrix L(m, r), R(r, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < r; ++j) L(i, j) = rng.next_gaussian();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) R(i, j) = rng.next_gaussian();
    Vector x_raw(n);
    for (auto& v : x_raw) v = rng.next_gaussian();

    Problem p;
    p.A = matmul(L, R);
    p.b = matvec(p.A, x_raw);

    // A† b = Aᵀ (A Aᵀ)† b
    Matrix gram(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += p.A(i, k) * p.A(j, k);
            gram(i, j) = gram(j, i) = s;
        }
    const SymEig eig = sym_eig(gram);
    p.x_star = matvec_transpose(p.A, pseudo_apply(eig, p.b, default_rank_tol(m, n)));
    return p;
}

namespace detail {

/// Intersection lengths of one ray with the N x N unit-pixel grid centered at
/// the origin. The ray is offset s along the normal of direction angle theta.
/// Returns a dense row of length N^2 (pixel (ix, iy) at index iy*N + ix).
inline Vector tomography_ray_row(std::size_t N, double theta, double s) {
    const double h = 0.5 * static_cast<double>(N);
    const double ux = std::cos(theta), uy = std::sin(theta);
    const double px = -s * std::sin(theta), py = s * std::cos(theta);
    const double tiny = 1e-12;

    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    Vector row(N * N, 0.0);

    auto clip = [&](double u, double p) {
        if (std::abs(u) > tiny) {
            double a = (-h - p) / u, b = (h - p) / u;
            if (a > b) std::swap(a, b);
            t_lo = std::max(t_lo, a);
            t_hi = std::min(t_hi, b);
            return true;
        }
        return -h < p && p < h;  // parallel to this slab
    };
    if (!clip(ux, px) || !clip(uy, py)) return row;
    if (t_hi - t_lo <= tiny) return row;

    std::vector<double> ts{t_lo, t_hi};
    for (std::size_t i = 0; i <= N; ++i) {
        const double line = -h + static_cast<double>(i);
        if (std::abs(ux) > tiny) {
            const double t = (line - px) / ux;
            if (t > t_lo + tiny && t < t_hi - tiny) ts.push_back(t);
        }
        if (std::abs(uy) > tiny) {
            const double t = (line - py) / uy;
            if (t > t_lo + tiny && t < t_hi - tiny) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());

    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double len = ts[i + 1] - ts[i];
        if (len <= tiny) continue;
        const double tm = 0.5 * (ts[i] + ts[i + 1]);
        const double mx = px + tm * ux + h;
        const double my = py + tm * uy + h;
        auto idx = [&](double c) {
            auto v = static_cast<std::ptrdiff_t>(std::floor(c));
            if (v < 0) v = 0;
            if (v >= static_cast<std::ptrdiff_t>(N)) v = static_cast<std::ptrdiff_t>(N) - 1;
            return static_cast<std::size_t>(v);
        };
        row[idx(my) * N + idx(mx)] += len;
    }
    return row;
}

/// Disk phantom: intensity 1 inside a centered disk of radius N/3, weighted by
/// the covered pixel-area fraction (midpoint supersampling on a 16x16 grid).
inline Vector disk_phantom(std::size_t N) {
    const double h = 0.5 * static_cast<double>(N);
    const double radius = static_cast<double>(N) / 3.0;
    const double r_sq = radius * radius;
    const int sub = 16;
    Vector x(N * N, 0.0);
    for (std::size_t iy = 0; iy < N; ++iy)
        for (std::size_t ix = 0; ix < N; ++ix) {
            int inside = 0;
            for (int sy = 0; sy < sub; ++sy)
                for (int sx = 0; sx < sub; ++sx) {
                    const double cx = -h + static_cast<double>(ix) + (sx + 0.5) / sub;
                    const double cy = -h + static_cast<double>(iy) + (sy + 0.5) / sub;
                    if (cx * cx + cy * cy <= r_sq) ++inside;
                }
            x[iy * N + ix] = static_cast<double>(inside) / (sub * sub);
        }
    return x;
}

}  // namespace detail

/// Parallel-beam tomography: n_angles view angles uniform in [0, pi), n_rays
/// parallel rays per view with offsets spanning the grid diagonal, one matrix
/// row of pixel-chord lengths per ray (unit: pixel widths). Rays that miss
/// every pixel are dropped. x* is the disk phantom and b = A x*. The seed is
/// accepted for spec uniformity; the geometry itself is deterministic.
inline Problem gen_tomography(std::size_t N, std::size_t n_angles, std::size_t n_rays,
                              std::uint64_t seed) {
    (void)seed;
    if (N < 4) throw std::invalid_argument("gen_tomography: need at least 4 pixels per side");
    if (n_angles == 0 || n_rays == 0)
        throw std::invalid_argument("gen_tomography: n_angles, n_rays must be >= 1");
    const double span = static_cast<double>(N) * std::sqrt(2.0);
    std::vector<Vector> rows;
    for (std::size_t a = 0; a < n_angles; ++a) {
        const double theta = 3.14159265358979323846 * static_cast<double>(a) /
                             static_cast<double>(n_angles);
        for (std::size_t r = 0; r < n_rays; ++r) {
            const double s = ((static_cast<double>(r) + 0.5) / static_cast<double>(n_rays) - 0.5) *
                             span;
            Vector row = detail::tomography_ray_row(N, theta, s);
            double sum = 0.0;
            for (double v : row) sum += v;
            if (sum > 0.0) rows.push_back(std::move(row));
        }
    }
    Problem p;
    p.A = Matrix(rows.size(), N * N);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < N * N; ++j) p.A(i, j) = rows[i][j];
    p.x_star = detail::disk_phantom(N);
    p.b = matvec(p.A, *p.x_star);
    return p;
}

/// Dispatch a generator spec. File-backed problems are loaded by the caller.
inline Problem generate(const ProblemSpec& spec) {
    switch (spec.kind) {
        case ProblemKind::random: return gen_random(spec.m, spec.n, spec.seed);
        case ProblemKind::rank_deficient:
            return gen_rank_deficient(spec.m, spec.n, spec.rank, spec.seed);
        case ProblemKind::tomography:
            return gen_tomography(spec.pixels, spec.n_angles, spec.n_rays, spec.seed);
        case ProblemKind::file:
            throw std::invalid_argument("generate: file-backed problems are loaded, not generated");
    }
    throw std::invalid_argument("generate: unknown problem kind");
}

}  // namespace kminerr
