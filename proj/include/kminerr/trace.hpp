// Per-iteration solve traces shared by all solvers.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kminerr/numerics.hpp"

namespace kminerr {

enum class SolveStatus { converged, max_iter, breakdown };

inline std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::breakdown: return "breakdown";
    }
    return "unknown";
}

/// One record per iteration, describing the state at iterate x_k before the
/// step is taken. rho = ||P(x_k) - x_k||^2, omega = ||w(x_k)||^2,
/// gamma = (omega + rho)/2; qtilde_norm is the norm of the new Gram-Schmidt
/// direction (0 where the solver has none).
struct TraceRecord {
    std::size_t k = 0;
    double rho = 0.0;
    double omega = 0.0;
    double gamma = 0.0;
    double qtilde_norm = 0.0;
    std::optional<double> true_error;  // ||x_k - x*|| when x* is known
    double wall_ms = 0.0;              // cumulative wall time; not serialized
    Vector iterate;                    // x_k
};

struct SolveTrace {
    std::vector<TraceRecord> records;
    SolveStatus status = SolveStatus::max_iter;
    std::optional<std::size_t> breakdown_step;

    std::size_t iterations() const { return records.size(); }
};

/// Options shared by the iterative solvers. x_star, when provided, is only
/// used to fill the true_error trace column.
struct SolveOptions {
    std::optional<Vector> x_star;
    bool compensated_omega = false;
};

}  // namespace kminerr
