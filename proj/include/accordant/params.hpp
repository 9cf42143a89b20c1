#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "accordant/error.hpp"

namespace accordant {

enum class InitMode {
    uniform,          ///< k distinct points drawn uniformly from X
    distinct_groups,  ///< k distinct groups drawn uniformly, one uniform member each
};

inline std::string_view to_string(InitMode mode) {
    return mode == InitMode::uniform ? "uniform" : "distinct-groups";
}

inline std::optional<InitMode> parse_init_mode(std::string_view s) {
    if (s == "uniform") return InitMode::uniform;
    if (s == "distinct-groups") return InitMode::distinct_groups;
    return std::nullopt;
}

/// Lloyd-loop termination and seeding controls.
struct RunControls {
    std::size_t tau = 300;    // max iterations
    double delta = 1e-7;      // stop once the objective drops by no more than this
    InitMode init = InitMode::distinct_groups;
};

/// The (k, r, t) constraint triple plus run controls.
///
/// `restarts` is the number of independent initializations whose best result
/// is kept; it is unrelated to the group count m.
struct AccordanceParams {
    std::size_t k = 1;
    std::size_t r = 1;
    double t = 0.0;
    RunControls run;
    std::size_t restarts = 1;
    std::uint64_t seed = 0;

    /// Throws InputError unless 0 <= t <= 1, 1 <= r <= m, k >= 1, tau >= 1,
    /// delta >= 0 and restarts >= 1.
    void validate(std::size_t group_count) const {
        if (k < 1) throw InputError("k must be at least 1");
        if (!(t >= 0.0 && t <= 1.0)) throw InputError("t must lie in [0, 1]");
        if (r < 1 || r > group_count)
            throw InputError("r must lie in [1, " + std::to_string(group_count) + "], got " +
                             std::to_string(r));
        if (run.tau < 1) throw InputError("tau must be at least 1");
        if (!(run.delta >= 0.0)) throw InputError("delta must be non-negative");
        if (restarts < 1) throw InputError("restarts must be at least 1");
    }
};

}  // namespace accordant
