#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "accordant/dataset.hpp"
#include "accordant/error.hpp"
#include "accordant/matrix.hpp"
#include "accordant/rng.hpp"

namespace accordant::io {

/// Isotropic Gaussian blob.
struct Component {
    std::vector<double> center;
    double stddev = 1.0;
    std::size_t count = 1;
};

/// Splits a component's points into two groups by a coordinate threshold.
struct SplitRule {
    std::size_t axis = 0;
    double threshold = 0.0;
    std::size_t group_at_or_below = 0;
    std::size_t group_above = 0;
};

/// Group rule for one component: a fixed group id, or a split.
using GroupRule = std::variant<std::size_t, SplitRule>;

struct SynthSpec {
    std::vector<Component> components;
    /// One rule per component; empty means group = component index.
    std::vector<GroupRule> overlay;
    std::uint64_t seed = 0;
};

struct SynthData {
    GroupedDataset dataset;
    Assignment planted;  // generating component of each point
};

/// Draws the components in order, point by point, coordinates from
/// Rng(seed).normal(). Groups are labelled "g<id>" and numbered by first
/// appearance in the dataset.
inline SynthData generate(const SynthSpec& spec) {
    if (spec.components.empty()) throw InputError("synthetic spec has no components");
    const std::size_t dims = spec.components.front().center.size();
    if (dims == 0) throw InputError("component centers must be non-empty");
    if (!spec.overlay.empty() && spec.overlay.size() != spec.components.size())
        throw InputError("overlay needs one rule per component");
    std::size_t total = 0;
    for (const auto& comp : spec.components) {
        if (comp.center.size() != dims) throw InputError("component centers differ in dimension");
        if (comp.count < 1) throw InputError("component count must be at least 1");
        if (!(comp.stddev > 0.0)) throw InputError("component stddev must be positive");
        total += comp.count;
    }

    Rng rng(spec.seed);
    Matrix<double> points(total, dims);
    std::vector<std::string> labels;
    Assignment planted;
    labels.reserve(total);
    planted.reserve(total);
    std::size_t row = 0;
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
        const auto& comp = spec.components[c];
        for (std::size_t p = 0; p < comp.count; ++p, ++row) {
            for (std::size_t d = 0; d < dims; ++d) points(row, d) = comp.center[d] + comp.stddev * rng.normal();
            std::size_t group = c;
            if (!spec.overlay.empty()) {
                if (const auto* fixed = std::get_if<std::size_t>(&spec.overlay[c])) {
                    group = *fixed;
                } else {
                    const auto& split = std::get<SplitRule>(spec.overlay[c]);
                    if (split.axis >= dims) throw InputError("split axis out of range");
                    group = points(row, split.axis) <= split.threshold ? split.group_at_or_below : split.group_above;
                }
            }
            labels.push_back("g" + std::to_string(group));
            planted.push_back(c);
        }
    }
    return {GroupedDataset(std::move(points), labels), std::move(planted)};
}

/// Four unit-variance 2-D Gaussians centred at (0,0), (10,0), (20,0), (30,0),
/// 100 points each. The first is group 0; each middle component is split at
/// its center's x coordinate into two groups; the last is one group.
inline SynthSpec four_gaussians(std::uint64_t seed, std::size_t per_component = 100) {
    SynthSpec spec;
    spec.seed = seed;
    for (int c = 0; c < 4; ++c) spec.components.push_back({{10.0 * c, 0.0}, 1.0, per_component});
    spec.overlay = {std::size_t{0}, SplitRule{0, 10.0, 1, 2}, SplitRule{0, 20.0, 3, 4}, std::size_t{5}};
    return spec;
}

/// Random small mixture for property tests and oracle batches: `components`
/// blobs with centers uniform in [-spread, spread]^dims and unit stddev,
/// points spread round-robin over components, groups assigned uniformly at
/// random with every group non-empty.
inline SynthData random_mixture(Rng& rng, std::size_t n, std::size_t groups, std::size_t dims,
                                std::size_t components, double spread = 5.0) {
    if (groups < 1 || groups > n) throw InputError("need 1 <= groups <= n");
    if (components < 1 || dims < 1) throw InputError("need at least one component and one dimension");
    Matrix<double> centers(components, dims);
    for (auto& v : centers.values()) v = rng.uniform(-spread, spread);
    Matrix<double> points(n, dims);
    Assignment planted(n);
    for (std::size_t i = 0; i < n; ++i) {
        planted[i] = i % components;
        for (std::size_t d = 0; d < dims; ++d) points(i, d) = centers(planted[i], d) + rng.normal();
    }
    std::vector<std::size_t> group_of(n);
    for (std::size_t i = 0; i < n; ++i) group_of[i] = i < groups ? i : rng.uniform_index(groups);
    for (std::size_t i = n; i > 1; --i) std::swap(group_of[i - 1], group_of[rng.uniform_index(i)]);
    std::vector<std::string> labels;
    labels.reserve(n);
    for (auto g : group_of) labels.push_back("g" + std::to_string(g));
    return {GroupedDataset(std::move(points), labels), std::move(planted)};
}

}  // namespace accordant::io
