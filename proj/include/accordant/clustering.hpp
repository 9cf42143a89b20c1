#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "accordant/dataset.hpp"
#include "accordant/matrix.hpp"

namespace accordant {

/// One group that reaches the accordance threshold.
struct AccordanceEntry {
    std::size_t group = 0;
    std::size_t cluster = 0;      // cluster holding the largest share of the group
    double fraction = 0.0;        // |C_cluster ∩ X_group| / n_group
    std::size_t forced_count = 0; // ceil(t * n_group), members the threshold requires

    bool operator==(const AccordanceEntry&) const = default;
};

struct Clustering {
    Assignment assignment;
    Matrix<double> centers;
    double sse = 0.0;
    std::size_t iterations = 0;
    std::vector<double> sse_trace;
    std::vector<AccordanceEntry> accordance;

    std::size_t k() const noexcept { return centers.rows(); }
};

inline std::size_t cluster_count(std::span<const std::size_t> assignment) {
    std::size_t k = 0;
    for (auto c : assignment) k = std::max(k, c + 1);
    return k;
}

/// m x k table of |C_j ∩ X_g|.
template <class T>
Matrix<std::size_t> group_cluster_counts(std::span<const std::size_t> assignment, std::size_t k,
                                         const BasicGroupedDataset<T>& data) {
    if (assignment.size() != data.size())
        throw InputError("assignment covers " + std::to_string(assignment.size()) + " points, dataset has " +
                         std::to_string(data.size()));
    Matrix<std::size_t> counts(data.group_count(), k, 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] >= k) throw InputError("cluster id out of range at point " + std::to_string(i));
        ++counts(data.group_of(i), assignment[i]);
    }
    return counts;
}

/// Groups on which the clustering is t-accordant, each paired with its
/// largest-share cluster (ties to the lowest cluster id). Thresholds are
/// compared on integer counts.
template <class T>
std::vector<AccordanceEntry> accordance_report(std::span<const std::size_t> assignment,
                                               const BasicGroupedDataset<T>& data, double t) {
    const std::size_t k = cluster_count(assignment);
    const auto counts = group_cluster_counts(assignment, k, data);
    std::vector<AccordanceEntry> report;
    for (std::size_t g = 0; g < data.group_count(); ++g) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < k; ++j)
            if (counts(g, j) > counts(g, best)) best = j;
        const std::size_t n = data.group_size(g);
        const std::size_t need = required_count(t, n);
        if (counts(g, best) >= need)
            report.push_back({g, best, static_cast<double>(counts(g, best)) / static_cast<double>(n), need});
    }
    return report;
}

template <class T>
bool is_rt_accordant(std::span<const std::size_t> assignment, const BasicGroupedDataset<T>& data,
                     std::size_t r, double t) {
    return accordance_report(assignment, data, t).size() >= r;
}

}  // namespace accordant
