#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "accordant/clustering.hpp"
#include "accordant/dataset.hpp"
#include "accordant/error.hpp"
#include "accordant/kmeans.hpp"
#include "accordant/matrix.hpp"

namespace accordant {

// Engines and SSE work with squared Euclidean distances; silhouette and
// Davies-Bouldin use plain Euclidean, as they are conventionally defined.

/// SSE against explicit centers.
template <class T>
double sse(const BasicGroupedDataset<T>& data, std::span<const std::size_t> assignment,
           const Matrix<double>& centers) {
    if (assignment.size() != data.size()) throw InputError("assignment size does not match dataset");
    for (auto c : assignment)
        if (c >= centers.rows()) throw InputError("cluster id has no center");
    return objective(data, assignment, centers);
}

/// SSE against the cluster means of `assignment`.
template <class T>
double sse(const BasicGroupedDataset<T>& data, std::span<const std::size_t> assignment) {
    if (assignment.size() != data.size()) throw InputError("assignment size does not match dataset");
    const std::size_t k = cluster_count(assignment);
    Matrix<double> means;
    std::vector<std::size_t> sizes;
    detail::cluster_means(data, assignment, Matrix<double>(k, data.dims(), 0.0), means, sizes);
    return objective(data, assignment, means);
}

/// Minimum-cost perfect matching on a square integer cost matrix (Hungarian
/// method with potentials, O(n^3)). Returns row -> column.
inline std::vector<std::size_t> min_cost_matching(const Matrix<std::int64_t>& cost) {
    const std::size_t n = cost.rows();
    if (cost.cols() != n) throw InputError("matching needs a square cost matrix");
    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0);
    std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);  // owner[col] = row, 1-based, 0 = free
    for (std::size_t row = 1; row <= n; ++row) {
        owner[0] = row;
        std::size_t col0 = 0;
        std::vector<std::int64_t> minv(n + 1, inf);
        std::vector<std::uint8_t> used(n + 1, 0);
        do {
            used[col0] = 1;
            const std::size_t row0 = owner[col0];
            std::int64_t delta = inf;
            std::size_t col1 = 0;
            for (std::size_t col = 1; col <= n; ++col) {
                if (used[col]) continue;
                const std::int64_t cur = cost(row0 - 1, col - 1) - u[row0] - v[col];
                if (cur < minv[col]) {
                    minv[col] = cur;
                    way[col] = col0;
                }
                if (minv[col] < delta) {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for (std::size_t col = 0; col <= n; ++col) {
                if (used[col]) {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
        } while (owner[col0] != 0);
        do {
            const std::size_t col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<std::size_t> match(n);
    for (std::size_t col = 1; col <= n; ++col) match[owner[col] - 1] = col - 1;
    return match;
}

struct MatchResult {
    double distance = 0.0;               // fraction of points the two clusterings disagree on
    std::size_t disagreements = 0;       // sum of |C_i - C'_sigma(i)|
    std::vector<std::size_t> matching;   // cluster i of the first -> cluster sigma(i) of the second
};

/// k x k table of |C_i - C'_j|, points of cluster i missing from cluster j.
inline Matrix<std::int64_t> disagreement_matrix(std::span<const std::size_t> lhs, std::span<const std::size_t> rhs,
                                                std::size_t k) {
    if (lhs.size() != rhs.size())
        throw InputError("clusterings cover different point counts: " + std::to_string(lhs.size()) + " vs " +
                         std::to_string(rhs.size()));
    Matrix<std::int64_t> overlap(k, k, 0);
    std::vector<std::int64_t> sizes(k, 0);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        if (lhs[i] >= k || rhs[i] >= k) throw InputError("cluster id out of range at point " + std::to_string(i));
        ++overlap(lhs[i], rhs[i]);
        ++sizes[lhs[i]];
    }
    Matrix<std::int64_t> cost(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) cost(i, j) = sizes[i] - overlap(i, j);
    return cost;
}

/// dist(C, C') = min over bijections sigma of (1/n) sum_i |C_i - C'_sigma(i)|,
/// solved exactly as a linear assignment problem.
inline MatchResult clustering_distance(std::span<const std::size_t> lhs, std::span<const std::size_t> rhs,
                                       std::size_t k) {
    if (lhs.empty()) throw InputError("clusterings are empty");
    const auto cost = disagreement_matrix(lhs, rhs, k);
    MatchResult out;
    out.matching = min_cost_matching(cost);
    for (std::size_t i = 0; i < k; ++i) out.disagreements += static_cast<std::size_t>(cost(i, out.matching[i]));
    out.distance = static_cast<double>(out.disagreements) / static_cast<double>(lhs.size());
    return out;
}

inline MatchResult clustering_distance(const Clustering& lhs, const Clustering& rhs) {
    if (lhs.k() != rhs.k())
        throw InputError("clusterings have different k: " + std::to_string(lhs.k()) + " vs " +
                         std::to_string(rhs.k()));
    return clustering_distance(lhs.assignment, rhs.assignment, lhs.k());
}

struct CoreReport {
    std::vector<std::vector<std::size_t>> cores;  // per cluster, ascending point index
    std::vector<double> core_fraction;            // |core_i| / N

    double min_core_fraction() const {
        return core_fraction.empty() ? 0.0 : *std::min_element(core_fraction.begin(), core_fraction.end());
    }
};

/// Core of each cluster: every z in C_i such that each x in C_i is strictly
/// closer to z than to any point outside C_i. A cluster with nothing outside
/// it is entirely core.
template <class T>
CoreReport cluster_cores(const BasicGroupedDataset<T>& data, std::span<const std::size_t> assignment,
                         std::size_t k) {
    if (assignment.size() != data.size()) throw InputError("assignment size does not match dataset");
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] >= k) throw InputError("cluster id out of range at point " + std::to_string(i));
        members[assignment[i]].push_back(i);
    }
    CoreReport report;
    report.cores.resize(k);
    report.core_fraction.resize(k, 0.0);
    const double n = static_cast<double>(data.size());
    for (std::size_t c = 0; c < k; ++c) {
        const auto& in = members[c];
        // nearest outside point for each member
        std::vector<double> outside(in.size(), std::numeric_limits<double>::infinity());
        for (std::size_t a = 0; a < in.size(); ++a)
            for (std::size_t y = 0; y < data.size(); ++y)
                if (assignment[y] != c)
                    outside[a] = std::min(outside[a], squared_distance(data.point(in[a]), data.point(y)));
        for (auto z : in) {
            bool core = true;
            for (std::size_t a = 0; a < in.size() && core; ++a)
                core = squared_distance(data.point(in[a]), data.point(z)) < outside[a];
            if (core) report.cores[c].push_back(z);
        }
        report.core_fraction[c] = static_cast<double>(report.cores[c].size()) / n;
    }
    return report;
}

template <class T>
CoreReport cluster_cores(const BasicGroupedDataset<T>& data, const Clustering& clustering) {
    return cluster_cores(data, clustering.assignment, clustering.k());
}

namespace detail {

/// Relabels cluster ids to 0..k-1 in first-use order; returns k.
inline std::size_t compact_labels(std::span<const std::size_t> assignment, std::vector<std::size_t>& out) {
    std::vector<std::size_t> map;
    out.resize(assignment.size());
    constexpr auto unset = std::numeric_limits<std::size_t>::max();
    std::size_t k = 0;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] >= map.size()) map.resize(assignment[i] + 1, unset);
        if (map[assignment[i]] == unset) map[assignment[i]] = k++;
        out[i] = map[assignment[i]];
    }
    return k;
}

}  // namespace detail

/// Mean silhouette over all points; singleton clusters contribute 0. Only
/// non-empty clusters count towards k.
template <class T>
double silhouette(const BasicGroupedDataset<T>& data, std::span<const std::size_t> assignment) {
    if (assignment.size() != data.size()) throw InputError("assignment size does not match dataset");
    std::vector<std::size_t> labels;
    const std::size_t k = detail::compact_labels(assignment, labels);
    if (k < 2) throw MetricError("silhouette needs at least 2 non-empty clusters");
    std::vector<std::size_t> sizes(k, 0);
    for (auto c : labels) ++sizes[c];

    const std::size_t n = data.size();
    std::vector<double> dist_sum(k);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = labels[i];
        if (sizes[own] == 1) continue;
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) dist_sum[labels[j]] += std::sqrt(squared_distance(data.point(i), data.point(j)));
        const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < k; ++c)
            if (c != own) b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
        const double denom = std::max(a, b);
        if (denom > 0.0) total += (b - a) / denom;
    }
    return total / static_cast<double>(n);
}

/// Davies-Bouldin index: mean over clusters of the worst
/// (S_i + S_j) / ||c_i - c_j||, S_i being the mean distance to the centroid.
template <class T>
double davies_bouldin(const BasicGroupedDataset<T>& data, std::span<const std::size_t> assignment) {
    if (assignment.size() != data.size()) throw InputError("assignment size does not match dataset");
    std::vector<std::size_t> labels;
    const std::size_t k = detail::compact_labels(assignment, labels);
    if (k < 2) throw MetricError("Davies-Bouldin needs at least 2 non-empty clusters");
    Matrix<double> centroids;
    std::vector<std::size_t> sizes;
    detail::cluster_means(data, labels, Matrix<double>(k, data.dims(), 0.0), centroids, sizes);

    std::vector<double> scatter(k, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i)
        scatter[labels[i]] += std::sqrt(squared_distance(data.point(i), centroids.row(labels[i])));
    for (std::size_t c = 0; c < k; ++c) scatter[c] /= static_cast<double>(sizes[c]);

    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double worst = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            const double sep = std::sqrt(squared_distance(centroids.row(i), centroids.row(j)));
            if (sep == 0.0)
                throw MetricError("clusters " + std::to_string(i) + " and " + std::to_string(j) +
                                  " have coincident centroids");
            worst = std::max(worst, (scatter[i] + scatter[j]) / sep);
        }
        total += worst;
    }
    return total / static_cast<double>(k);
}

}  // namespace accordant
