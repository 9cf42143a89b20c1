#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "accordant/clustering.hpp"
#include "accordant/dataset.hpp"
#include "accordant/error.hpp"
#include "accordant/matrix.hpp"
#include "accordant/params.hpp"
#include "accordant/restarts.hpp"
#include "accordant/rng.hpp"

namespace accordant {

/// Row indices of the points chosen as initial centers.
struct InitChoice {
    std::vector<std::size_t> center_indices;
};

template <class T>
InitChoice init_centers(const BasicGroupedDataset<T>& data, std::size_t k, InitMode mode, Rng& rng) {
    if (k < 1) throw InitError("k must be at least 1");
    if (k > data.size())
        throw InitError("cannot pick " + std::to_string(k) + " centers from " + std::to_string(data.size()) +
                        " points");
    InitChoice choice;
    choice.center_indices.reserve(k);
    if (mode == InitMode::uniform) {
        std::vector<std::size_t> pool(data.size());
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < k; ++i) {
            std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
            choice.center_indices.push_back(pool[i]);
        }
        return choice;
    }
    const std::size_t m = data.group_count();
    if (k > m)
        throw InitError("distinct-groups initialization needs k <= m, got k=" + std::to_string(k) +
                        " with " + std::to_string(m) + " groups");
    std::vector<std::size_t> groups(m);
    std::iota(groups.begin(), groups.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(groups[i], groups[i + rng.uniform_index(m - i)]);
        const auto members = data.members(groups[i]);
        choice.center_indices.push_back(members[rng.uniform_index(members.size())]);
    }
    return choice;
}

template <class T>
Matrix<double> centers_from(const BasicGroupedDataset<T>& data, const InitChoice& choice) {
    Matrix<double> centers(choice.center_indices.size(), data.dims());
    for (std::size_t j = 0; j < choice.center_indices.size(); ++j) {
        const auto p = data.point(choice.center_indices[j]);
        for (std::size_t c = 0; c < p.size(); ++c) centers(j, c) = static_cast<double>(p[c]);
    }
    return centers;
}

/// Index of the closest center; ties go to the lowest index.
template <class T>
std::size_t nearest_center(std::span<const T> point, const Matrix<double>& centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.rows(); ++j) {
        const double d = squared_distance(point, centers.row(j));
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

template <class T>
Assignment assign_nearest(const BasicGroupedDataset<T>& data, const Matrix<double>& centers) {
    Assignment out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = nearest_center(data.point(i), centers);
    return out;
}

/// Sum of squared distances to the given centers.
template <class T>
double objective(const BasicGroupedDataset<T>& data, std::span<const std::size_t> assignment,
                 const Matrix<double>& centers) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) total += squared_distance(data.point(i), centers.row(assignment[i]));
    return total;
}

struct CenterUpdate {
    Matrix<double> centers;
    Assignment assignment;     // differs from the input only where a point was moved to re-seed
    std::size_t reseeded = 0;  // number of empty clusters repaired
};

namespace detail {

template <class T>
void cluster_means(const BasicGroupedDataset<T>& data, std::span<const std::size_t> assignment,
                   const Matrix<double>& fallback, Matrix<double>& means, std::vector<std::size_t>& sizes) {
    const std::size_t k = fallback.rows();
    means = Matrix<double>(k, data.dims(), 0.0);
    sizes.assign(k, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto row = means.row(assignment[i]);
        const auto p = data.point(i);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += static_cast<double>(p[c]);
        ++sizes[assignment[i]];
    }
    for (std::size_t j = 0; j < k; ++j) {
        auto row = means.row(j);
        if (sizes[j] == 0) {
            const auto old = fallback.row(j);
            std::copy(old.begin(), old.end(), row.begin());
            continue;
        }
        for (auto& v : row) v /= static_cast<double>(sizes[j]);
    }
}

}  // namespace detail

/// Cluster means of `assignment`.
///
/// An empty cluster takes the point farthest from its own cluster's mean
/// (lowest index on ties), moved out of a cluster with at least two members.
/// Points flagged in `pinned` are never moved. An empty cluster with no
/// eligible donor keeps its previous center.
template <class T>
CenterUpdate recompute_centers(const BasicGroupedDataset<T>& data, Assignment assignment, std::size_t k,
                               const Matrix<double>& previous_centers,
                               std::span<const std::uint8_t> pinned = {}) {
    if (assignment.size() != data.size()) throw InputError("assignment size does not match dataset");
    if (previous_centers.rows() != k || previous_centers.cols() != data.dims())
        throw InputError("previous centers must be k x rho");
    CenterUpdate out{Matrix<double>(k, data.dims()), std::move(assignment), 0};
    std::vector<std::size_t> sizes;
    std::vector<std::uint8_t> settled(k, 0);
    for (;;) {
        detail::cluster_means(data, out.assignment, previous_centers, out.centers, sizes);
        std::size_t empty = k;
        for (std::size_t j = 0; j < k; ++j)
            if (sizes[j] == 0 && !settled[j]) {
                empty = j;
                break;
            }
        if (empty == k) return out;

        std::size_t donor = data.size();
        double farthest = -1.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (!pinned.empty() && pinned[i]) continue;
            if (sizes[out.assignment[i]] < 2) continue;
            const double d = squared_distance(data.point(i), out.centers.row(out.assignment[i]));
            if (d > farthest) {
                farthest = d;
                donor = i;
            }
        }
        if (donor == data.size()) {
            settled[empty] = 1;
            continue;
        }
        out.assignment[donor] = empty;
        ++out.reseeded;
    }
}

namespace detail {

struct StepResult {
    Assignment assignment;
    std::vector<std::uint8_t> pinned;
};

/// Alternates `step` (centers -> assignment) with mean updates until the
/// objective stops falling by more than delta or tau iterations ran. An
/// iteration that would raise the objective is discarded and ends the run.
template <class T, class Step>
Clustering lloyd(const BasicGroupedDataset<T>& data, Matrix<double> centers, const RunControls& run, Step&& step) {
    const std::size_t k = centers.rows();
    Clustering out;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t q = 1; q <= run.tau; ++q) {
        StepResult s = step(std::as_const(centers));
        CenterUpdate update = recompute_centers(data, std::move(s.assignment), k, centers, s.pinned);
        const double phi = objective(data, update.assignment, update.centers);
        if (q > 1 && phi > previous) break;
        out.assignment = std::move(update.assignment);
        centers = std::move(update.centers);
        out.sse_trace.push_back(phi);
        if (q > 1 && previous - phi <= run.delta) break;
        previous = phi;
    }
    out.centers = std::move(centers);
    out.iterations = out.sse_trace.size();
    out.sse = out.sse_trace.back();
    return out;
}

}  // namespace detail

/// Unconstrained Lloyd k-means from `run.init` seeding.
template <class T>
Clustering kmeans_fit(const BasicGroupedDataset<T>& data, std::size_t k, const RunControls& run, Rng& rng) {
    if (run.tau < 1) throw InputError("tau must be at least 1");
    const auto init = init_centers(data, k, run.init, rng);
    return detail::lloyd(data, centers_from(data, init), run, [&](const Matrix<double>& centers) {
        return detail::StepResult{assign_nearest(data, centers), {}};
    });
}

/// Best of `restarts` k-means fits; restart i draws from Rng(seed, i).
template <class T>
Clustering kmeans_restarts(const BasicGroupedDataset<T>& data, std::size_t k, const RunControls& run,
                           std::size_t restarts, std::uint64_t seed, std::size_t workers = 1) {
    return best_of_restarts(restarts, seed, workers, [&](Rng& rng) { return kmeans_fit(data, k, run, rng); });
}

}  // namespace accordant
