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
#include "accordant/kmeans.hpp"
#include "accordant/matrix.hpp"
#include "accordant/params.hpp"
#include "accordant/restarts.hpp"
#include "accordant/rng.hpp"

namespace accordant {

namespace detail {

inline void check_rt(std::size_t r, double t, std::size_t group_count) {
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("t must lie in [0, 1]");
    if (r > group_count)
        throw InputError("r=" + std::to_string(r) + " exceeds the group count " + std::to_string(group_count));
}

/// Group ids ordered by (size, id).
template <class T>
std::vector<std::size_t> groups_by_size(const BasicGroupedDataset<T>& data) {
    std::vector<std::size_t> order(data.group_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.group_size(a) < data.group_size(b); });
    return order;
}

}  // namespace detail

/// Largest k for which an (r,t)-accordant k-clustering exists:
/// N - sum of ceil(t*n_i) over the r smallest groups + r, capped at N.
template <class T>
std::size_t feasible_k_range(const BasicGroupedDataset<T>& data, std::size_t r, double t) {
    detail::check_rt(r, t, data.group_count());
    const auto order = detail::groups_by_size(data);
    std::size_t forced = 0;
    for (std::size_t i = 0; i < r; ++i) forced += required_count(t, data.group_size(order[i]));
    return std::min(data.size(), data.size() - forced + r);
}

/// Deterministic (r,t)-accordant clustering with exactly k non-empty clusters,
/// built from the forced sets of the smallest groups. Serves as a
/// feasibility witness.
template <class T>
Clustering construct_feasible(const BasicGroupedDataset<T>& data, std::size_t k, std::size_t r, double t) {
    const std::size_t max_k = feasible_k_range(data, r, t);
    if (k < 1 || k > max_k) throw InfeasibleError(k, max_k);

    const std::size_t n = data.size();
    const std::size_t last = k - 1;
    Assignment assignment(n, last);
    std::vector<std::uint8_t> placed(n, 0);
    std::size_t next_cluster = 0;

    if (t > 0.0 && r > 0) {
        const auto order = detail::groups_by_size(data);
        // With r >= k, k-1 forced sets get their own cluster and everything
        // else (which contains whole groups) lands in the last one.
        const std::size_t own = r >= k ? k - 1 : r;
        for (std::size_t i = 0; i < own; ++i, ++next_cluster) {
            const auto members = data.members(order[i]);
            const std::size_t need = required_count(t, members.size());
            for (std::size_t p = 0; p < need; ++p) {
                assignment[members[p]] = next_cluster;
                placed[members[p]] = 1;
            }
        }
    }
    // Leftover points: singletons until only the last cluster remains open.
    for (std::size_t i = 0; i < n && next_cluster < last; ++i) {
        if (placed[i]) continue;
        assignment[i] = next_cluster++;
        placed[i] = 1;
    }

    Clustering out;
    const Matrix<double> zero(k, data.dims(), 0.0);
    std::vector<std::size_t> sizes;
    detail::cluster_means(data, assignment, zero, out.centers, sizes);
    out.sse = objective(data, assignment, out.centers);
    out.assignment = std::move(assignment);
    out.accordance = accordance_report(out.assignment, data, t);
    return out;
}

/// N x k squared distances D and penalties P_ij = D_ij - min_l D_il.
struct PenaltyMatrix {
    Matrix<double> distances;
    Matrix<double> penalties;
};

template <class T>
PenaltyMatrix compute_penalties(const BasicGroupedDataset<T>& data, const Matrix<double>& centers) {
    const std::size_t k = centers.rows();
    PenaltyMatrix pm{Matrix<double>(data.size(), k), Matrix<double>(data.size(), k)};
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < k; ++j) {
            const double d = squared_distance(p, centers.row(j));
            pm.distances(i, j) = d;
            nearest = std::min(nearest, d);
        }
        for (std::size_t j = 0; j < k; ++j) pm.penalties(i, j) = pm.distances(i, j) - nearest;
    }
    return pm;
}

/// A group pinned to a center for one iteration.
struct Pairing {
    std::size_t group = 0;
    std::size_t center = 0;
    std::vector<std::size_t> forced;  // ceil(t*n_g) lowest-penalty members, ascending penalty
    double penalty = 0.0;
};

struct PairingPlan {
    std::vector<Pairing> pairs;
    double total_penalty = 0.0;
};

namespace detail {

/// The `need` members of a group with the smallest penalty towards `center`,
/// ties broken by lower point index. Returns them in that order.
inline std::vector<std::size_t> lowest_penalty_members(const Matrix<double>& penalties,
                                                       std::span<const std::size_t> members, std::size_t center,
                                                       std::size_t need, std::vector<std::size_t>& scratch) {
    scratch.assign(members.begin(), members.end());
    auto less = [&](std::size_t a, std::size_t b) {
        const double pa = penalties(a, center), pb = penalties(b, center);
        return pa < pb || (pa == pb && a < b);
    };
    std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(need), scratch.end(), less);
    return {scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(need)};
}

inline double penalty_sum(const Matrix<double>& penalties, std::span<const std::size_t> points, std::size_t center) {
    double s = 0.0;
    for (auto i : points) s += penalties(i, center);
    return s;
}

}  // namespace detail

/// Chooses r (group, center) pairs with distinct groups.
///
/// The cost of a pair is the penalty sum of the group's ceil(t*n_g) cheapest
/// members for that center. Pairs are taken greedily in ascending
/// (cost, group, center) order, skipping groups already taken; centers may
/// repeat. Taking each group's cheapest pair and then the r cheapest groups
/// makes the greedy total minimal over all plans with distinct groups.
template <class T>
PairingPlan select_pairings(const PenaltyMatrix& pm, const BasicGroupedDataset<T>& data, std::size_t r, double t) {
    detail::check_rt(r, t, data.group_count());
    const std::size_t k = pm.penalties.cols();
    if (pm.penalties.rows() != data.size()) throw InputError("penalty matrix rows do not match the dataset");

    struct Candidate {
        double cost;
        std::size_t group;
        std::size_t center;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(data.group_count() * k);
    std::vector<std::size_t> scratch;
    for (std::size_t g = 0; g < data.group_count(); ++g) {
        const auto members = data.members(g);
        const std::size_t need = required_count(t, members.size());
        for (std::size_t j = 0; j < k; ++j) {
            const auto chosen = detail::lowest_penalty_members(pm.penalties, members, j, need, scratch);
            candidates.push_back({detail::penalty_sum(pm.penalties, chosen, j), g, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        if (a.group != b.group) return a.group < b.group;
        return a.center < b.center;
    });

    PairingPlan plan;
    std::vector<std::uint8_t> taken(data.group_count(), 0);
    for (const auto& c : candidates) {
        if (plan.pairs.size() == r) break;
        if (taken[c.group]) continue;
        taken[c.group] = 1;
        const auto members = data.members(c.group);
        Pairing pair{c.group, c.center,
                     detail::lowest_penalty_members(pm.penalties, members, c.center,
                                                    required_count(t, members.size()), scratch),
                     c.cost};
        plan.total_penalty += pair.penalty;
        plan.pairs.push_back(std::move(pair));
    }
    return plan;
}

/// Constrained assignment for fixed centers: forced points of the plan go to
/// their paired center, all other points to the nearest center.
struct AccordantStep {
    PairingPlan plan;
    Assignment assignment;
    std::vector<std::uint8_t> pinned;
};

template <class T>
AccordantStep accordant_assign(const BasicGroupedDataset<T>& data, const Matrix<double>& centers, std::size_t r,
                               double t) {
    const auto pm = compute_penalties(data, centers);
    AccordantStep step{select_pairings(pm, data, r, t), Assignment(data.size()),
                       std::vector<std::uint8_t>(data.size(), 0)};
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < centers.rows(); ++j)
            if (pm.distances(i, j) < pm.distances(i, best)) best = j;
        step.assignment[i] = best;
    }
    for (const auto& pair : step.plan.pairs)
        for (auto i : pair.forced) {
            step.assignment[i] = pair.center;
            step.pinned[i] = 1;
        }
    return step;
}

namespace detail {

template <class T>
Clustering akmeans_loop(const BasicGroupedDataset<T>& data, const AccordanceParams& params, Rng& rng) {
    const auto init = init_centers(data, params.k, params.run.init, rng);
    return lloyd(data, centers_from(data, init), params.run, [&](const Matrix<double>& centers) {
        auto step = accordant_assign(data, centers, params.r, params.t);
        return StepResult{std::move(step.assignment), std::move(step.pinned)};
    });
}

}  // namespace detail

/// Accordant k-means. Every iteration's clustering is (r,t)-accordant and the
/// objective never increases. With t = 0 or r = 0 this is kmeans_fit.
template <class T>
Clustering akmeans_fit(const BasicGroupedDataset<T>& data, const AccordanceParams& params, Rng& rng) {
    detail::check_rt(params.r, params.t, data.group_count());
    if (params.run.tau < 1) throw InputError("tau must be at least 1");
    Clustering out;
    if (params.t == 0.0 || params.r == 0) {
        out = kmeans_fit(data, params.k, params.run, rng);
    } else {
        const std::size_t max_k = feasible_k_range(data, params.r, params.t);
        if (params.k > max_k) throw InfeasibleError(params.k, max_k);
        out = detail::akmeans_loop(data, params, rng);
    }
    out.accordance = accordance_report(out.assignment, data, params.t);
    return out;
}

/// Best of params.restarts Akmeans fits; restart i draws from
/// Rng(params.seed, i), so restarts = 1 equals akmeans_fit with Rng(params.seed).
template <class T>
Clustering akmeans_restarts(const BasicGroupedDataset<T>& data, const AccordanceParams& params,
                            std::size_t workers = 1) {
    detail::check_rt(params.r, params.t, data.group_count());
    if (params.t > 0.0 && params.r > 0) {
        const std::size_t max_k = feasible_k_range(data, params.r, params.t);
        if (params.k > max_k) throw InfeasibleError(params.k, max_k);
    }
    return best_of_restarts(params.restarts, params.seed, workers,
                            [&](Rng& rng) { return akmeans_fit(data, params, rng); });
}

}  // namespace accordant
