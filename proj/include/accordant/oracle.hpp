#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "accordant/clustering.hpp"
#include "accordant/dataset.hpp"
#include "accordant/error.hpp"
#include "accordant/kmeans.hpp"
#include "accordant/matrix.hpp"

namespace accordant {

/// Exhaustive optimum over all partitions of the points into exactly k
/// non-empty clusters.
struct OracleResult {
    bool feasible = false;
    double sse = std::numeric_limits<double>::infinity();
    Assignment assignment;         // canonical: cluster ids in first-use order
    std::uint64_t evaluated = 0;   // partitions scored
};

inline constexpr std::uint64_t oracle_budget = 100'000'000;

/// k^N, saturating at the largest uint64.
inline std::uint64_t assignment_count(std::size_t n, std::size_t k) {
    constexpr auto top = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (k != 0 && total > top / k) return top;
        total *= k;
    }
    return total;
}

namespace detail {

template <class T>
class PartitionSearch {
public:
    PartitionSearch(const BasicGroupedDataset<T>& data, std::size_t k, std::optional<std::pair<std::size_t, double>> rt)
        : data_(data), k_(k), rt_(rt), labels_(data.size(), 0), group_counts_(data.group_count(), k, 0) {
        if (rt_) {
            required_.resize(data.group_count());
            for (std::size_t g = 0; g < data.group_count(); ++g)
                required_[g] = required_count(rt_->second, data.group_size(g));
        }
    }

    OracleResult run() {
        if (k_ <= data_.size()) descend(0, 0);
        return std::move(best_);
    }

private:
    // Restricted growth strings: point i may join clusters 0..used or open cluster `used`.
    void descend(std::size_t i, std::size_t used) {
        const std::size_t n = data_.size();
        if (i == n) {
            if (used == k_) score();
            return;
        }
        if (used + (n - i) < k_) return;
        const std::size_t limit = used < k_ ? used + 1 : k_;
        for (std::size_t c = 0; c < limit; ++c) {
            labels_[i] = c;
            ++group_counts_(data_.group_of(i), c);
            descend(i + 1, c == used ? used + 1 : used);
            --group_counts_(data_.group_of(i), c);
        }
    }

    bool accordant() const {
        std::size_t hits = 0;
        for (std::size_t g = 0; g < data_.group_count(); ++g)
            for (std::size_t c = 0; c < k_; ++c)
                if (group_counts_(g, c) >= required_[g]) {
                    ++hits;
                    break;
                }
        return hits >= rt_->first;
    }

    void score() {
        if (rt_ && !accordant()) return;
        ++best_.evaluated;
        cluster_means(data_, labels_, Matrix<double>(k_, data_.dims(), 0.0), means_, sizes_);
        const double value = objective(data_, labels_, means_);
        // Enumeration runs in lexicographic order, so strict < keeps the smallest tie.
        if (!best_.feasible || value < best_.sse) {
            best_.feasible = true;
            best_.sse = value;
            best_.assignment = labels_;
        }
    }

    const BasicGroupedDataset<T>& data_;
    std::size_t k_;
    std::optional<std::pair<std::size_t, double>> rt_;
    Assignment labels_;
    Matrix<std::size_t> group_counts_;
    std::vector<std::size_t> required_;
    Matrix<double> means_;
    std::vector<std::size_t> sizes_;
    OracleResult best_;
};

template <class T>
void check_budget(const BasicGroupedDataset<T>& data, std::size_t k) {
    if (k < 1) throw InputError("k must be at least 1");
    const auto need = assignment_count(data.size(), k);
    if (need > oracle_budget) throw BudgetError(need, oracle_budget);
}

}  // namespace detail

/// Lowest-SSE (r,t)-accordant partition into exactly k clusters, scored with
/// mean centers. `feasible` is false when no such partition exists.
template <class T>
OracleResult optimal_accordant(const BasicGroupedDataset<T>& data, std::size_t k, std::size_t r, double t) {
    detail::check_budget(data, k);
    if (!(t >= 0.0 && t <= 1.0)) throw InputError("t must lie in [0, 1]");
    if (r > data.group_count()) throw InputError("r exceeds the group count");
    return detail::PartitionSearch<T>(data, k, std::pair{r, t}).run();
}

template <class T>
OracleResult optimal_unconstrained(const BasicGroupedDataset<T>& data, std::size_t k) {
    detail::check_budget(data, k);
    return detail::PartitionSearch<T>(data, k, std::nullopt).run();
}

}  // namespace accordant
