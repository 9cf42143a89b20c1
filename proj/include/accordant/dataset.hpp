#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "accordant/error.hpp"
#include "accordant/matrix.hpp"

namespace accordant {

/// Per-point cluster ids.
using Assignment = std::vector<std::size_t>;

/// Number of a group's members that must share one cluster for the group to
/// be t-accordant: the ceiling of t*n. A 1e-9 allowance absorbs the rounding
/// of t*n in binary (0.1*30 must give 3, not 4).
inline std::size_t required_count(double t, std::size_t group_size) {
    if (t <= 0.0) return 0;
    const double product = t * static_cast<double>(group_size);
    const auto count = static_cast<std::size_t>(std::ceil(product - 1e-9));
    return count > group_size ? group_size : count;
}

/// Points X partitioned into m predefined groups X_0..X_{m-1}.
///
/// Group ids are dense in first-appearance order; the original labels are
/// kept for reporting. Immutable after construction.
template <class T = double>
class BasicGroupedDataset {
public:
    using scalar_type = T;

    /// Groups from arbitrary labels, numbered by first appearance.
    BasicGroupedDataset(Matrix<T> points, std::span<const std::string> labels)
        : points_(std::move(points)) {
        if (labels.size() != points_.rows())
            throw InputError("group label count " + std::to_string(labels.size()) +
                             " does not match point count " + std::to_string(points_.rows()));
        std::unordered_map<std::string, std::size_t> ids;
        group_of_.reserve(labels.size());
        for (const auto& label : labels) {
            auto [it, inserted] = ids.try_emplace(label, labels_.size());
            if (inserted) labels_.push_back(label);
            group_of_.push_back(it->second);
        }
        finish();
    }

    /// Groups from integer ids that must already be dense (every id in 0..m-1 used).
    BasicGroupedDataset(Matrix<T> points, std::vector<std::size_t> group_of)
        : points_(std::move(points)), group_of_(std::move(group_of)) {
        if (group_of_.size() != points_.rows())
            throw InputError("group id count " + std::to_string(group_of_.size()) +
                             " does not match point count " + std::to_string(points_.rows()));
        std::size_t m = 0;
        for (auto g : group_of_) m = std::max(m, g + 1);
        labels_.reserve(m);
        for (std::size_t g = 0; g < m; ++g) labels_.push_back(std::to_string(g));
        finish();
    }

    std::size_t size() const noexcept { return points_.rows(); }
    std::size_t dims() const noexcept { return points_.cols(); }
    std::size_t group_count() const noexcept { return members_.size(); }

    const Matrix<T>& points() const noexcept { return points_; }
    std::span<const T> point(std::size_t i) const { return points_.row(i); }

    std::size_t group_of(std::size_t i) const { return group_of_[i]; }
    std::span<const std::size_t> group_ids() const noexcept { return group_of_; }

    /// Sorted member rows of group g.
    std::span<const std::size_t> members(std::size_t g) const { return members_[g]; }
    std::size_t group_size(std::size_t g) const { return members_[g].size(); }
    const std::string& group_label(std::size_t g) const { return labels_[g]; }

    std::size_t max_group_size() const {
        std::size_t n = 0;
        for (const auto& m : members_) n = std::max(n, m.size());
        return n;
    }

private:
    void finish() {
        if (points_.rows() == 0) throw InputError("dataset has no points");
        if (points_.cols() == 0) throw InputError("dataset has no features");
        for (std::size_t i = 0; i < points_.rows(); ++i)
            for (std::size_t c = 0; c < points_.cols(); ++c)
                if (!std::isfinite(static_cast<double>(points_(i, c))))
                    throw InputError("non-finite feature at row " + std::to_string(i) +
                                     ", column " + std::to_string(c));
        members_.assign(labels_.size(), {});
        for (std::size_t i = 0; i < group_of_.size(); ++i) members_[group_of_[i]].push_back(i);
        for (std::size_t g = 0; g < members_.size(); ++g)
            if (members_[g].empty()) throw InputError("group " + std::to_string(g) + " has no members");
    }

    Matrix<T> points_;
    std::vector<std::size_t> group_of_;
    std::vector<std::string> labels_;
    std::vector<std::vector<std::size_t>> members_;
};

using GroupedDataset = BasicGroupedDataset<double>;

}  // namespace accordant
