#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace accordant {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: mismatched sizes, out-of-range ids, bad parameters.
class InputError : public Error {
public:
    using Error::Error;
};

/// No (r,t)-accordant clustering exists for the requested k.
class InfeasibleError : public Error {
public:
    InfeasibleError(std::size_t requested_k, std::size_t max_k)
        : Error("no accordant clustering with k=" + std::to_string(requested_k) +
                "; feasible k range is 1.." + std::to_string(max_k)),
          requested_k_(requested_k),
          max_k_(max_k) {}

    std::size_t requested_k() const noexcept { return requested_k_; }
    std::size_t max_k() const noexcept { return max_k_; }

private:
    std::size_t requested_k_;
    std::size_t max_k_;
};

/// Center initialization cannot be satisfied (k > N, or k > m in distinct-groups mode).
class InitError : public Error {
public:
    using Error::Error;
};

class IngestError : public Error {
public:
    using Error::Error;
};

/// Exhaustive enumeration would exceed its budget.
class BudgetError : public Error {
public:
    BudgetError(std::uint64_t required, std::uint64_t budget)
        : Error("enumeration needs " + std::to_string(required) + " assignments, budget is " +
                std::to_string(budget)),
          required_(required) {}

    std::uint64_t required() const noexcept { return required_; }

private:
    std::uint64_t required_;
};

/// A quality metric is undefined for the given clustering.
class MetricError : public Error {
public:
    using Error::Error;
};

}  // namespace accordant
