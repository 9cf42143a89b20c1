#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <thread>
#include <vector>

#include "accordant/clustering.hpp"
#include "accordant/error.hpp"
#include "accordant/rng.hpp"

namespace accordant {

/// Runs `fit(rng)` for restarts 0..n-1, restart i on Rng(seed, i), and keeps
/// the lowest-SSE result (lowest restart index on ties). With workers > 1 the
/// restarts run on a thread pool; the result does not depend on scheduling.
template <class Fit>
Clustering best_of_restarts(std::size_t restarts, std::uint64_t seed, std::size_t workers, Fit&& fit) {
    if (restarts < 1) throw InputError("restarts must be at least 1");
    std::vector<std::optional<Clustering>> results(restarts);
    std::vector<std::exception_ptr> errors(restarts);
    auto run_one = [&](std::size_t i) {
        try {
            Rng rng(seed, i);
            results[i] = fit(rng);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    workers = std::min(workers, restarts);
    if (workers <= 1) {
        for (std::size_t i = 0; i < restarts; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < restarts; i = next++) run_one(i);
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::size_t best = 0;
    for (std::size_t i = 1; i < restarts; ++i)
        if (results[i]->sse < results[best]->sse) best = i;
    return std::move(*results[best]);
}

}  // namespace accordant
