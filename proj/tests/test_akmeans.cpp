#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "accordant/accordant.hpp"
#include "test_support.hpp"

using namespace accordant;
using accordant::testing::line_dataset;
using accordant::testing::make_dataset;
using accordant::testing::random_feasible_config;

namespace {

GroupedDataset sizes_4_6() {
    std::vector<double> xs(10);
    for (std::size_t i = 0; i < 10; ++i) xs[i] = static_cast<double>(i * i);
    return line_dataset(xs, {0, 1, 0, 1, 0, 1, 0, 1, 1, 1});
}

GroupedDataset iris() {
    io::IngestConfig cfg;
    cfg.group_column = std::string("species");
    return io::load_csv(std::string(ACCORDANT_DATA_DIR) + "/iris.csv", cfg);
}

std::size_t nonempty_clusters(const Assignment& a) { return std::set<std::size_t>(a.begin(), a.end()).size(); }

bool trace_monotone(const std::vector<double>& trace) {
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i] > trace[i - 1] + 1e-9) return false;
    return true;
}

/// Smallest sum of `need` values among all subsets, by enumeration.
double brute_min_subset(const std::vector<double>& values, std::size_t need) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = values.size();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != need) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s += values[i];
        best = std::min(best, s);
    }
    return best;
}

AccordanceParams params_for(std::size_t k, std::size_t r, double t, InitMode init) {
    AccordanceParams p;
    p.k = k;
    p.r = r;
    p.t = t;
    p.run.init = init;
    return p;
}

}  // namespace

TEST(FeasibleKRange, ClosedFormBound) {
    const auto ds = sizes_4_6();
    EXPECT_EQ(feasible_k_range(ds, 1, 0.75), 8u);  // 10 - ceil(3) + 1
    EXPECT_EQ(feasible_k_range(ds, 2, 0.75), 10u - 3u - 5u + 2u);
    EXPECT_EQ(feasible_k_range(ds, 1, 0.0), 10u);  // N + r capped at N
    EXPECT_EQ(feasible_k_range(ds, 2, 1.0), 2u);   // r = m, t = 1 gives m
    EXPECT_THROW(feasible_k_range(ds, 3, 0.5), InputError);
    EXPECT_THROW(feasible_k_range(ds, 1, 1.5), InputError);
}

TEST(ConstructFeasible, SingleClusterAlwaysWorks) {
    const auto ds = sizes_4_6();
    for (std::size_t r = 1; r <= 2; ++r)
        for (double t : {0.0, 0.5, 1.0}) {
            const auto c = construct_feasible(ds, 1, r, t);
            EXPECT_TRUE(is_rt_accordant(c.assignment, ds, r, t));
            EXPECT_EQ(nonempty_clusters(c.assignment), 1u);
        }
}

TEST(ConstructFeasible, SucceedsAtBoundAndFailsPastIt) {
    const auto ds = sizes_4_6();
    const auto c = construct_feasible(ds, 8, 1, 0.75);
    EXPECT_TRUE(is_rt_accordant(c.assignment, ds, 1, 0.75));
    EXPECT_EQ(nonempty_clusters(c.assignment), 8u);
    EXPECT_EQ(c.k(), 8u);
    try {
        construct_feasible(ds, 9, 1, 0.75);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.max_k(), 8u);
        EXPECT_EQ(e.requested_k(), 9u);
    }
}

TEST(ConstructFeasible, EveryFeasibleKOnRandomInstances) {
    Rng rng(31);
    for (int trial = 0; trial < 150; ++trial) {
        const auto inst = io::random_mixture(rng, 5 + rng.uniform_index(25), 1 + rng.uniform_index(5), 2, 3);
        const auto& ds = inst.dataset;
        const std::size_t r = 1 + rng.uniform_index(ds.group_count());
        const double t = rng.uniform01();
        const std::size_t max_k = feasible_k_range(ds, r, t);
        for (std::size_t k = 1; k <= max_k; ++k) {
            const auto c = construct_feasible(ds, k, r, t);
            ASSERT_TRUE(is_rt_accordant(c.assignment, ds, r, t)) << "k=" << k;
            ASSERT_EQ(nonempty_clusters(c.assignment), k);
            EXPECT_NEAR(c.sse, sse(ds, c.assignment), 1e-9);
        }
        EXPECT_THROW(construct_feasible(ds, max_k + 1, r, t), InfeasibleError);
    }
}

TEST(ComputePenalties, PenaltyExampleValues) {
    const Matrix<double> centers{{0.0, 0.0}, {3.0, 0.0}};
    const auto ds = make_dataset({{-2.0 / 3.0, std::sqrt(14.0) / 3.0}, {2.0 / 3.0, std::sqrt(221.0) / 3.0}}, {0, 0});
    const auto pm = compute_penalties(ds, centers);
    EXPECT_DOUBLE_EQ(pm.penalties(0, 0), 0.0);
    EXPECT_NEAR(pm.penalties(0, 1), 13.0, 1e-12);
    EXPECT_DOUBLE_EQ(pm.penalties(1, 0), 0.0);
    EXPECT_NEAR(pm.penalties(1, 1), 5.0, 1e-12);
}

TEST(ComputePenalties, EquidistantPointHasZeroRow) {
    const auto ds = make_dataset({{0.0, 0.0}}, {0});
    const Matrix<double> centers{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
    const auto pm = compute_penalties(ds, centers);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(pm.penalties(0, j), 0.0);
}

TEST(ComputePenalties, NonNegativeWithAZeroPerRow) {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const auto inst = io::random_mixture(rng, 30, 3, 3, 4);
        Matrix<double> centers(4, 3);
        for (auto& v : centers.values()) v = rng.uniform(-6, 6);
        const auto pm = compute_penalties(inst.dataset, centers);
        for (std::size_t i = 0; i < pm.penalties.rows(); ++i) {
            bool zero = false;
            for (std::size_t j = 0; j < 4; ++j) {
                EXPECT_GE(pm.penalties(i, j), 0.0);
                zero |= pm.penalties(i, j) == 0.0;
            }
            EXPECT_TRUE(zero);
        }
    }
}

TEST(SelectPairings, LowerPenaltyPointIsForced) {
    // Only the second center's column: x1 costs 13 there, x2 costs 5.
    const auto ds = make_dataset({{0.0}, {1.0}}, {0, 0});
    PenaltyMatrix pm{Matrix<double>{{15.0}, {30.0}}, Matrix<double>{{13.0}, {5.0}}};
    const auto plan = select_pairings(pm, ds, 1, 0.5);
    ASSERT_EQ(plan.pairs.size(), 1u);
    EXPECT_EQ(plan.pairs[0].forced, (std::vector<std::size_t>{1}));
    EXPECT_DOUBLE_EQ(plan.total_penalty, 5.0);
}

TEST(SelectPairings, ZeroFractionForcesNothing) {
    const auto ds = line_dataset({0, 1, 2, 3}, {0, 0, 1, 1});
    const Matrix<double> centers{{0.0}, {3.0}};
    const auto plan = select_pairings(compute_penalties(ds, centers), ds, 2, 0.0);
    ASSERT_EQ(plan.pairs.size(), 2u);
    for (const auto& p : plan.pairs) EXPECT_TRUE(p.forced.empty());
    EXPECT_EQ(plan.total_penalty, 0.0);
}

TEST(SelectPairings, GreedyMayReuseACenter) {
    // Pair costs [[1, 2], [1, 3]] (group x center), r = 2.
    const auto ds = line_dataset({0.0, 1.0}, {0, 1});
    PenaltyMatrix pm{Matrix<double>(2, 2, 0.0), Matrix<double>{{1.0, 2.0}, {1.0, 3.0}}};
    const auto plan = select_pairings(pm, ds, 2, 1.0);
    ASSERT_EQ(plan.pairs.size(), 2u);
    EXPECT_EQ(plan.pairs[0].group, 0u);
    EXPECT_EQ(plan.pairs[0].center, 0u);
    EXPECT_EQ(plan.pairs[1].group, 1u);
    EXPECT_EQ(plan.pairs[1].center, 0u);
    EXPECT_DOUBLE_EQ(plan.total_penalty, 2.0);
    // every distinct-group selection: one center per group
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) best = std::min(best, pm.penalties(0, a) + pm.penalties(1, b));
    EXPECT_DOUBLE_EQ(plan.total_penalty, best);
}

TEST(SelectPairings, ForcedSetsAreOptimalSubsets) {
    Rng rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 4 + rng.uniform_index(21);
        const auto inst = io::random_mixture(rng, n, 1 + rng.uniform_index(3), 2, 3);
        const auto& ds = inst.dataset;
        if (ds.max_group_size() > 12) continue;
        Matrix<double> centers(3, 2);
        for (auto& v : centers.values()) v = rng.uniform(-5, 5);
        const auto pm = compute_penalties(ds, centers);
        const double t = rng.uniform01();
        const auto plan = select_pairings(pm, ds, 1 + rng.uniform_index(ds.group_count()), t);
        std::set<std::size_t> groups;
        for (const auto& pair : plan.pairs) {
            groups.insert(pair.group);
            std::vector<double> column;
            for (auto i : ds.members(pair.group)) column.push_back(pm.penalties(i, pair.center));
            const std::size_t need = required_count(t, ds.group_size(pair.group));
            ASSERT_EQ(pair.forced.size(), need);
            EXPECT_NEAR(pair.penalty, brute_min_subset(column, need), 1e-9);
            for (auto i : pair.forced) EXPECT_EQ(ds.group_of(i), pair.group);
        }
        EXPECT_EQ(groups.size(), plan.pairs.size());
    }
}

TEST(SelectPairings, GreedyTotalIsMinimalOverDistinctGroupPlans) {
    Rng rng(78);
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = io::random_mixture(rng, 8 + rng.uniform_index(10), 2 + rng.uniform_index(3), 2, 3);
        const auto& ds = inst.dataset;
        const std::size_t k = 2 + rng.uniform_index(2);
        Matrix<double> centers(k, 2);
        for (auto& v : centers.values()) v = rng.uniform(-5, 5);
        const auto pm = compute_penalties(ds, centers);
        const double t = rng.uniform01();
        const std::size_t m = ds.group_count();
        const std::size_t r = 1 + rng.uniform_index(m);
        const auto plan = select_pairings(pm, ds, r, t);

        // cost table by brute force, then every (group subset, center choice)
        std::vector<std::vector<double>> cost(m, std::vector<double>(k));
        for (std::size_t g = 0; g < m; ++g)
            for (std::size_t j = 0; j < k; ++j) {
                std::vector<double> column;
                for (auto i : ds.members(g)) column.push_back(pm.penalties(i, j));
                cost[g][j] = brute_min_subset(column, required_count(t, ds.group_size(g)));
            }
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
            if (static_cast<std::size_t>(__builtin_popcount(mask)) != r) continue;
            double total = 0.0;
            for (std::size_t g = 0; g < m; ++g)
                if (mask & (1u << g)) total += *std::min_element(cost[g].begin(), cost[g].end());
            best = std::min(best, total);
        }
        EXPECT_NEAR(plan.total_penalty, best, 1e-9);
    }
}

TEST(AccordantAssign, AlwaysAccordantForAnyCenters) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = io::random_mixture(rng, 5 + rng.uniform_index(40), 1 + rng.uniform_index(5), 2, 3);
        const auto& ds = inst.dataset;
        const auto cfg = random_feasible_config(rng, ds, 6);
        Matrix<double> centers(cfg.k, 2);
        for (auto& v : centers.values()) v = rng.uniform(-6, 6);
        const auto step = accordant_assign(ds, centers, cfg.r, cfg.t);
        EXPECT_TRUE(is_rt_accordant(step.assignment, ds, cfg.r, cfg.t));
        // the mean update never moves pinned points, so accordance survives it
        const auto upd = recompute_centers(ds, step.assignment, cfg.k, centers, step.pinned);
        EXPECT_TRUE(is_rt_accordant(upd.assignment, ds, cfg.r, cfg.t));
    }
}

TEST(AkmeansFit, ZeroFractionEqualsKMeans) {
    Rng gen(6);
    const auto inst = io::random_mixture(gen, 120, 4, 3, 4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto p = params_for(3, 2, 0.0, InitMode::distinct_groups);
        Rng a(seed), b(seed), c(seed);
        const auto base = kmeans_fit(inst.dataset, 3, p.run, a);
        const auto acc = akmeans_fit(inst.dataset, p, b);
        EXPECT_EQ(base.assignment, acc.assignment);
        EXPECT_EQ(base.sse_trace, acc.sse_trace);
        // the constrained loop itself degenerates to the same iteration at t = 0
        const auto loop = detail::akmeans_loop(inst.dataset, p, c);
        EXPECT_EQ(base.assignment, loop.assignment);
        EXPECT_EQ(base.sse_trace, loop.sse_trace);
    }
}

TEST(AkmeansFit, MatchesKMeansWhenConstraintIsTrivial) {
    // k = 3 on three groups of 50: some cluster always holds >= 17 of a group,
    // so t = 0.2 (10 members) can never bind.
    const auto ds = iris();
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto p = params_for(3, 1, 0.2, InitMode::distinct_groups);
        Rng a(seed), b(seed);
        const auto base = kmeans_fit(ds, 3, p.run, a);
        ASSERT_TRUE(is_rt_accordant(base.assignment, ds, 1, 0.2));
        const auto acc = akmeans_fit(ds, p, b);
        EXPECT_EQ(base.assignment, acc.assignment);
    }
}

TEST(AkmeansFit, RandomRunsAreAccordantAndMonotone) {
    Rng rng(7);
    for (int trial = 0; trial < 150; ++trial) {
        const auto inst = io::random_mixture(rng, 10 + rng.uniform_index(80), 1 + rng.uniform_index(6), 2,
                                             1 + rng.uniform_index(4));
        const auto& ds = inst.dataset;
        const auto cfg = random_feasible_config(rng, ds, 6);
        auto p = params_for(cfg.k, cfg.r, cfg.t, cfg.k <= ds.group_count() ? InitMode::distinct_groups
                                                                            : InitMode::uniform);
        Rng fit_rng(trial);
        const auto c = akmeans_fit(ds, p, fit_rng);
        EXPECT_TRUE(is_rt_accordant(c.assignment, ds, cfg.r, cfg.t));
        EXPECT_TRUE(trace_monotone(c.sse_trace));
        EXPECT_EQ(c.sse_trace.size(), c.iterations);
        EXPECT_GE(c.accordance.size(), cfg.r);
        EXPECT_NEAR(c.sse, objective(ds, c.assignment, c.centers), 1e-9);
    }
}

TEST(AkmeansFit, HealthCareAndSpendShapedConfigurations) {
    Rng rng(8);
    struct Shape {
        std::size_t groups, k, r;
        double t;
    };
    for (const auto& shape : {Shape{5, 4, 2, 0.75}, Shape{25, 5, 1, 0.8}}) {
        const auto inst = io::random_mixture(rng, 500, shape.groups, 4, 6);
        auto p = params_for(shape.k, shape.r, shape.t, InitMode::distinct_groups);
        p.restarts = 5;
        p.seed = 3;
        const auto c = akmeans_restarts(inst.dataset, p);
        EXPECT_TRUE(is_rt_accordant(c.assignment, inst.dataset, shape.r, shape.t));
        EXPECT_TRUE(trace_monotone(c.sse_trace));
    }
}

TEST(AkmeansFit, InfeasibleAndInitErrors) {
    const auto ds = sizes_4_6();
    Rng rng(0);
    try {
        akmeans_fit(ds, params_for(9, 1, 0.75, InitMode::uniform), rng);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.max_k(), 8u);
    }
    EXPECT_THROW(akmeans_fit(ds, params_for(11, 1, 0.0, InitMode::uniform), rng), InitError);
    EXPECT_THROW(akmeans_fit(ds, params_for(3, 1, 0.5, InitMode::distinct_groups), rng), InitError);
    EXPECT_THROW(akmeans_fit(ds, params_for(2, 3, 0.5, InitMode::uniform), rng), InputError);
}

TEST(AkmeansRestarts, SingleRestartEqualsSingleFit) {
    Rng gen(9);
    const auto inst = io::random_mixture(gen, 60, 3, 2, 3);
    auto p = params_for(3, 2, 0.6, InitMode::distinct_groups);
    p.seed = 1234;
    Rng rng(p.seed);
    const auto single = akmeans_fit(inst.dataset, p, rng);
    const auto best = akmeans_restarts(inst.dataset, p);
    EXPECT_EQ(single.assignment, best.assignment);
    EXPECT_EQ(single.sse_trace, best.sse_trace);
}

TEST(AkmeansRestarts, BestIsNoWorseThanAnyRestart) {
    Rng gen(10);
    const auto inst = io::random_mixture(gen, 12, 3, 2, 3);
    auto p = params_for(3, 1, 0.8, InitMode::uniform);
    p.restarts = 50;
    p.seed = 55;
    const auto best = akmeans_restarts(inst.dataset, p);
    for (std::size_t i = 0; i < p.restarts; ++i) {
        Rng rng(p.seed, i);
        EXPECT_LE(best.sse, akmeans_fit(inst.dataset, p, rng).sse);
    }
    EXPECT_EQ(best.assignment, akmeans_restarts(inst.dataset, p, 4).assignment);
}

TEST(AkmeansRestarts, RecoversPlantedGaussians) {
    const auto synth = io::generate(io::four_gaussians(2024));
    auto p = params_for(4, 2, 0.75, InitMode::distinct_groups);
    p.restarts = 20;
    p.seed = 1;
    const auto c = akmeans_restarts(synth.dataset, p);
    EXPECT_LE(clustering_distance(c.assignment, synth.planted, 4).distance, 0.05);
    EXPECT_TRUE(is_rt_accordant(c.assignment, synth.dataset, 2, 0.75));
}
