#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

using namespace accordant;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::initializer_list<std::string> args) {
    std::vector<std::string> storage{"accordant"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : storage) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("accordant_cli_" + name)).string();
}

const std::string iris = std::string(ACCORDANT_DATA_DIR) + "/iris.csv";

/// Random mixture written as CSV, for configurations shaped like the two case studies.
std::string mixture_csv(const std::string& name, std::size_t n, std::size_t groups, std::uint64_t seed) {
    Rng rng(seed);
    const auto path = temp_path(name);
    cli::write_synth_csv(io::random_mixture(rng, n, groups, 4, 6), path);
    return path;
}

}  // namespace

TEST(CliFeasible, BoundExamples) {
    auto res = run({"feasible", "--sizes", "4,6", "--r", "1", "--t", "0.75"});
    EXPECT_EQ(res.code, cli::exit_ok);
    EXPECT_NE(res.out.find("max k = 8"), std::string::npos);
    res = run({"feasible", "--sizes", "4,6", "--r", "1", "--t", "0"});
    EXPECT_NE(res.out.find("max k = 10"), std::string::npos);
    res = run({"feasible", "--data", iris, "--group-col", "species", "--r", "3", "--t", "1"});
    EXPECT_EQ(res.code, cli::exit_ok);
    EXPECT_NE(res.out.find("max k = 3"), std::string::npos);
}

TEST(CliFeasible, UsageErrors) {
    EXPECT_EQ(run({"feasible", "--sizes", "4,6", "--r", "3", "--t", "0.5"}).code, cli::exit_usage);
    EXPECT_EQ(run({"feasible", "--r", "1"}).code, cli::exit_usage);
    EXPECT_EQ(run({"feasible", "--sizes", "4,6", "--t", "1.5"}).code, cli::exit_usage);
    EXPECT_EQ(run({"bogus"}).code, cli::exit_usage);
    EXPECT_EQ(run({}).code, cli::exit_usage);
}

TEST(CliFit, WritesResultAndIsDeterministic) {
    const auto a = temp_path("fit_a.json"), b = temp_path("fit_b.json");
    for (const auto& path : {a, b}) {
        const auto res = run({"fit", "--data", iris, "--group-col", "species", "--k", "3", "--t", "0.5", "--r", "2",
                              "--restarts", "4", "--seed", "11", "--out", path, "--no-timing"});
        ASSERT_EQ(res.code, cli::exit_ok) << res.err;
        EXPECT_NE(res.out.find("sse="), std::string::npos);
        EXPECT_NE(res.out.find("iterations="), std::string::npos);
        EXPECT_NE(res.out.find("accordant=yes"), std::string::npos);
    }
    EXPECT_EQ(slurp(a), slurp(b));
    const auto rec = io::read_result(a);
    EXPECT_EQ(rec.n, 150u);
    EXPECT_EQ(rec.m, 3u);
    EXPECT_EQ(rec.rho, 4u);
    EXPECT_EQ(rec.params.seed, 11u);
    EXPECT_EQ(rec.clustering.sse_trace.size(), rec.clustering.iterations);
    EXPECT_TRUE(rec.metrics.silhouette.has_value());
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST(CliFit, BaselineReportsButDoesNotEnforce) {
    const auto path = temp_path("fit_kmeans.json");
    const auto res = run({"fit", "--algo", "kmeans", "--data", iris, "--group-col", "species", "--k", "3", "--t",
                          "0.99", "--r", "3", "--seed", "2", "--out", path});
    ASSERT_EQ(res.code, cli::exit_ok) << res.err;
    const auto rec = io::read_result(path);
    EXPECT_EQ(rec.algo, "kmeans");
    EXPECT_NE(res.out.find("accordant=no"), std::string::npos);
    std::filesystem::remove(path);
}

TEST(CliFit, CaseStudyShapedConfigurations) {
    const auto health = mixture_csv("health.csv", 400, 5, 1);
    auto res = run({"fit", "--algo", "akmeans", "--data", health, "--k", "4", "--t", "0.75", "--r", "2", "--restarts",
                    "3"});
    EXPECT_EQ(res.code, cli::exit_ok) << res.err;
    EXPECT_NE(res.out.find("accordant=yes"), std::string::npos);
    const auto spend = mixture_csv("spend.csv", 600, 25, 2);
    res = run({"fit", "--algo", "akmeans", "--data", spend, "--k", "5", "--t", "0.8", "--r", "1", "--restarts", "3"});
    EXPECT_EQ(res.code, cli::exit_ok) << res.err;
    EXPECT_NE(res.out.find("accordant=yes"), std::string::npos);
    std::filesystem::remove(health);
    std::filesystem::remove(spend);
}

TEST(CliFit, ExitCodes) {
    auto res = run({"fit", "--data", iris, "--group-col", "species", "--k", "120", "--t", "0.5", "--r", "3",
                    "--init", "uniform"});
    EXPECT_EQ(res.code, cli::exit_infeasible);
    EXPECT_NE(res.err.find("1..78"), std::string::npos);  // 150 - 3 * 25 + 3
    EXPECT_EQ(run({"fit", "--data", iris, "--k", "3"}).code, cli::exit_ingest);  // no "group" column
    const auto bad = temp_path("bad.csv");
    {
        std::ofstream out(bad);
        out << "x,group\n1,a\nfoo,b\n,a\n";
    }
    res = run({"fit", "--data", bad, "--k", "1"});
    EXPECT_EQ(res.code, cli::exit_ingest);
    EXPECT_NE(res.err.find("row 3"), std::string::npos);
    std::filesystem::remove(bad);
    EXPECT_EQ(run({"fit", "--data", iris, "--group-col", "species", "--k", "4"}).code, cli::exit_usage);  // 4 > m
    EXPECT_EQ(run({"fit", "--data", iris, "--group-col", "species", "--k", "3", "--r", "4", "--t", "0.5"}).code,
              cli::exit_usage);
    EXPECT_EQ(run({"fit", "--data", "/nonexistent.csv", "--k", "3"}).code, cli::exit_usage);
}

TEST(CliCompare, AkmeansAlwaysAccordantAndTableIsReproducible) {
    const std::initializer_list<std::string> args{"compare", "--data", iris, "--group-col", "species", "--k", "3",
                                                  "--t", "0.9", "--r", "3", "--seeds", "10", "--init", "uniform"};
    const auto first = run(args);
    ASSERT_EQ(first.code, cli::exit_ok) << first.err;
    EXPECT_EQ(first.out, run(args).out);
    std::istringstream table(first.out);
    std::string header, akm, km;
    std::getline(table, header);
    std::getline(table, akm);
    std::getline(table, km);
    EXPECT_EQ(header, "algo,runs,accordant_runs,accordant_fraction,mean_sse,ci95_half_width");
    EXPECT_EQ(akm.rfind("akmeans,10,10,1,", 0), 0u) << akm;
    EXPECT_EQ(km.rfind("kmeans,10,", 0), 0u) << km;
    EXPECT_EQ(run({"compare", "--data", iris, "--group-col", "species", "--k", "3", "--seeds", "1"}).code,
              cli::exit_usage);
}

TEST(CliCompare, NoAccordantBaselineRunsLeavesSseEmpty) {
    const auto row = cli::summarize("kmeans", {1.0, 2.0}, {false, false});
    EXPECT_EQ(row.accordant_runs, 0u);
    EXPECT_FALSE(row.mean_sse.has_value());
    const auto some = cli::summarize("kmeans", {1.0, 2.0, 9.0}, {true, true, false});
    EXPECT_DOUBLE_EQ(*some.mean_sse, 1.5);
    EXPECT_NEAR(*some.ci_half_width, 1.96 * std::sqrt(0.5 / 2.0), 1e-12);
}

TEST(CliOracle, SingleAndBatch) {
    const auto small = temp_path("small.csv");
    {
        std::ofstream out(small);
        out << "x,y,group\n0,0,a\n1,0,b\n0,1,a\n9,9,b\n10,9,a\n9,10,b\n5,5,a\n";
    }
    auto res = run({"oracle", "--data", small, "--k", "2", "--t", "0"});
    ASSERT_EQ(res.code, cli::exit_ok) << res.err;
    EXPECT_NE(res.out.find("gap="), std::string::npos);
    res = run({"oracle", "--data", small, "--k", "2", "--t", "1", "--r", "2"});
    EXPECT_EQ(res.code, cli::exit_ok) << res.err;
    EXPECT_EQ(run({"oracle", "--data", small, "--k", "7", "--t", "1", "--r", "2", "--init", "uniform"}).code,
              cli::exit_infeasible);
    std::filesystem::remove(small);

    res = run({"oracle", "--batch", "10", "--n", "10", "--k", "2", "--r", "1", "--t", "0.8", "--init", "uniform"});
    ASSERT_EQ(res.code, cli::exit_ok) << res.err;
    EXPECT_NE(res.out.find("within 5%: "), std::string::npos);
    EXPECT_EQ(res.out.find(",-"), std::string::npos);  // no negative gaps
    res = run({"oracle", "--batch", "1", "--n", "40", "--k", "2"});
    EXPECT_EQ(res.code, cli::exit_budget);
    EXPECT_NE(res.err.find("1099511627776"), std::string::npos);
}

TEST(CliSynth, PresetAndSpecFiles) {
    const auto csv = temp_path("synth.csv");
    auto res = run({"synth", "--preset", "four-gaussians", "--seed", "5", "--out", csv});
    ASSERT_EQ(res.code, cli::exit_ok) << res.err;
    const auto first = slurp(csv);
    ASSERT_EQ(run({"synth", "--preset", "four-gaussians", "--seed", "5", "--out", csv}).code, cli::exit_ok);
    EXPECT_EQ(first, slurp(csv));
    io::IngestConfig cfg;
    const auto ds = io::load_csv(csv, cfg);
    EXPECT_EQ(ds.size(), 400u);
    EXPECT_EQ(ds.group_count(), 6u);

    const auto spec = temp_path("spec.json");
    {
        std::ofstream out(spec);
        out << R"({"seed": 3, "components": [{"center": [0, 0], "stddev": 1, "count": 30},
                   {"center": [8, 0], "count": 20}],
                   "overlay": [0, {"axis": 0, "threshold": 8, "below": 1, "above": 2}]})";
    }
    res = run({"synth", "--spec", spec, "--out", csv});
    ASSERT_EQ(res.code, cli::exit_ok) << res.err;
    const auto from_spec = io::load_csv(csv, cfg);
    EXPECT_EQ(from_spec.size(), 50u);
    EXPECT_EQ(from_spec.group_count(), 3u);
    EXPECT_EQ(slurp(csv + ".planted.csv").substr(0, 10), "planted\n0\n");

    EXPECT_EQ(run({"synth", "--out", csv}).code, cli::exit_usage);
    {
        std::ofstream out(spec);
        out << "{\"components\": 3}";
    }
    EXPECT_EQ(run({"synth", "--spec", spec, "--out", csv}).code, cli::exit_ingest);
    std::filesystem::remove(spec);
    std::filesystem::remove(csv);
    std::filesystem::remove(csv + ".planted.csv");
}
