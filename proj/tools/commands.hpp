#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "accordant/accordant.hpp"

namespace accordant::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_internal = 1,
    exit_infeasible = 2,
    exit_ingest = 3,
    exit_budget = 4,
    exit_usage = 64,
};

/// Raised for argument combinations CLI11 cannot express.
struct UsageError : Error {
    using Error::Error;
};

struct DataArgs {
    std::string path;
    std::string group_col = "group";
    bool standardize = false;

    GroupedDataset load() const {
        io::IngestConfig cfg;
        cfg.group_column = group_col;
        cfg.standardize = standardize;
        return io::load_csv(path, cfg);
    }
};

struct FitArgs {
    DataArgs data;
    std::string algo = "akmeans";
    std::size_t k = 0;
    std::size_t r = 1;
    double t = 0.0;
    std::size_t tau = 300;
    double delta = 1e-7;
    std::size_t restarts = 1;
    std::uint64_t seed = 0;
    std::string init = "distinct-groups";
    std::size_t threads = 1;
    std::string out;
    bool no_timing = false;

    AccordanceParams params() const {
        AccordanceParams p;
        p.k = k;
        p.r = r;
        p.t = t;
        p.run.tau = tau;
        p.run.delta = delta;
        p.run.init = *parse_init_mode(init);
        p.restarts = restarts;
        p.seed = seed;
        return p;
    }
};

inline void add_data_options(CLI::App& cmd, DataArgs& d) {
    cmd.add_option("--data", d.path, "CSV file with a header row")->required()->check(CLI::ExistingFile);
    cmd.add_option("--group-col", d.group_col, "column holding the group label")->capture_default_str();
    cmd.add_flag("--standardize", d.standardize, "z-score every feature after encoding");
}

inline void add_run_options(CLI::App& cmd, FitArgs& a) {
    cmd.add_option("--k", a.k, "number of clusters")->required()->check(CLI::PositiveNumber);
    cmd.add_option("--r", a.r, "groups that must be accordant")->capture_default_str();
    cmd.add_option("--t", a.t, "accordance fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--tau", a.tau, "iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--delta", a.delta, "convergence tolerance")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd.add_option("--restarts", a.restarts, "random restarts")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--seed", a.seed, "base seed")->capture_default_str();
    cmd.add_option("--init", a.init, "center initialization")
        ->capture_default_str()
        ->check(CLI::IsMember({"uniform", "distinct-groups"}));
    cmd.add_option("--threads", a.threads, "restart worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

/// Best-of-restarts fit with either engine. The baseline still reports accordance at t.
inline Clustering run_algo(const GroupedDataset& ds, const std::string& algo, const AccordanceParams& p,
                           std::size_t threads) {
    if (algo == "kmeans") {
        auto c = kmeans_restarts(ds, p.k, p.run, p.restarts, p.seed, threads);
        c.accordance = accordance_report(c.assignment, ds, p.t);
        return c;
    }
    return akmeans_restarts(ds, p, threads);
}

inline io::Metrics quality_metrics(const GroupedDataset& ds, const Assignment& a) {
    io::Metrics m;
    try {
        m.silhouette = silhouette(ds, a);
    } catch (const MetricError&) {
    }
    try {
        m.davies_bouldin = davies_bouldin(ds, a);
    } catch (const MetricError&) {
    }
    return m;
}

inline int cmd_fit(const FitArgs& a, std::ostream& out) {
    const auto ds = a.data.load();
    const auto p = a.params();
    p.validate(ds.group_count());

    const auto start = std::chrono::steady_clock::now();
    io::RunRecord rec;
    rec.algo = a.algo;
    rec.params = p;
    rec.clustering = run_algo(ds, a.algo, p, a.threads);
    const auto stop = std::chrono::steady_clock::now();
    rec.n = ds.size();
    rec.m = ds.group_count();
    rec.rho = ds.dims();
    rec.metrics = quality_metrics(ds, rec.clustering.assignment);
    rec.wall_ms = a.no_timing ? 0.0 : std::chrono::duration<double, std::milli>(stop - start).count();
    if (!a.out.empty()) io::write_result(rec, a.out);

    const auto& c = rec.clustering;
    const bool accordant = is_rt_accordant(c.assignment, ds, p.r, p.t);
    out << std::setprecision(10) << "algo=" << a.algo << " sse=" << c.sse << " iterations=" << c.iterations
        << " accordant_groups=" << c.accordance.size() << " accordant=" << (accordant ? "yes" : "no") << '\n';
    for (const auto& e : c.accordance)
        out << "  group " << ds.group_label(e.group) << " -> cluster " << e.cluster << " fraction " << e.fraction
            << '\n';
    return exit_ok;
}

struct FeasibleArgs {
    std::vector<std::size_t> sizes;
    DataArgs data;
    std::size_t r = 1;
    double t = 0.0;
};

inline GroupedDataset dataset_from_sizes(const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> groups;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        if (sizes[g] == 0) throw UsageError("group sizes must be positive");
        groups.insert(groups.end(), sizes[g], g);
    }
    if (groups.empty()) throw UsageError("--sizes needs at least one group");
    Matrix<double> points(groups.size(), 1, 0.0);
    return GroupedDataset(std::move(points), std::move(groups));
}

inline int cmd_feasible(const FeasibleArgs& a, std::ostream& out) {
    const auto ds = a.sizes.empty() ? a.data.load() : dataset_from_sizes(a.sizes);
    if (a.r < 1 || a.r > ds.group_count())
        throw UsageError("--r must lie in 1.." + std::to_string(ds.group_count()));
    const std::size_t max_k = feasible_k_range(ds, a.r, a.t);
    out << "N = " << ds.size() << ", m = " << ds.group_count() << '\n';
    out << "max k = " << max_k << '\n';
    out << "k 1.." << max_k << ": feasible\n";
    if (max_k < ds.size()) out << "k " << max_k + 1 << ".." << ds.size() << ": infeasible\n";
    return exit_ok;
}

struct CompareArgs {
    FitArgs fit;
    std::size_t seeds = 100;
};

struct CompareRow {
    std::string algo;
    std::size_t runs = 0;
    std::size_t accordant_runs = 0;
    std::optional<double> mean_sse;
    std::optional<double> ci_half_width;
};

/// Mean SSE over accordant runs with a normal-approximation 95% interval.
inline CompareRow summarize(const std::string& algo, const std::vector<double>& sse, const std::vector<bool>& ok) {
    CompareRow row{algo, sse.size(), 0, std::nullopt, std::nullopt};
    std::vector<double> kept;
    for (std::size_t i = 0; i < sse.size(); ++i)
        if (ok[i]) kept.push_back(sse[i]);
    row.accordant_runs = kept.size();
    if (kept.empty()) return row;
    double mean = 0.0;
    for (double v : kept) mean += v;
    mean /= static_cast<double>(kept.size());
    row.mean_sse = mean;
    if (kept.size() >= 2) {
        double var = 0.0;
        for (double v : kept) var += (v - mean) * (v - mean);
        var /= static_cast<double>(kept.size() - 1);
        row.ci_half_width = 1.96 * std::sqrt(var / static_cast<double>(kept.size()));
    }
    return row;
}

inline std::vector<CompareRow> run_compare(const GroupedDataset& ds, const CompareArgs& a) {
    std::vector<CompareRow> rows;
    for (const std::string algo : {"akmeans", "kmeans"}) {
        std::vector<double> sse;
        std::vector<bool> ok;
        for (std::size_t s = 0; s < a.seeds; ++s) {
            auto p = a.fit.params();
            p.seed = a.fit.seed + s;
            const auto c = run_algo(ds, algo, p, a.fit.threads);
            sse.push_back(c.sse);
            ok.push_back(is_rt_accordant(c.assignment, ds, p.r, p.t));
        }
        rows.push_back(summarize(algo, sse, ok));
    }
    return rows;
}

inline void write_compare_csv(const std::vector<CompareRow>& rows, std::ostream& out) {
    out << "algo,runs,accordant_runs,accordant_fraction,mean_sse,ci95_half_width\n";
    out << std::setprecision(12);
    for (const auto& row : rows) {
        out << row.algo << ',' << row.runs << ',' << row.accordant_runs << ','
            << static_cast<double>(row.accordant_runs) / static_cast<double>(row.runs) << ',';
        if (row.mean_sse) out << *row.mean_sse;
        out << ',';
        if (row.ci_half_width) out << *row.ci_half_width;
        out << '\n';
    }
}

inline int cmd_compare(const CompareArgs& a, std::ostream& out) {
    if (a.seeds < 2) throw UsageError("--seeds must be at least 2");
    const auto ds = a.fit.data.load();
    a.fit.params().validate(ds.group_count());
    const auto rows = run_compare(ds, a);
    if (a.fit.out.empty()) {
        write_compare_csv(rows, out);
    } else {
        std::ofstream file(a.fit.out);
        if (!file) throw Error("cannot write '" + a.fit.out + "'");
        write_compare_csv(rows, file);
    }
    return exit_ok;
}

struct OracleArgs {
    FitArgs fit;
    std::size_t batch = 0;
    std::size_t n = 10;
    std::size_t groups = 2;
    std::size_t dims = 2;
    double gap_tolerance = 0.05;
};

struct GapReport {
    double oracle_sse = 0.0;
    double heuristic_sse = 0.0;
    double gap = 0.0;  // (heuristic - oracle) / oracle
    double dist = 0.0;
};

/// Compares best-of-restarts Akmeans with the exhaustive optimum. At t = 0
/// the oracle is unconstrained.
inline std::optional<GapReport> oracle_gap(const GroupedDataset& ds, const AccordanceParams& p, std::size_t threads) {
    const auto opt = p.t > 0.0 ? optimal_accordant(ds, p.k, p.r, p.t) : optimal_unconstrained(ds, p.k);
    if (!opt.feasible) return std::nullopt;
    const auto fit = akmeans_restarts(ds, p, threads);
    GapReport g;
    g.oracle_sse = opt.sse;
    g.heuristic_sse = fit.sse;
    const double diff = fit.sse - opt.sse;
    g.gap = opt.sse > 0.0 ? diff / opt.sse : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    g.dist = clustering_distance(fit.assignment, opt.assignment, p.k).distance;
    return g;
}

inline int cmd_oracle(const OracleArgs& a, std::ostream& out) {
    out << std::setprecision(10);
    if (a.batch == 0) {
        if (a.fit.data.path.empty()) throw UsageError("oracle needs --data or --batch");
        const auto ds = a.fit.data.load();
        const auto p = a.fit.params();
        p.validate(ds.group_count());
        const std::size_t max_k = feasible_k_range(ds, p.r, p.t);
        if (p.k > max_k) throw InfeasibleError(p.k, max_k);
        const auto g = oracle_gap(ds, p, a.fit.threads);
        if (!g) throw InfeasibleError(p.k, max_k);
        out << "oracle_sse=" << g->oracle_sse << " akmeans_sse=" << g->heuristic_sse << " gap=" << g->gap
            << " dist=" << g->dist << '\n';
        return exit_ok;
    }

    if (a.fit.r > a.groups) throw UsageError("--r exceeds --groups");
    if (a.groups > a.n) throw UsageError("--groups exceeds --n");
    if (const auto need = assignment_count(a.n, a.fit.k); need > oracle_budget) throw BudgetError(need, oracle_budget);
    Rng rng(a.fit.seed);
    std::size_t within = 0, evaluated = 0;
    double worst = 0.0;
    out << "instance,oracle_sse,akmeans_sse,gap,dist\n";
    for (std::size_t i = 0; i < a.batch; ++i) {
        const auto inst = io::random_mixture(rng, a.n, a.groups, a.dims, a.fit.k);
        auto p = a.fit.params();
        p.seed = a.fit.seed + i;
        if (p.k > feasible_k_range(inst.dataset, p.r, p.t)) continue;
        const auto g = oracle_gap(inst.dataset, p, a.fit.threads);
        if (!g) continue;
        ++evaluated;
        within += g->gap <= a.gap_tolerance;
        worst = std::max(worst, g->gap);
        out << i << ',' << g->oracle_sse << ',' << g->heuristic_sse << ',' << g->gap << ',' << g->dist << '\n';
    }
    out << "within " << a.gap_tolerance * 100.0 << "%: " << within << '/' << evaluated << ", worst gap " << worst
        << '\n';
    return exit_ok;
}

struct SynthArgs {
    std::string preset;
    std::string spec_path;
    std::uint64_t seed = 0;
    std::size_t per_component = 100;
    std::string out;
};

/// {"seed": s, "components": [{"center": [...], "stddev": 1, "count": 100}],
///  "overlay": [0, {"axis": 0, "threshold": 10, "below": 1, "above": 2}]}
inline io::SynthSpec parse_synth_spec(const nlohmann::json& j) {
    try {
        io::SynthSpec spec;
        spec.seed = j.value("seed", std::uint64_t{0});
        for (const auto& c : j.at("components"))
            spec.components.push_back({c.at("center").get<std::vector<double>>(), c.value("stddev", 1.0),
                                       c.at("count").get<std::size_t>()});
        if (j.contains("overlay"))
            for (const auto& rule : j.at("overlay")) {
                if (rule.is_number_unsigned()) {
                    spec.overlay.emplace_back(rule.get<std::size_t>());
                } else {
                    spec.overlay.emplace_back(io::SplitRule{rule.at("axis").get<std::size_t>(),
                                                            rule.at("threshold").get<double>(),
                                                            rule.at("below").get<std::size_t>(),
                                                            rule.at("above").get<std::size_t>()});
                }
            }
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError(std::string("malformed synthetic spec: ") + e.what());
    }
}

inline void write_synth_csv(const io::SynthData& s, const std::string& path) {
    std::ofstream data(path);
    if (!data) throw Error("cannot write '" + path + "'");
    const auto& ds = s.dataset;
    for (std::size_t d = 0; d < ds.dims(); ++d) data << 'x' << d << ',';
    data << "group\n" << std::setprecision(17);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double v : ds.point(i)) data << v << ',';
        data << ds.group_label(ds.group_of(i)) << '\n';
    }
    std::ofstream planted(path + ".planted.csv");
    if (!planted) throw Error("cannot write '" + path + ".planted.csv'");
    planted << "planted\n";
    for (auto c : s.planted) planted << c << '\n';
}

inline int cmd_synth(const SynthArgs& a, std::ostream& out) {
    io::SynthSpec spec;
    if (!a.spec_path.empty()) {
        std::ifstream in(a.spec_path);
        if (!in) throw IngestError("cannot open '" + a.spec_path + "'");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw IngestError(std::string("malformed synthetic spec: ") + e.what());
        }
        spec = parse_synth_spec(j);
    } else if (a.preset == "four-gaussians") {
        spec = io::four_gaussians(a.seed, a.per_component);
    } else {
        throw UsageError("synth needs --spec or --preset four-gaussians");
    }
    const auto s = io::generate(spec);
    write_synth_csv(s, a.out);
    out << "wrote " << s.dataset.size() << " points, " << s.dataset.group_count() << " groups to " << a.out << '\n';
    return exit_ok;
}

/// Parses and runs one command line. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Accordant clustering: k-means with group accordance constraints"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "cluster a CSV file and write a result JSON");
    add_data_options(*fit_cmd, fit.data);
    add_run_options(*fit_cmd, fit);
    fit_cmd->add_option("--algo", fit.algo, "engine")->capture_default_str()->check(CLI::IsMember({"akmeans", "kmeans"}));
    fit_cmd->add_option("--out", fit.out, "result JSON path");
    fit_cmd->add_flag("--no-timing", fit.no_timing, "write wall_ms as 0 for byte-identical reruns");

    FeasibleArgs feas;
    auto* feas_cmd = app.add_subcommand("feasible", "largest k admitting an accordant clustering");
    auto* sizes_opt = feas_cmd->add_option("--sizes", feas.sizes, "comma-separated group sizes")->delimiter(',');
    auto* data_opt = feas_cmd->add_option("--data", feas.data.path, "CSV file")->check(CLI::ExistingFile);
    feas_cmd->add_option("--group-col", feas.data.group_col, "column holding the group label")->capture_default_str();
    sizes_opt->excludes(data_opt);
    feas_cmd->add_option("--r", feas.r, "groups that must be accordant")->capture_default_str();
    feas_cmd->add_option("--t", feas.t, "accordance fraction")->capture_default_str()->check(CLI::Range(0.0, 1.0));

    CompareArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "SSE table for akmeans and kmeans over many seeds (CSV)");
    add_data_options(*cmp_cmd, cmp.fit.data);
    add_run_options(*cmp_cmd, cmp.fit);
    cmp_cmd->add_option("--seeds", cmp.seeds, "runs per algorithm")->capture_default_str();
    cmp_cmd->add_option("--out", cmp.fit.out, "CSV path; stdout when omitted");

    OracleArgs orc;
    orc.fit.restarts = 50;
    auto* orc_cmd = app.add_subcommand("oracle", "gap between Akmeans and the exhaustive optimum");
    orc_cmd->add_option("--data", orc.fit.data.path, "CSV file")->check(CLI::ExistingFile);
    orc_cmd->add_option("--group-col", orc.fit.data.group_col, "column holding the group label")->capture_default_str();
    orc_cmd->add_flag("--standardize", orc.fit.data.standardize, "z-score every feature after encoding");
    add_run_options(*orc_cmd, orc.fit);
    orc_cmd->add_option("--batch", orc.batch, "random instances instead of --data");
    orc_cmd->add_option("--n", orc.n, "points per batch instance")->capture_default_str();
    orc_cmd->add_option("--groups", orc.groups, "groups per batch instance")->capture_default_str();
    orc_cmd->add_option("--dims", orc.dims, "dimensions per batch instance")->capture_default_str();

    SynthArgs syn;
    auto* syn_cmd = app.add_subcommand("synth", "write a synthetic Gaussian-mixture CSV and planted labels");
    auto* preset_opt = syn_cmd->add_option("--preset", syn.preset, "built-in layout")
                           ->check(CLI::IsMember({"four-gaussians"}));
    auto* spec_opt = syn_cmd->add_option("--spec", syn.spec_path, "JSON mixture spec")->check(CLI::ExistingFile);
    preset_opt->excludes(spec_opt);
    syn_cmd->add_option("--seed", syn.seed, "generator seed (preset only)")->capture_default_str();
    syn_cmd->add_option("--per-component", syn.per_component, "points per component (preset only)")
        ->capture_default_str();
    syn_cmd->add_option("--out", syn.out, "CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit, out);
        if (*feas_cmd) {
            if (feas.sizes.empty() && feas.data.path.empty()) throw UsageError("feasible needs --sizes or --data");
            return cmd_feasible(feas, out);
        }
        if (*cmp_cmd) return cmd_compare(cmp, out);
        if (*orc_cmd) return cmd_oracle(orc, out);
        return cmd_synth(syn, out);
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const IngestError& e) {
        err << "ingestion error: " << e.what() << '\n';
        return exit_ingest;
    } catch (const BudgetError& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return exit_budget;
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const InitError& e) {
        err << "usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const InputError& e) {
        err << "usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_internal;
    }
}

}  // namespace accordant::cli
