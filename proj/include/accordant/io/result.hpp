#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "accordant/clustering.hpp"
#include "accordant/error.hpp"
#include "accordant/params.hpp"

namespace accordant::io {

inline constexpr int result_schema_version = 1;

struct Metrics {
    std::optional<double> silhouette;
    std::optional<double> davies_bouldin;

    bool operator==(const Metrics&) const = default;
};

/// Everything a result file holds.
struct RunRecord {
    std::string algo = "akmeans";
    AccordanceParams params;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t rho = 0;
    Clustering clustering;
    Metrics metrics;
    double wall_ms = 0.0;
};

inline nlohmann::json to_json(const RunRecord& rec) {
    using nlohmann::json;
    const auto& p = rec.params;
    const auto& c = rec.clustering;
    json centers = json::array();
    for (std::size_t j = 0; j < c.centers.rows(); ++j) {
        const auto row = c.centers.row(j);
        centers.push_back(std::vector<double>(row.begin(), row.end()));
    }
    json groups = json::array();
    for (const auto& e : c.accordance)
        groups.push_back({{"group", e.group}, {"cluster", e.cluster}, {"fraction", e.fraction},
                          {"forced_count", e.forced_count}});
    json metrics = json::object();
    if (rec.metrics.silhouette) metrics["silhouette"] = *rec.metrics.silhouette;
    if (rec.metrics.davies_bouldin) metrics["davies_bouldin"] = *rec.metrics.davies_bouldin;

    return {
        {"schema_version", result_schema_version},
        {"algo", rec.algo},
        {"params",
         {{"k", p.k}, {"r", p.r}, {"t", p.t}, {"tau", p.run.tau}, {"delta", p.run.delta},
          {"restarts", p.restarts}, {"seed", p.seed}, {"init_mode", std::string(to_string(p.run.init))}}},
        {"n", rec.n},
        {"m", rec.m},
        {"rho", rec.rho},
        {"assignment", c.assignment},
        {"centers", std::move(centers)},
        {"sse", c.sse},
        {"sse_trace", c.sse_trace},
        {"iterations", c.iterations},
        {"accordant_groups", std::move(groups)},
        {"metrics", std::move(metrics)},
        {"wall_ms", rec.wall_ms},
    };
}

inline RunRecord record_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema_version").get<int>() != result_schema_version)
            throw InputError("unsupported result schema version");
        RunRecord rec;
        rec.algo = j.value("algo", std::string("akmeans"));
        const auto& p = j.at("params");
        rec.params.k = p.at("k").get<std::size_t>();
        rec.params.r = p.at("r").get<std::size_t>();
        rec.params.t = p.at("t").get<double>();
        rec.params.run.tau = p.at("tau").get<std::size_t>();
        rec.params.run.delta = p.at("delta").get<double>();
        rec.params.restarts = p.at("restarts").get<std::size_t>();
        rec.params.seed = p.at("seed").get<std::uint64_t>();
        const auto mode = parse_init_mode(p.at("init_mode").get<std::string>());
        if (!mode) throw InputError("unknown init_mode in result file");
        rec.params.run.init = *mode;
        rec.n = j.at("n").get<std::size_t>();
        rec.m = j.at("m").get<std::size_t>();
        rec.rho = j.at("rho").get<std::size_t>();

        auto& c = rec.clustering;
        c.assignment = j.at("assignment").get<Assignment>();
        const auto rows = j.at("centers").get<std::vector<std::vector<double>>>();
        c.centers = Matrix<double>(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != c.centers.cols()) throw InputError("ragged centers in result file");
            for (std::size_t col = 0; col < rows[r].size(); ++col) c.centers(r, col) = rows[r][col];
        }
        c.sse = j.at("sse").get<double>();
        c.sse_trace = j.at("sse_trace").get<std::vector<double>>();
        c.iterations = j.at("iterations").get<std::size_t>();
        for (const auto& e : j.at("accordant_groups"))
            c.accordance.push_back({e.at("group").get<std::size_t>(), e.at("cluster").get<std::size_t>(),
                                    e.at("fraction").get<double>(), e.at("forced_count").get<std::size_t>()});
        const auto& metrics = j.at("metrics");
        if (metrics.contains("silhouette")) rec.metrics.silhouette = metrics["silhouette"].get<double>();
        if (metrics.contains("davies_bouldin")) rec.metrics.davies_bouldin = metrics["davies_bouldin"].get<double>();
        rec.wall_ms = j.at("wall_ms").get<double>();
        return rec;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed result file: ") + e.what());
    }
}

inline void write_result(const RunRecord& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << to_json(rec).dump(2) << '\n';
    if (!out) throw Error("failed writing '" + path + "'");
}

inline RunRecord read_result(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed result file: ") + e.what());
    }
    return record_from_json(j);
}

}  // namespace accordant::io
