#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <variant>
#include <vector>

#include "accordant/dataset.hpp"
#include "accordant/error.hpp"
#include "accordant/matrix.hpp"

namespace accordant::io {

struct IngestConfig {
    /// Column holding the group label, by header name or 0-based index.
    std::variant<std::string, std::size_t> group_column = std::string("group");
    /// Feature columns by header name; empty means every other column.
    std::vector<std::string> feature_columns;
    /// z-score each feature after encoding.
    bool standardize = false;
    /// One-hot encode feature columns holding non-numeric cells; when false
    /// such a cell is an error.
    bool one_hot = true;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Splits one record; double quotes group fields and "" escapes a quote.
inline std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.emplace_back(trim(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    fields.emplace_back(trim(field));
    return fields;
}

inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split_record(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size())
            throw IngestError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                              " fields, header has " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw IngestError("empty CSV input");
    if (table.rows.empty()) throw IngestError("CSV has a header but no data rows");
    return table;
}

/// Builds a grouped dataset from a parsed table. Rows keep their order;
/// groups are numbered by first appearance.
inline GroupedDataset to_dataset(const CsvTable& table, const IngestConfig& config) {
    const auto& header = table.header;
    auto column_of = [&](const std::string& name) -> std::size_t {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) return c;
        throw IngestError("missing column '" + name + "'");
    };

    std::size_t group_col = 0;
    if (const auto* name = std::get_if<std::string>(&config.group_column)) {
        group_col = column_of(*name);
    } else {
        group_col = std::get<std::size_t>(config.group_column);
        if (group_col >= header.size())
            throw IngestError("group column index " + std::to_string(group_col) + " out of range");
    }

    std::vector<std::size_t> features;
    if (config.feature_columns.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (c != group_col) features.push_back(c);
    } else {
        for (const auto& name : config.feature_columns) {
            const auto c = column_of(name);
            if (c == group_col) throw IngestError("group column '" + name + "' cannot also be a feature");
            features.push_back(c);
        }
    }
    if (features.empty()) throw IngestError("no feature columns");

    // Per source column: numeric, or the one-hot category list in first-appearance order.
    struct Encoding {
        std::size_t column;
        std::vector<std::string> categories;  // empty for numeric columns
    };
    std::vector<Encoding> encodings;
    std::size_t width = 0;
    for (auto c : features) {
        Encoding enc{c, {}};
        bool categorical = false;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& cell = table.rows[r][c];
            if (detail::trim(cell).empty())
                throw IngestError("missing value at row " + std::to_string(r + 1) + ", column '" + header[c] + "'");
            if (detail::parse_number(cell)) continue;
            if (!config.one_hot)
                throw IngestError("non-numeric value '" + cell + "' at row " + std::to_string(r + 1) +
                                  ", column '" + header[c] + "'");
            categorical = true;
        }
        if (categorical) {
            std::unordered_map<std::string, std::size_t> seen;
            for (const auto& row : table.rows)
                if (seen.try_emplace(row[c], enc.categories.size()).second) enc.categories.push_back(row[c]);
            width += enc.categories.size();
        } else {
            width += 1;
        }
        encodings.push_back(std::move(enc));
    }

    Matrix<double> points(table.rows.size(), width, 0.0);
    std::vector<std::string> labels;
    labels.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (detail::trim(row[group_col]).empty())
            throw IngestError("missing group label at row " + std::to_string(r + 1));
        labels.push_back(row[group_col]);
        std::size_t out = 0;
        for (const auto& enc : encodings) {
            if (enc.categories.empty()) {
                points(r, out++) = *detail::parse_number(row[enc.column]);
                continue;
            }
            for (const auto& cat : enc.categories) points(r, out++) = row[enc.column] == cat ? 1.0 : 0.0;
        }
    }

    if (config.standardize) {
        const double n = static_cast<double>(points.rows());
        for (std::size_t c = 0; c < points.cols(); ++c) {
            double mean = 0.0;
            for (std::size_t r = 0; r < points.rows(); ++r) mean += points(r, c);
            mean /= n;
            double var = 0.0;
            for (std::size_t r = 0; r < points.rows(); ++r) var += (points(r, c) - mean) * (points(r, c) - mean);
            const double sd = std::sqrt(var / n);
            for (std::size_t r = 0; r < points.rows(); ++r)
                points(r, c) = sd > 0.0 ? (points(r, c) - mean) / sd : 0.0;
        }
    }
    return GroupedDataset(std::move(points), labels);
}

inline GroupedDataset load_csv(std::istream& in, const IngestConfig& config) {
    return to_dataset(read_csv(in), config);
}

inline GroupedDataset load_csv(const std::string& path, const IngestConfig& config) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open '" + path + "'");
    return load_csv(in, config);
}

}  // namespace accordant::io
