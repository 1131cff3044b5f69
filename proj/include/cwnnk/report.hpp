#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cwnnk/error.hpp"
#include "cwnnk/overlap.hpp"

namespace cwnnk::report {

// -----------------------------------------------------------------------------
// CSV (RFC 4180)
// -----------------------------------------------------------------------------

using CsvTable = std::vector<std::vector<std::string>>;

inline std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

inline std::string to_csv(const CsvTable& table) {
    std::string out;
    for (const auto& row : table) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += csv_escape(row[c]);
        }
        out += "\r\n";
    }
    return out;
}

inline CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    for (std::size_t p = 0; p < text.size(); ++p) {
        const char ch = text[p];
        if (quoted) {
            if (ch == '"') {
                if (p + 1 < text.size() && text[p + 1] == '"') {
                    field += '"';
                    ++p;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        switch (ch) {
        case '"':
            detail::require(field.empty(), ErrorCode::parse_error, "stray quote inside unquoted CSV field");
            quoted = true;
            field_started = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            row.push_back(std::move(field));
            field.clear();
            table.push_back(std::move(row));
            row.clear();
            field_started = false;
            break;
        default:
            field += ch;
            field_started = true;
        }
    }
    detail::require(!quoted, ErrorCode::parse_error, "unterminated quoted CSV field");
    if (field_started || !row.empty()) {
        row.push_back(std::move(field));
        table.push_back(std::move(row));
    }
    return table;
}

/// Shortest representation that reads back to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    detail::require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::parse_error,
                    "not a number: '" + std::string(s) + "'");
    return v;
}

// -----------------------------------------------------------------------------
// depth series
// -----------------------------------------------------------------------------

/// One layer of one model in a depth series.
struct SweepRow {
    std::string model_tag; // e.g. dropout rate
    std::size_t layer_index = 0;
    std::string layer_name;
    double cw_overlap = 0.0;
    double cw_overlap_pair_normalized = 0.0;
    double mean_channel_nnk_count = 0.0;
    std::optional<double> mean_aggregate_nnk_count;
    std::optional<double> test_error;

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::string> warnings;
};

/// Depth series for one model. Reports are taken in the given (depth) order;
/// differing channel counts across layers are allowed.
inline SweepResult layer_sweep(const std::vector<OverlapReport>& reports, const std::string& model_tag,
                               std::optional<double> test_error = std::nullopt) {
    detail::require(!reports.empty(), ErrorCode::invalid_input, "layer sweep needs at least one report");
    SweepResult out;
    for (std::size_t l = 0; l < reports.size(); ++l) {
        const auto& r = reports[l];
        if (r.layer_name.empty()) out.warnings.push_back("layer " + std::to_string(l) + " has no layer tag");
        SweepRow row;
        row.model_tag = model_tag;
        row.layer_index = l;
        row.layer_name = r.layer_name;
        row.cw_overlap = r.cw_overlap;
        row.cw_overlap_pair_normalized = r.cw_overlap_pair_normalized;
        double sum = 0.0;
        for (double v : r.mean_nnk_count_per_channel) sum += v;
        row.mean_channel_nnk_count =
            r.mean_nnk_count_per_channel.empty() ? 0.0 : sum / static_cast<double>(r.mean_nnk_count_per_channel.size());
        row.mean_aggregate_nnk_count = r.mean_aggregate_nnk_count;
        row.test_error = test_error;
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{"model_tag",
                                               "layer_index",
                                               "layer_name",
                                               "cw_overlap",
                                               "cw_overlap_pair_normalized",
                                               "mean_channel_nnk_count",
                                               "mean_aggregate_nnk_count",
                                               "test_error"};
    return cols;
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    CsvTable t;
    t.push_back(sweep_columns());
    for (const auto& r : rows) {
        t.push_back({r.model_tag, std::to_string(r.layer_index), r.layer_name, format_number(r.cw_overlap),
                     format_number(r.cw_overlap_pair_normalized), format_number(r.mean_channel_nnk_count),
                     r.mean_aggregate_nnk_count ? format_number(*r.mean_aggregate_nnk_count) : "",
                     r.test_error ? format_number(*r.test_error) : ""});
    }
    return to_csv(t);
}

inline std::vector<SweepRow> sweep_from_csv(std::string_view text) {
    const auto t = parse_csv(text);
    detail::require(!t.empty() && t.front() == sweep_columns(), ErrorCode::parse_error, "unexpected sweep CSV header");
    std::vector<SweepRow> rows;
    for (std::size_t r = 1; r < t.size(); ++r) {
        const auto& f = t[r];
        detail::require(f.size() == sweep_columns().size(), ErrorCode::parse_error, "sweep CSV row has wrong width");
        SweepRow row;
        row.model_tag = f[0];
        row.layer_index = static_cast<std::size_t>(parse_number(f[1]).value_or(0.0));
        row.layer_name = f[2];
        row.cw_overlap = parse_number(f[3]).value_or(0.0);
        row.cw_overlap_pair_normalized = parse_number(f[4]).value_or(0.0);
        row.mean_channel_nnk_count = parse_number(f[5]).value_or(0.0);
        row.mean_aggregate_nnk_count = parse_number(f[6]);
        row.test_error = parse_number(f[7]);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline nlohmann::json to_json(const SweepRow& r) {
    return {{"model_tag", r.model_tag},
            {"layer_index", r.layer_index},
            {"layer_name", r.layer_name},
            {"cw_overlap", r.cw_overlap},
            {"cw_overlap_pair_normalized", r.cw_overlap_pair_normalized},
            {"mean_channel_nnk_count", r.mean_channel_nnk_count},
            {"mean_aggregate_nnk_count",
             r.mean_aggregate_nnk_count ? nlohmann::json(*r.mean_aggregate_nnk_count) : nlohmann::json(nullptr)},
            {"test_error", r.test_error ? nlohmann::json(*r.test_error) : nlohmann::json(nullptr)}};
}

inline SweepRow sweep_row_from_json(const nlohmann::json& j) {
    SweepRow r;
    r.model_tag = j.at("model_tag").get<std::string>();
    r.layer_index = j.at("layer_index").get<std::size_t>();
    r.layer_name = j.at("layer_name").get<std::string>();
    r.cw_overlap = j.at("cw_overlap").get<double>();
    r.cw_overlap_pair_normalized = j.at("cw_overlap_pair_normalized").get<double>();
    r.mean_channel_nnk_count = j.at("mean_channel_nnk_count").get<double>();
    if (!j.at("mean_aggregate_nnk_count").is_null()) r.mean_aggregate_nnk_count = j["mean_aggregate_nnk_count"];
    if (!j.at("test_error").is_null()) r.test_error = j["test_error"].get<double>();
    return r;
}

// -----------------------------------------------------------------------------
// correlation
// -----------------------------------------------------------------------------

struct CorrelationResult {
    std::size_t samples = 0;
    std::optional<double> pearson;  // nullopt when either series has zero variance
    std::optional<double> spearman;
    std::vector<std::string> tags;  // matched tags, ascending
    std::vector<double> overlaps;
    std::vector<double> errors;
};

inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        mx += x[t];
        my += y[t];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        sxy += (x[t] - mx) * (y[t] - my);
        sxx += (x[t] - mx) * (x[t] - mx);
        syy += (y[t] - my) * (y[t] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Ranks starting at 1, ties get the average of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t start = 0; start < order.size();) {
        std::size_t end = start + 1;
        while (end < order.size() && v[order[end]] == v[order[start]]) ++end;
        const double r = 0.5 * static_cast<double>(start + 1 + end);
        for (std::size_t t = start; t < end; ++t) ranks[order[t]] = r;
        start = end;
    }
    return ranks;
}

inline std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(average_ranks(x), average_ranks(y));
}

/// Pearson and Spearman coefficients between last-layer overlap and test error
/// over model tags present in both lists.
inline CorrelationResult correlation(const std::vector<std::pair<std::string, double>>& last_layer_overlaps,
                                     const std::vector<std::pair<std::string, double>>& test_errors) {
    std::map<std::string, double> errors;
    for (const auto& [tag, e] : test_errors) errors[tag] = e;
    std::map<std::string, double> overlaps;
    for (const auto& [tag, o] : last_layer_overlaps) overlaps[tag] = o;

    CorrelationResult out;
    for (const auto& [tag, o] : overlaps) {
        const auto it = errors.find(tag);
        if (it == errors.end()) continue;
        out.tags.push_back(tag);
        out.overlaps.push_back(o);
        out.errors.push_back(it->second);
    }
    out.samples = out.tags.size();
    detail::require(out.samples >= 3, ErrorCode::invalid_input,
                    "correlation needs at least 3 matched model tags, got " + std::to_string(out.samples));
    out.pearson = pearson(out.overlaps, out.errors);
    out.spearman = spearman(out.overlaps, out.errors);
    return out;
}

inline nlohmann::json to_json(const CorrelationResult& c) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"samples", c.samples},
            {"pearson", opt(c.pearson)},
            {"spearman", opt(c.spearman)},
            {"tags", c.tags},
            {"overlaps", c.overlaps},
            {"test_errors", c.errors}};
}

} // namespace cwnnk::report
