#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "cwnnk/error.hpp"
#include "cwnnk/features.hpp"
#include "cwnnk/nnk.hpp"
#include "cwnnk/overlap.hpp"
#include "cwnnk/theorems.hpp"

// File formats
//
// Feature tensor (.bin), little-endian:
//   offset 0   char[4]  magic "CWNK"
//   offset 4   u16      version (1)
//   offset 6   u16      dtype (1 = f32, 2 = f64)
//   offset 8   u32      n_points
//   offset 12  u32      dim
//   offset 16  n_points * dim values, row-major
//
// Feature CSV fallback: one header row of column names, one row per point.
//
// Graph (.cwng), little-endian:
//   char[4] "CWNG", u16 version (1), u16 reserved (0), u32 n_nodes, u32 n_triplets,
//   then n_triplets records of (u32 query, u32 neighbor, f64 weight), strictly
//   increasing in (query, neighbor).

namespace cwnnk::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

enum class DType : std::uint16_t { f32 = 1, f64 = 2 };

inline std::string_view to_string(DType d) { return d == DType::f32 ? "f32" : "f64"; }

inline DType parse_dtype(std::string_view s) {
    if (s == "f32") return DType::f32;
    if (s == "f64") return DType::f64;
    throw Error(ErrorCode::parse_error, "unknown dtype '" + std::string(s) + "'");
}

inline constexpr std::array<char, 4> feature_magic{'C', 'W', 'N', 'K'};
inline constexpr std::array<char, 4> graph_magic{'C', 'W', 'N', 'G'};
inline constexpr std::uint16_t format_version = 1;

// -----------------------------------------------------------------------------
// byte helpers
// -----------------------------------------------------------------------------

namespace detail {

inline std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    cwnnk::detail::require(static_cast<bool>(in), ErrorCode::io_failure, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    cwnnk::detail::require(static_cast<bool>(out), ErrorCode::io_failure, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    cwnnk::detail::require(static_cast<bool>(out), ErrorCode::io_failure, "short write to " + path.string());
}

template <typename T>
void put(std::string& out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
}

template <typename T>
T get(const std::vector<char>& in, std::size_t offset) {
    T value;
    std::memcpy(&value, in.data() + offset, sizeof(T));
    return value;
}

} // namespace detail

// -----------------------------------------------------------------------------
// manifest
// -----------------------------------------------------------------------------

struct Manifest {
    std::string layer_name;
    std::size_t n_points = 0;
    DType dtype = DType::f64;
    ChannelLayout channels;
    std::optional<std::vector<int>> labels;
    nlohmann::json source = nlohmann::json::object();
};

inline nlohmann::json to_json(const Manifest& m) {
    nlohmann::json j;
    j["layer_name"] = m.layer_name;
    j["n_points"] = m.n_points;
    j["dtype"] = to_string(m.dtype);
    j["channels"] = nlohmann::json::array();
    for (const auto& c : m.channels) j["channels"].push_back({{"name", c.name}, {"dim", c.dim}});
    if (m.labels) j["labels"] = *m.labels;
    j["source"] = m.source;
    return j;
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
    try {
        Manifest m;
        m.layer_name = j.at("layer_name").get<std::string>();
        m.n_points = j.at("n_points").get<std::size_t>();
        m.dtype = parse_dtype(j.at("dtype").get<std::string>());
        for (const auto& c : j.at("channels")) {
            m.channels.push_back({c.at("name").get<std::string>(), c.at("dim").get<std::size_t>()});
        }
        if (j.contains("labels") && !j["labels"].is_null()) m.labels = j["labels"].get<std::vector<int>>();
        if (j.contains("source")) m.source = j["source"];
        cwnnk::detail::require(!m.channels.empty(), ErrorCode::parse_error, "manifest lists no channels");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("malformed manifest: ") + e.what());
    }
}

inline Manifest load_manifest(const std::filesystem::path& path) {
    const auto bytes = detail::read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    detail::write_file(path, j.dump(2) + "\n");
}

inline void save_manifest(const std::filesystem::path& path, const Manifest& m) { write_json(path, to_json(m)); }

inline Manifest manifest_for(const FeatureSet& fs, DType dtype = DType::f64) {
    Manifest m;
    m.layer_name = fs.layer_name();
    m.n_points = fs.size();
    m.dtype = dtype;
    m.channels = fs.layout();
    if (!fs.labels().empty()) m.labels = fs.labels();
    m.source = fs.source();
    return m;
}

// -----------------------------------------------------------------------------
// features
// -----------------------------------------------------------------------------

inline void save_features(const std::filesystem::path& path, const FeatureSet& fs, DType dtype = DType::f64) {
    std::string out;
    const std::size_t width = dtype == DType::f32 ? 4 : 8;
    out.reserve(16 + fs.data().size() * width);
    out.append(feature_magic.data(), feature_magic.size());
    detail::put<std::uint16_t>(out, format_version);
    detail::put<std::uint16_t>(out, static_cast<std::uint16_t>(dtype));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(fs.size()));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(fs.dim()));
    for (double v : fs.data()) {
        if (dtype == DType::f32) detail::put<float>(out, static_cast<float>(v));
        else detail::put<double>(out, v);
    }
    detail::write_file(path, out);
}

struct RawMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    DType dtype = DType::f64;
    std::vector<double> values;
};

inline RawMatrix parse_feature_binary(const std::vector<char>& bytes) {
    cwnnk::detail::require(bytes.size() >= 4 && std::equal(feature_magic.begin(), feature_magic.end(), bytes.begin()),
                           ErrorCode::bad_magic, "feature file does not start with magic CWNK");
    cwnnk::detail::require(bytes.size() >= 16, ErrorCode::truncated, "feature header truncated");
    const auto version = detail::get<std::uint16_t>(bytes, 4);
    cwnnk::detail::require(version == format_version, ErrorCode::bad_version,
                           "unsupported feature format version " + std::to_string(version));
    const auto dtype_code = detail::get<std::uint16_t>(bytes, 6);
    cwnnk::detail::require(dtype_code == 1 || dtype_code == 2, ErrorCode::parse_error,
                           "unknown dtype code " + std::to_string(dtype_code));
    RawMatrix m;
    m.dtype = static_cast<DType>(dtype_code);
    m.rows = detail::get<std::uint32_t>(bytes, 8);
    m.cols = detail::get<std::uint32_t>(bytes, 12);
    const std::size_t width = m.dtype == DType::f32 ? 4 : 8;
    const std::size_t expected = 16 + m.rows * m.cols * width;
    cwnnk::detail::require(bytes.size() >= expected, ErrorCode::truncated,
                           "feature payload truncated: " + std::to_string(bytes.size()) + " bytes, expected " +
                               std::to_string(expected));
    cwnnk::detail::require(bytes.size() == expected, ErrorCode::parse_error, "trailing bytes after feature payload");
    m.values.resize(m.rows * m.cols);
    for (std::size_t t = 0; t < m.values.size(); ++t) {
        m.values[t] = m.dtype == DType::f32 ? static_cast<double>(detail::get<float>(bytes, 16 + t * 4))
                                            : detail::get<double>(bytes, 16 + t * 8);
    }
    return m;
}

namespace detail {

inline std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

inline double parse_double(std::string_view cell) {
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    cwnnk::detail::require(ec == std::errc() && ptr == cell.data() + cell.size(), ErrorCode::parse_error,
                           "not a number: '" + std::string(cell) + "'");
    return v;
}

} // namespace detail

inline RawMatrix parse_feature_csv(const std::vector<char>& bytes) {
    const std::string_view text(bytes.data(), bytes.size());
    RawMatrix m;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto cells = detail::split_line(line);
        if (header) {
            m.cols = cells.size();
            header = false;
            continue;
        }
        cwnnk::detail::require(cells.size() == m.cols, ErrorCode::dimension_mismatch,
                               "CSV row " + std::to_string(m.rows + 1) + " has " + std::to_string(cells.size()) +
                                   " columns, header has " + std::to_string(m.cols));
        for (auto c : cells) m.values.push_back(detail::parse_double(c));
        ++m.rows;
    }
    cwnnk::detail::require(!header, ErrorCode::truncated, "CSV feature file is empty");
    return m;
}

/// Loads a feature tensor (binary, or CSV when the file has a .csv extension)
/// and validates it against its manifest. f32 payloads are promoted to f64.
inline FeatureSet load_features(const std::filesystem::path& tensor_path, const std::filesystem::path& manifest_path) {
    const Manifest manifest = load_manifest(manifest_path);
    const auto bytes = detail::read_file(tensor_path);

    RawMatrix raw;
    const bool has_magic = bytes.size() >= 4 && std::equal(feature_magic.begin(), feature_magic.end(), bytes.begin());
    if (!has_magic && tensor_path.extension() == ".csv") {
        raw = parse_feature_csv(bytes);
    } else {
        raw = parse_feature_binary(bytes);
        cwnnk::detail::require(raw.dtype == manifest.dtype, ErrorCode::dimension_mismatch,
                               "manifest dtype disagrees with the tensor file");
    }
    cwnnk::detail::require(raw.rows == manifest.n_points, ErrorCode::dimension_mismatch,
                           "manifest says " + std::to_string(manifest.n_points) + " points, file holds " +
                               std::to_string(raw.rows));
    cwnnk::detail::require(layout_width(manifest.channels) == raw.cols, ErrorCode::dimension_mismatch,
                           "manifest channel dims sum to " + std::to_string(layout_width(manifest.channels)) +
                               ", file rows are " + std::to_string(raw.cols) + " wide");
    return FeatureSet(manifest.layer_name, raw.rows, raw.cols, std::move(raw.values), manifest.channels,
                      manifest.source, manifest.labels.value_or(std::vector<int>{}));
}

// -----------------------------------------------------------------------------
// graphs
// -----------------------------------------------------------------------------

inline std::string serialize_graph(const NNKGraph& graph) {
    std::string out;
    out.append(graph_magic.data(), graph_magic.size());
    detail::put<std::uint16_t>(out, format_version);
    detail::put<std::uint16_t>(out, 0);
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(graph.node_count()));
    detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(graph.edge_count()));
    for (const auto& row : graph.rows) {
        for (std::size_t t = 0; t < row.size(); ++t) {
            detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(row.query_index));
            detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(row.neighbor_indices[t]));
            detail::put<double>(out, row.weights[t]);
        }
    }
    return out;
}

inline NNKGraph parse_graph(const std::vector<char>& bytes) {
    cwnnk::detail::require(bytes.size() >= 4 && std::equal(graph_magic.begin(), graph_magic.end(), bytes.begin()),
                           ErrorCode::bad_magic, "graph file does not start with magic CWNG");
    cwnnk::detail::require(bytes.size() >= 16, ErrorCode::truncated, "graph header truncated");
    const auto version = detail::get<std::uint16_t>(bytes, 4);
    cwnnk::detail::require(version == format_version, ErrorCode::bad_version,
                           "unsupported graph format version " + std::to_string(version));
    const std::size_t n = detail::get<std::uint32_t>(bytes, 8);
    const std::size_t count = detail::get<std::uint32_t>(bytes, 12);
    constexpr std::size_t record = 16;
    cwnnk::detail::require(bytes.size() >= 16 + count * record, ErrorCode::truncated, "graph triplet stream truncated");
    cwnnk::detail::require(bytes.size() == 16 + count * record, ErrorCode::parse_error,
                           "trailing bytes after graph triplets");

    NNKGraph graph;
    graph.rows.resize(n);
    for (std::size_t i = 0; i < n; ++i) graph.rows[i].query_index = i;
    std::size_t prev_q = 0, prev_j = 0;
    for (std::size_t t = 0; t < count; ++t) {
        const std::size_t off = 16 + t * record;
        const std::size_t q = detail::get<std::uint32_t>(bytes, off);
        const std::size_t j = detail::get<std::uint32_t>(bytes, off + 4);
        const double w = detail::get<double>(bytes, off + 8);
        cwnnk::detail::require(q < n && j < n, ErrorCode::parse_error, "graph triplet references a node out of range");
        cwnnk::detail::require(q != j, ErrorCode::parse_error, "graph triplet is a self loop");
        cwnnk::detail::require(std::isfinite(w) && w > 0.0, ErrorCode::parse_error, "graph weight must be positive");
        cwnnk::detail::require(t == 0 || q > prev_q || (q == prev_q && j > prev_j), ErrorCode::parse_error,
                               "graph triplets not sorted by (query, neighbor)");
        graph.rows[q].neighbor_indices.push_back(j);
        graph.rows[q].weights.push_back(w);
        prev_q = q;
        prev_j = j;
    }
    return graph;
}

inline void save_graph(const std::filesystem::path& path, const NNKGraph& graph) {
    detail::write_file(path, serialize_graph(graph));
}

inline NNKGraph load_graph(const std::filesystem::path& path) { return parse_graph(detail::read_file(path)); }

// -----------------------------------------------------------------------------
// report JSON
// -----------------------------------------------------------------------------

inline nlohmann::json to_json(const NeighborCountStats& s) {
    return {{"mean", s.mean}, {"median", s.median}, {"stddev", s.stddev}};
}

inline NeighborCountStats stats_from_json(const nlohmann::json& j) {
    return {j.at("mean").get<double>(), j.at("median").get<double>(), j.at("stddev").get<double>()};
}

inline nlohmann::json to_json(const OverlapReport& r) {
    nlohmann::json j;
    j["layer_name"] = r.layer_name;
    j["channels"] = r.channel_names;
    j["k"] = r.k_used;
    j["sigma"] = r.sigma_used;
    j["cw_overlap"] = r.cw_overlap;
    j["cw_overlap_pair_normalized"] = r.cw_overlap_pair_normalized;
    j["normalization"] = "per_point_ratio_then_mean";
    j["points_used"] = r.points_used;
    j["points_excluded_empty_neighborhood"] = r.points_excluded;
    auto per_point = nlohmann::json::array();
    for (const auto& v : r.per_point_overlap) per_point.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
    j["per_point_overlap"] = per_point;
    j["pair_matrix"] = r.pairs.overlap;
    j["pair_counts"] = r.pairs.raw_counts;
    j["mean_nnk_count_per_channel"] = r.mean_nnk_count_per_channel;
    j["mean_aggregate_nnk_count"] =
        r.mean_aggregate_nnk_count ? nlohmann::json(*r.mean_aggregate_nnk_count) : nlohmann::json(nullptr);
    if (r.id_stats) {
        auto per_channel = nlohmann::json::array();
        for (const auto& s : r.id_stats->per_channel) per_channel.push_back(to_json(s));
        j["id_proxy"] = {{"per_channel", per_channel}, {"aggregate", to_json(r.id_stats->aggregate)}};
    } else {
        j["id_proxy"] = nullptr;
    }
    return j;
}

inline OverlapReport overlap_report_from_json(const nlohmann::json& j) {
    try {
        OverlapReport r;
        r.layer_name = j.at("layer_name").get<std::string>();
        r.channel_names = j.at("channels").get<std::vector<std::string>>();
        r.k_used = j.at("k").get<std::size_t>();
        r.sigma_used = j.at("sigma").get<double>();
        r.cw_overlap = j.at("cw_overlap").get<double>();
        r.cw_overlap_pair_normalized = j.at("cw_overlap_pair_normalized").get<double>();
        r.points_used = j.at("points_used").get<std::size_t>();
        r.points_excluded = j.at("points_excluded_empty_neighborhood").get<std::size_t>();
        for (const auto& v : j.at("per_point_overlap"))
            r.per_point_overlap.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
        r.pairs.channels = r.channel_names.size();
        r.pairs.overlap = j.at("pair_matrix").get<std::vector<double>>();
        r.pairs.raw_counts = j.at("pair_counts").get<std::vector<std::size_t>>();
        r.mean_nnk_count_per_channel = j.at("mean_nnk_count_per_channel").get<std::vector<double>>();
        if (!j.at("mean_aggregate_nnk_count").is_null())
            r.mean_aggregate_nnk_count = j["mean_aggregate_nnk_count"].get<double>();
        if (!j.at("id_proxy").is_null()) {
            IdProxy p;
            for (const auto& s : j["id_proxy"].at("per_channel")) p.per_channel.push_back(stats_from_json(s));
            p.aggregate = stats_from_json(j["id_proxy"].at("aggregate"));
            r.id_stats = p;
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("malformed overlap report: ") + e.what());
    }
}

inline nlohmann::json to_json(const ViolationDetail& v) {
    return {{"query", v.query}, {"channel_a", v.channel_a}, {"channel_b", v.channel_b}, {"neighbor", v.neighbor}};
}

inline nlohmann::json to_json(const LemmaWitness& w) {
    return {{"trial", w.trial},
            {"a", w.a},
            {"b", w.b},
            {"gamma", w.gamma},
            {"epsilon", w.epsilon},
            {"predicted_admitted", w.predicted_admitted},
            {"qp_admitted", w.qp_admitted},
            {"solver_admitted", w.solver_admitted}};
}

inline nlohmann::json to_json(const TheoremReport& r) {
    nlohmann::json j;
    j["theorem_id"] = to_string(r.theorem_id);
    j["instances_checked"] = r.instances_checked;
    j["violations"] = r.violations;
    j["passed"] = r.passed();
    auto details = nlohmann::json::array();
    for (const auto& v : r.violation_details) details.push_back(to_json(v));
    j["violation_details"] = details;
    switch (r.theorem_id) {
    case TheoremId::T1:
    case TheoremId::C1: {
        j["three_node_checked"] = r.three_node_checked;
        j["three_node_violations"] = r.three_node_violations;
        j["lower_bound_checked"] = r.lower_bound_checked;
        j["lower_bound_violations"] = r.lower_bound_violations;
        j["precondition_unmet"] = r.precondition_unmet;
        j["near_misses"] = r.near_misses;
        auto near = nlohmann::json::array();
        for (const auto& v : r.near_miss_details) near.push_back(to_json(v));
        j["near_miss_details"] = near;
        break;
    }
    case TheoremId::T2:
        j["kernel_level_checked"] = r.kernel_level_checked;
        j["kernel_level_violations"] = r.kernel_level_violations;
        j["embedded_checked"] = r.embedded_checked;
        j["embedded_violations"] = r.embedded_violations;
        break;
    case TheoremId::L1: {
        j["admitted_count"] = r.admitted_count;
        j["rejected_count"] = r.rejected_count;
        auto adm = nlohmann::json::array();
        auto rej = nlohmann::json::array();
        for (const auto& w : r.admitted_witnesses) adm.push_back(to_json(w));
        for (const auto& w : r.rejected_witnesses) rej.push_back(to_json(w));
        j["witnesses"] = {{"admitted", adm}, {"rejected", rej}};
        break;
    }
    }
    return j;
}

} // namespace cwnnk::io
