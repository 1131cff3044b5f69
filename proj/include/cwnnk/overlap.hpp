#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cwnnk/channels.hpp"
#include "cwnnk/error.hpp"
#include "cwnnk/nnk.hpp"

namespace cwnnk {

/// |a ∩ b| for ascending id lists.
inline std::size_t intersection_size(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

struct PairCount {
    std::size_t first = 0;
    std::size_t second = 0;
    std::size_t count = 0;
};

/// NNK neighborhood intersection size for every unordered channel pair
/// (c1 < c2, lexicographic order) at one query node. Weights are ignored.
inline std::vector<PairCount> pairwise_intersections(const ChannelGraphBundle& bundle, NodeId query_index) {
    validate_bundle(bundle);
    detail::require(query_index < bundle.node_count(), ErrorCode::invalid_input, "query index out of range");
    const std::size_t c = bundle.channel_count();
    std::vector<PairCount> out;
    out.reserve(c * (c - 1) / 2);
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = a + 1; b < c; ++b) {
            out.push_back({a, b,
                           intersection_size(bundle.per_channel[a][query_index].neighbor_indices,
                                             bundle.per_channel[b][query_index].neighbor_indices)});
        }
    }
    return out;
}

struct NeighborCountStats {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0; // population
};

inline NeighborCountStats neighbor_count_stats(const NNKGraph& graph) {
    NeighborCountStats s;
    const std::size_t n = graph.node_count();
    if (n == 0) return s;
    std::vector<double> counts;
    counts.reserve(n);
    for (const auto& r : graph.rows) counts.push_back(static_cast<double>(r.size()));
    double sum = 0.0;
    for (double v : counts) sum += v;
    s.mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (double v : counts) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(n));
    std::sort(counts.begin(), counts.end());
    s.median = n % 2 == 1 ? counts[n / 2] : 0.5 * (counts[n / 2 - 1] + counts[n / 2]);
    return s;
}

struct IdProxy {
    std::vector<NeighborCountStats> per_channel;
    NeighborCountStats aggregate;
};

/// Neighbor-count statistics read as an intrinsic-dimension indicator. These
/// are not calibrated dimension estimates.
inline IdProxy id_proxy(const ChannelGraphBundle& bundle, const NNKGraph& aggregate) {
    validate_bundle(bundle);
    IdProxy out;
    for (const auto& g : bundle.per_channel) out.per_channel.push_back(neighbor_count_stats(g));
    out.aggregate = neighbor_count_stats(aggregate);
    return out;
}

struct PairMatrix {
    std::size_t channels = 0;
    std::vector<double> overlap;           // C x C, row-major, zero diagonal
    std::vector<std::size_t> raw_counts;   // C x C summed intersections, zero diagonal

    double at(std::size_t a, std::size_t b) const { return overlap[a * channels + b]; }
    std::size_t raw_at(std::size_t a, std::size_t b) const { return raw_counts[a * channels + b]; }
};

/// Entry (a,b) = sum_i |N_a(i) ∩ N_b(i)| / sum_i (|N_a(i)| + |N_b(i)|) / 2.
inline PairMatrix pair_matrix(const ChannelGraphBundle& bundle) {
    validate_bundle(bundle);
    const std::size_t c = bundle.channel_count();
    detail::require(c >= 2, ErrorCode::invalid_input, "pair matrix needs at least 2 channels");
    const std::size_t n = bundle.node_count();

    PairMatrix m;
    m.channels = c;
    m.overlap.assign(c * c, 0.0);
    m.raw_counts.assign(c * c, 0);
    for (std::size_t a = 0; a < c; ++a) {
        for (std::size_t b = a + 1; b < c; ++b) {
            std::size_t inter = 0;
            std::size_t sizes = 0;
            for (NodeId i = 0; i < n; ++i) {
                const auto& na = bundle.per_channel[a][i].neighbor_indices;
                const auto& nb = bundle.per_channel[b][i].neighbor_indices;
                inter += intersection_size(na, nb);
                sizes += na.size() + nb.size();
            }
            const double value = sizes == 0 ? 0.0 : static_cast<double>(inter) / (0.5 * static_cast<double>(sizes));
            m.overlap[a * c + b] = m.overlap[b * c + a] = value;
            m.raw_counts[a * c + b] = m.raw_counts[b * c + a] = inter;
        }
    }
    return m;
}

/// Layer-level channel redundancy summary.
struct OverlapReport {
    std::string layer_name;
    std::vector<std::string> channel_names;
    std::size_t k_used = 0;
    double sigma_used = 0.0;

    /// mean over points of raw(i) / avg(i), raw = summed pairwise intersections,
    /// avg = mean channel neighborhood size. Ratio is taken per point first.
    double cw_overlap = 0.0;
    /// Same, with raw(i) divided by the number of channel pairs.
    double cw_overlap_pair_normalized = 0.0;
    std::size_t points_used = 0;
    std::size_t points_excluded = 0; // avg(i) == 0
    std::vector<std::optional<double>> per_point_overlap;

    PairMatrix pairs;
    std::vector<double> mean_nnk_count_per_channel;
    std::optional<IdProxy> id_stats;
    std::optional<double> mean_aggregate_nnk_count;
};

/// Scalar overlap fields plus per-point ratios. C >= 2.
inline OverlapReport cw_overlap(const ChannelGraphBundle& bundle) {
    validate_bundle(bundle);
    const std::size_t c = bundle.channel_count();
    detail::require(c >= 2, ErrorCode::invalid_input, "CW-NNK overlap needs at least 2 channels");
    const std::size_t n = bundle.node_count();
    const double n_pairs = static_cast<double>(c * (c - 1) / 2);

    OverlapReport r;
    r.channel_names = bundle.channel_names;
    r.k_used = bundle.k_used;
    r.sigma_used = bundle.sigma_used;
    r.per_point_overlap.assign(n, std::nullopt);

    double sum_ratio = 0.0;
    for (NodeId i = 0; i < n; ++i) {
        std::size_t raw = 0;
        for (const auto& p : pairwise_intersections(bundle, i)) raw += p.count;
        std::size_t total = 0;
        for (const auto& g : bundle.per_channel) total += g[i].size();
        const double avg = static_cast<double>(total) / static_cast<double>(c);
        if (avg == 0.0) {
            ++r.points_excluded;
            continue;
        }
        const double ratio = static_cast<double>(raw) / avg;
        r.per_point_overlap[i] = ratio;
        sum_ratio += ratio;
        ++r.points_used;
    }
    if (r.points_used > 0) {
        r.cw_overlap = sum_ratio / static_cast<double>(r.points_used);
        r.cw_overlap_pair_normalized = r.cw_overlap / n_pairs;
    }

    for (const auto& g : bundle.per_channel) r.mean_nnk_count_per_channel.push_back(neighbor_count_stats(g).mean);
    return r;
}

/// Full report: scalar overlap, pair matrix and neighbor-count statistics
/// against the aggregate graph.
inline OverlapReport make_overlap_report(std::string layer_name, const ChannelGraphBundle& bundle,
                                         const NNKGraph& aggregate) {
    auto r = cw_overlap(bundle);
    r.layer_name = std::move(layer_name);
    r.pairs = pair_matrix(bundle);
    r.id_stats = id_proxy(bundle, aggregate);
    r.mean_aggregate_nnk_count = r.id_stats->aggregate.mean;
    return r;
}

struct ChannelListing {
    std::string channel;
    std::vector<NodeId> neighbor_indices; // by weight, descending
    std::vector<double> weights;
};

/// Neighbors of one query in each requested channel, strongest first.
inline std::vector<ChannelListing> neighbor_listing(const ChannelGraphBundle& bundle, NodeId query_index,
                                                   const std::vector<std::string>& channels) {
    validate_bundle(bundle);
    detail::require(!channels.empty(), ErrorCode::invalid_input, "no channels requested");
    detail::require(query_index < bundle.node_count(), ErrorCode::invalid_input, "query index out of range");
    std::vector<ChannelListing> out;
    for (const auto& name : channels) {
        const auto& row = bundle.per_channel[bundle.channel_index(name)][query_index];
        std::vector<std::size_t> order(row.size());
        for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return row.weights[a] > row.weights[b]; });
        ChannelListing l;
        l.channel = name;
        for (std::size_t t : order) {
            l.neighbor_indices.push_back(row.neighbor_indices[t]);
            l.weights.push_back(row.weights[t]);
        }
        out.push_back(std::move(l));
    }
    return out;
}

} // namespace cwnnk
