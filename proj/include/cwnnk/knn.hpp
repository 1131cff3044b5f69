#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cwnnk/error.hpp"
#include "cwnnk/features.hpp"

namespace cwnnk {

/// KNN initialization set for one query, nearest first.
struct NeighborCandidates {
    NodeId query_index = 0;
    std::vector<NodeId> indices;
    std::vector<double> distances; // squared Euclidean, non-decreasing
};

/// Exact brute-force K nearest neighbors of `query_index`, self excluded.
/// Equal distances are ordered by ascending node id.
inline NeighborCandidates knn_search(const FeatureView& features, NodeId query_index, std::size_t k) {
    const std::size_t n = features.size();
    detail::require(query_index < n, ErrorCode::invalid_input,
                    "query index " + std::to_string(query_index) + " out of range");
    detail::require(k >= 1 && k < n, ErrorCode::invalid_input,
                    "K must be in [1, N-1]; got K=" + std::to_string(k) + " with N=" + std::to_string(n));

    std::vector<std::pair<double, NodeId>> scored;
    scored.reserve(n - 1);
    const auto q = features.row(query_index);
    for (NodeId j = 0; j < n; ++j) {
        if (j == query_index) continue;
        scored.emplace_back(squared_distance(q, features.row(j)), j);
    }
    // pair ordering compares distance first, then id
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());

    NeighborCandidates out;
    out.query_index = query_index;
    out.indices.reserve(k);
    out.distances.reserve(k);
    for (std::size_t t = 0; t < k; ++t) {
        out.distances.push_back(scored[t].first);
        out.indices.push_back(scored[t].second);
    }
    return out;
}

/// Set union of per-channel candidate lists for a single query, ascending ids.
inline std::vector<NodeId> knn_union(std::span<const NeighborCandidates> per_channel) {
    detail::require(!per_channel.empty(), ErrorCode::invalid_input, "knn_union needs at least one list");
    const NodeId query = per_channel.front().query_index;
    std::vector<NodeId> merged;
    for (const auto& c : per_channel) {
        detail::require(c.query_index == query, ErrorCode::invalid_input,
                        "knn_union: candidate lists belong to different queries");
        merged.insert(merged.end(), c.indices.begin(), c.indices.end());
    }
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
}

} // namespace cwnnk
