#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cwnnk/error.hpp"
#include "cwnnk/features.hpp"
#include "cwnnk/kernel.hpp"
#include "cwnnk/knn.hpp"
#include "cwnnk/nnk.hpp"

namespace cwnnk {

/// One read-only column window per channel, in manifest order.
inline std::vector<FeatureView> split_channels(const FeatureSet& features) {
    detail::require(layout_width(features.layout()) == features.dim(), ErrorCode::dimension_mismatch,
                    "channel layout does not cover the feature width");
    std::vector<FeatureView> views;
    views.reserve(features.channel_count());
    std::size_t offset = 0;
    for (const auto& c : features.layout()) {
        views.emplace_back(features.data().data(), features.size(), features.dim(), offset, c.dim);
        offset += c.dim;
    }
    return views;
}

/// Per-channel NNK graphs of one layer, all built with the same K and sigma.
struct ChannelGraphBundle {
    std::vector<std::string> channel_names;
    std::vector<NNKGraph> per_channel;
    double sigma_used = 0.0;
    std::size_t k_used = 0;

    std::size_t channel_count() const noexcept { return per_channel.size(); }
    std::size_t node_count() const noexcept { return per_channel.empty() ? 0 : per_channel.front().node_count(); }

    std::size_t channel_index(std::string_view name) const {
        for (std::size_t c = 0; c < channel_names.size(); ++c)
            if (channel_names[c] == name) return c;
        throw Error(ErrorCode::invalid_input, "unknown channel '" + std::string(name) + "'");
    }
};

inline void validate_bundle(const ChannelGraphBundle& bundle) {
    detail::require(!bundle.per_channel.empty(), ErrorCode::invalid_input, "bundle has no channels");
    detail::require(bundle.channel_names.size() == bundle.per_channel.size(), ErrorCode::invalid_input,
                    "bundle channel names and graphs disagree");
    for (const auto& g : bundle.per_channel) {
        detail::require(g.node_count() == bundle.node_count(), ErrorCode::invalid_input,
                        "bundle graphs have different node counts");
    }
}

inline ChannelGraphBundle build_cw_graphs(const FeatureSet& features, std::size_t k, double sigma,
                                          const NNKOptions& options = {}) {
    ChannelGraphBundle bundle;
    bundle.sigma_used = sigma;
    bundle.k_used = k;
    const auto views = split_channels(features);
    for (std::size_t c = 0; c < views.size(); ++c) {
        const auto& name = features.layout()[c].name;
        try {
            bundle.per_channel.push_back(build_graph(views[c], k, sigma, options));
        } catch (const Error& e) {
            throw Error(e.code(), "channel '" + name + "': " + e.what());
        }
        bundle.channel_names.push_back(name);
    }
    return bundle;
}

/// Channel-wise graphs with the layer bandwidth resolved once on the aggregate
/// features and reused in every channel.
inline ChannelGraphBundle build_cw_graphs(const FeatureSet& features, std::size_t k, const KernelConfig& config,
                                          const NNKOptions& options = {}) {
    return build_cw_graphs(features, k, select_sigma(features.view(), k, config), options);
}

enum class AggregateInit {
    union_of_channel_knn, ///< seed with the union of every channel's KNN set
    aggregate_knn,        ///< seed with plain KNN in the full space
};

/// Candidate set used to seed the aggregate solve for node i.
inline std::vector<NodeId> aggregate_candidates(const FeatureSet& features, const std::vector<FeatureView>& views,
                                                NodeId i, AggregateInit init, std::size_t k) {
    if (init == AggregateInit::aggregate_knn) return knn_search(features.view(), i, k).indices;
    std::vector<NeighborCandidates> per_channel;
    per_channel.reserve(views.size());
    for (const auto& v : views) per_channel.push_back(knn_search(v, i, k));
    return knn_union(per_channel);
}

inline NNKGraph build_aggregate_graph(const FeatureSet& features, AggregateInit init, std::size_t k, double sigma,
                                      const NNKOptions& options = {}) {
    detail::require(features.size() >= k + 1, ErrorCode::invalid_input, "graph construction needs N >= K+1");
    const auto views = split_channels(features);
    return build_graph_from_candidates(features.view(), sigma, options, [&](NodeId i) {
        return aggregate_candidates(features, views, i, init, k);
    });
}

inline NNKGraph build_aggregate_graph(const FeatureSet& features, AggregateInit init, std::size_t k,
                                      const KernelConfig& config, const NNKOptions& options = {}) {
    return build_aggregate_graph(features, init, k, select_sigma(features.view(), k, config), options);
}

} // namespace cwnnk
