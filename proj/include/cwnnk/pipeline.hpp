#pragma once

#include <cstddef>
#include <string>

#include "cwnnk/channels.hpp"
#include "cwnnk/features.hpp"
#include "cwnnk/kernel.hpp"
#include "cwnnk/nnk.hpp"
#include "cwnnk/overlap.hpp"

namespace cwnnk {

struct LayerAnalysis {
    double sigma = 0.0;
    ChannelGraphBundle bundle;
    NNKGraph aggregate;
};

/// Channel graphs plus the aggregate graph for one layer, sharing one sigma.
inline LayerAnalysis analyze_layer(const FeatureSet& features, std::size_t k, const KernelConfig& config,
                                   const NNKOptions& options = {},
                                   AggregateInit init = AggregateInit::union_of_channel_knn) {
    LayerAnalysis out;
    out.sigma = select_sigma(features.view(), k, config);
    out.bundle = build_cw_graphs(features, k, out.sigma, options);
    out.aggregate = build_aggregate_graph(features, init, k, out.sigma, options);
    return out;
}

/// Overlap report of an analyzed layer; requires at least two channels.
inline OverlapReport layer_report(const FeatureSet& features, const LayerAnalysis& analysis) {
    return make_overlap_report(features.layer_name(), analysis.bundle, analysis.aggregate);
}

} // namespace cwnnk
