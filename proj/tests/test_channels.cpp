#include <vector>

#include <gtest/gtest.h>

#include "cwnnk/channels.hpp"
#include "cwnnk/synthetic.hpp"

using namespace cwnnk;

TEST(Channels, SplitSlicesColumns) {
    const FeatureSet fs("l", 2, 4, {1, 2, 3, 4, 5, 6, 7, 8}, {{"a", 2}, {"b", 2}});
    const auto views = split_channels(fs);
    ASSERT_EQ(views.size(), 2u);
    EXPECT_EQ(std::vector<double>(views[0].row(0).begin(), views[0].row(0).end()), (std::vector<double>{1, 2}));
    EXPECT_EQ(std::vector<double>(views[1].row(0).begin(), views[1].row(0).end()), (std::vector<double>{3, 4}));
    EXPECT_EQ(std::vector<double>(views[1].row(1).begin(), views[1].row(1).end()), (std::vector<double>{7, 8}));
}

TEST(Channels, SingleChannelViewIsWholeMatrix) {
    const FeatureSet fs("l", 2, 3, {1, 2, 3, 4, 5, 6}, {{"all", 3}});
    const auto views = split_channels(fs);
    ASSERT_EQ(views.size(), 1u);
    for (NodeId i = 0; i < 2; ++i) {
        const auto a = views[0].row(i);
        const auto b = fs.row(i);
        EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
}

TEST(Channels, LayoutMismatchRejected) {
    try {
        FeatureSet fs("l", 2, 4, std::vector<double>(8, 0.0), {{"a", 2}, {"b", 1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
    }
    EXPECT_THROW(FeatureSet("l", 1, 1, {0.0}, {}), Error);
    try {
        FeatureSet fs("l", 2, 1, {0.0, std::numeric_limits<double>::infinity()}, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::non_finite);
    }
}

TEST(Channels, SingleChannelBundleEqualsAggregate) {
    const auto fs = synthetic::gaussian_features(80, 4, 1, 1);
    const auto bundle = build_cw_graphs(fs, 10, KernelConfig{});
    ASSERT_EQ(bundle.channel_count(), 1u);
    const auto agg = build_graph(fs.view(), 10, bundle.sigma_used);
    EXPECT_TRUE(bundle.per_channel[0] == agg);
    const auto u = build_aggregate_graph(fs, AggregateInit::union_of_channel_knn, 10, bundle.sigma_used);
    const auto p = build_aggregate_graph(fs, AggregateInit::aggregate_knn, 10, bundle.sigma_used);
    EXPECT_TRUE(u == p);
}

TEST(Channels, DuplicatedChannelGivesIdenticalGraphs) {
    auto base = synthetic::gaussian_features(60, 3, 1, 2);
    std::vector<double> data;
    for (NodeId i = 0; i < 60; ++i) {
        data.insert(data.end(), base.row(i).begin(), base.row(i).end());
        data.insert(data.end(), base.row(i).begin(), base.row(i).end());
    }
    const FeatureSet fs("dup", 60, 6, data, {{"a", 3}, {"b", 3}});
    const auto bundle = build_cw_graphs(fs, 8, KernelConfig{});
    EXPECT_TRUE(bundle.per_channel[0] == bundle.per_channel[1]);
}

TEST(Channels, PerChannelMatchesIndependentBuild) {
    const auto fs = synthetic::gaussian_features(100, 8, 2, 9);
    const auto bundle = build_cw_graphs(fs, 12, KernelConfig{});
    EXPECT_EQ(bundle.channel_names, (std::vector<std::string>{"c0", "c1"}));
    for (std::size_t c = 0; c < 2; ++c) {
        std::vector<double> sub;
        for (NodeId i = 0; i < 100; ++i)
            for (std::size_t d = 0; d < 4; ++d) sub.push_back(fs.row(i)[c * 4 + d]);
        const FeatureSet alone("alone", 100, 4, sub, {});
        EXPECT_TRUE(bundle.per_channel[c] == build_graph(alone.view(), 12, bundle.sigma_used));
    }
}

TEST(Channels, ChannelGraphsIgnoreOtherChannels) {
    const auto fs = synthetic::gaussian_features(70, 6, 3, 4);
    auto data = fs.data();
    for (NodeId i = 0; i < 70; ++i) data[i * 6 + 5] *= -3.0; // only channel c2 changes
    const FeatureSet changed("x", 70, 6, data, fs.layout());
    const auto a = build_cw_graphs(fs, 10, 0.9);
    const auto b = build_cw_graphs(changed, 10, 0.9);
    EXPECT_TRUE(a.per_channel[0] == b.per_channel[0]);
    EXPECT_TRUE(a.per_channel[1] == b.per_channel[1]);
}

TEST(Channels, UnionCandidatesContainEveryChannelKnn) {
    const auto fs = synthetic::gaussian_features(50, 6, 3, 7);
    const auto views = split_channels(fs);
    for (NodeId i = 0; i < 50; ++i) {
        const auto u = aggregate_candidates(fs, views, i, AggregateInit::union_of_channel_knn, 5);
        for (const auto& v : views)
            for (NodeId j : knn_search(v, i, 5).indices) EXPECT_TRUE(std::binary_search(u.begin(), u.end(), j));
    }
}

TEST(Channels, BundleLookupAndValidation) {
    const auto fs = synthetic::gaussian_features(30, 4, 2, 3);
    auto bundle = build_cw_graphs(fs, 5, KernelConfig{});
    EXPECT_EQ(bundle.channel_index("c1"), 1u);
    EXPECT_THROW(bundle.channel_index("nope"), Error);
    bundle.per_channel[1].rows.pop_back();
    EXPECT_THROW(validate_bundle(bundle), Error);
}
