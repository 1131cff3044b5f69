#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "cwnnk/overlap.hpp"
#include "cwnnk/synthetic.hpp"
#include "oracles.hpp"

using namespace cwnnk;

namespace {

NNKNeighborhood row(NodeId q, std::vector<NodeId> ids, std::vector<double> w = {}) {
    NNKNeighborhood n;
    n.query_index = q;
    if (w.empty()) w.assign(ids.size(), 0.5);
    n.neighbor_indices = std::move(ids);
    n.weights = std::move(w);
    return n;
}

ChannelGraphBundle bundle_of(std::vector<std::vector<std::vector<NodeId>>> sets) {
    ChannelGraphBundle b;
    for (std::size_t c = 0; c < sets.size(); ++c) {
        b.channel_names.push_back("c" + std::to_string(c));
        NNKGraph g;
        for (NodeId i = 0; i < sets[c].size(); ++i) g.rows.push_back(row(i, sets[c][i]));
        b.per_channel.push_back(std::move(g));
    }
    b.k_used = 5;
    b.sigma_used = 1.0;
    return b;
}

} // namespace

TEST(Overlap, HandExample) {
    // point 0: {1,2,3} and {3,4}
    const auto b = bundle_of({{{1, 2, 3}, {0}, {0}, {0}, {0}}, {{3, 4}, {2}, {0}, {0}, {0}}});
    const auto pairs = pairwise_intersections(b, 0);
    ASSERT_EQ(pairs.size(), 1u);
    EXPECT_EQ(pairs[0].count, 1u);
    const auto r = cw_overlap(b);
    ASSERT_TRUE(r.per_point_overlap[0].has_value());
    EXPECT_DOUBLE_EQ(*r.per_point_overlap[0], 0.4);
}

TEST(Overlap, IdenticalChannelsGiveBinomial) {
    for (std::size_t c : {2u, 3u, 5u}) {
        std::vector<std::vector<std::vector<NodeId>>> sets(c, {{1, 2}, {0, 2, 3}, {0, 1}, {1}});
        const auto r = cw_overlap(bundle_of(sets));
        EXPECT_DOUBLE_EQ(r.cw_overlap, static_cast<double>(c * (c - 1) / 2));
        EXPECT_DOUBLE_EQ(r.cw_overlap_pair_normalized, 1.0);
        for (const auto& p : pairwise_intersections(bundle_of(sets), 1)) EXPECT_EQ(p.count, 3u);
    }
}

TEST(Overlap, DisjointChannelsGiveZero) {
    const auto b = bundle_of({{{1}, {2}, {0}}, {{2}, {0}, {1}}});
    const auto r = cw_overlap(b);
    EXPECT_EQ(r.cw_overlap, 0.0);
    EXPECT_EQ(r.cw_overlap_pair_normalized, 0.0);
    const auto m = pair_matrix(b);
    EXPECT_EQ(m.at(0, 1), 0.0);
}

TEST(Overlap, EmptyNeighborhoodsExcluded) {
    const auto b = bundle_of({{{}, {0}, {1}}, {{}, {0}, {0}}});
    const auto r = cw_overlap(b);
    EXPECT_EQ(r.points_excluded, 1u);
    EXPECT_EQ(r.points_used, 2u);
    EXPECT_FALSE(r.per_point_overlap[0].has_value());
    // point 1: raw 1, avg 1; point 2: raw 0, avg 1
    EXPECT_DOUBLE_EQ(r.cw_overlap, 0.5);
}

TEST(Overlap, SingleChannelRejected) {
    const auto b = bundle_of({{{1}, {0}}});
    EXPECT_THROW(cw_overlap(b), Error);
    EXPECT_THROW(pair_matrix(b), Error);
}

TEST(Overlap, RandomBundleMatchesSetOracle) {
    const auto fs = synthetic::gaussian_features(150, 12, 4, 31);
    const auto b = build_cw_graphs(fs, 15, KernelConfig{});
    std::vector<std::vector<std::set<NodeId>>> sets(4);
    for (std::size_t c = 0; c < 4; ++c)
        for (NodeId i = 0; i < 150; ++i)
            sets[c].emplace_back(b.per_channel[c][i].neighbor_indices.begin(), b.per_channel[c][i].neighbor_indices.end());

    for (NodeId i = 0; i < 150; ++i) {
        for (const auto& p : pairwise_intersections(b, i)) {
            std::size_t naive = 0;
            for (NodeId x : sets[p.first][i])
                for (NodeId y : sets[p.second][i]) naive += x == y;
            EXPECT_EQ(p.count, naive);
        }
    }
    const auto r = cw_overlap(b);
    EXPECT_NEAR(r.cw_overlap, oracle::cw_overlap(sets), 1e-12);
    EXPECT_NEAR(r.cw_overlap_pair_normalized, r.cw_overlap / 6.0, 1e-15);

    const auto m = pair_matrix(b);
    for (std::size_t a = 0; a < 4; ++a) {
        EXPECT_EQ(m.at(a, a), 0.0);
        for (std::size_t c = 0; c < 4; ++c) {
            EXPECT_EQ(m.at(a, c), m.at(c, a));
            EXPECT_GE(m.at(a, c), 0.0);
            EXPECT_LE(m.at(a, c), 1.0);
        }
    }
    double inter = 0.0, half = 0.0;
    for (NodeId i = 0; i < 150; ++i) {
        std::vector<NodeId> out;
        std::set_intersection(sets[0][i].begin(), sets[0][i].end(), sets[2][i].begin(), sets[2][i].end(),
                              std::back_inserter(out));
        inter += static_cast<double>(out.size());
        half += 0.5 * static_cast<double>(sets[0][i].size() + sets[2][i].size());
    }
    EXPECT_NEAR(m.at(0, 2), inter / half, 1e-15);
    EXPECT_EQ(m.raw_at(0, 2), static_cast<std::size_t>(inter));
}

TEST(Overlap, IdenticalPairMatrixEntryIsOne) {
    const auto b = bundle_of({{{1, 2}, {0}, {0}}, {{1, 2}, {0}, {0}}, {{2}, {2}, {1}}});
    const auto m = pair_matrix(b);
    EXPECT_DOUBLE_EQ(m.at(0, 1), 1.0);
}

TEST(Overlap, NeighborCountStats) {
    NNKGraph g;
    for (NodeId i = 0; i < 5; ++i) g.rows.push_back(row(i, {(i + 1) % 5, (i + 2) % 5}));
    for (auto& r : g.rows) std::sort(r.neighbor_indices.begin(), r.neighbor_indices.end());
    const auto s = neighbor_count_stats(g);
    EXPECT_EQ(s.mean, 2.0);
    EXPECT_EQ(s.median, 2.0);
    EXPECT_EQ(s.stddev, 0.0);
}

TEST(Overlap, ReportCarriesAggregateStats) {
    const auto fs = synthetic::gaussian_features(60, 4, 2, 17);
    const auto b = build_cw_graphs(fs, 10, KernelConfig{});
    const auto agg = build_aggregate_graph(fs, AggregateInit::union_of_channel_knn, 10, b.sigma_used);
    const auto r = make_overlap_report("layer", b, agg);
    EXPECT_EQ(r.layer_name, "layer");
    ASSERT_TRUE(r.mean_aggregate_nnk_count.has_value());
    EXPECT_DOUBLE_EQ(*r.mean_aggregate_nnk_count, neighbor_count_stats(agg).mean);
    ASSERT_TRUE(r.id_stats.has_value());
    EXPECT_EQ(r.id_stats->per_channel.size(), 2u);
    EXPECT_EQ(r.mean_nnk_count_per_channel.size(), 2u);
}

TEST(Overlap, NeighborListing) {
    ChannelGraphBundle b;
    b.channel_names = {"x", "y"};
    NNKGraph gx, gy;
    gx.rows = {row(0, {3, 7}, {0.2, 0.9}), row(1, {0}), row(2, {0}), row(3, {0}), row(4, {0}), row(5, {0}),
               row(6, {0}), row(7, {0})};
    gy.rows = gx.rows;
    gy.rows[0] = row(0, {1, 2}, {0.3, 0.4});
    b.per_channel = {gx, gy};
    const auto l = neighbor_listing(b, 0, {"x", "y"});
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[0].neighbor_indices, (std::vector<NodeId>{7, 3}));
    EXPECT_EQ(l[0].weights, (std::vector<double>{0.9, 0.2}));
    EXPECT_EQ(l[1].neighbor_indices, (std::vector<NodeId>{2, 1}));
    EXPECT_THROW(neighbor_listing(b, 0, {"z"}), Error);
    EXPECT_THROW(neighbor_listing(b, 99, {"x"}), Error);
}
