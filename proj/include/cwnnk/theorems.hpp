#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cwnnk/channels.hpp"
#include "cwnnk/error.hpp"
#include "cwnnk/features.hpp"
#include "cwnnk/kernel.hpp"
#include "cwnnk/nnk.hpp"
#include "cwnnk/overlap.hpp"
#include "cwnnk/parallel.hpp"
#include "cwnnk/synthetic.hpp"

// Empirical checks of how channel-wise NNK neighborhoods relate to the NNK
// neighborhood of the aggregated channels:
//   T1  a node that is an NNK neighbor in two channels (and an aggregate
//       candidate) is an NNK neighbor in the aggregate;
//   C1  the same, as a set inclusion per channel pair;
//   T2  a node eliminated by the same j in both channels stays eliminated;
//   L1  a node eliminated by j in only one channel may or may not survive,
//       decided by a*eps > b*gamma.

namespace cwnnk {

enum class TheoremId { T1, C1, T2, L1 };

constexpr std::string_view to_string(TheoremId id) noexcept {
    switch (id) {
    case TheoremId::T1: return "T1";
    case TheoremId::C1: return "C1";
    case TheoremId::T2: return "T2";
    case TheoremId::L1: return "L1";
    }
    return "?";
}

struct ViolationDetail {
    NodeId query = 0;
    std::size_t channel_a = 0;
    std::size_t channel_b = 0;
    NodeId neighbor = 0;
};

/// Scalars of the one-channel-elimination inequality a*eps ?> b*gamma, with
/// a = 1/K_jk (channel 1), a + gamma = K_ij/K_ik (channel 1),
/// b = K_ij/K_ik (channel 2), b + eps = 1/K_jk (channel 2).
struct LemmaWitness {
    std::uint64_t trial = 0;
    double a = 0.0;
    double b = 0.0;
    double gamma = 0.0;
    double epsilon = 0.0;
    bool predicted_admitted = false; // a*eps > b*gamma
    bool qp_admitted = false;        // closed-form two-candidate QP on the aggregate
    bool solver_admitted = false;    // nnk_solve on the embedded aggregate points
};

struct TheoremReport {
    TheoremId theorem_id = TheoremId::T1;
    std::size_t instances_checked = 0;
    std::size_t violations = 0;
    std::vector<ViolationDetail> violation_details; // capped at max_details

    // T1 / C1
    std::size_t three_node_checked = 0;    // (i, j, k) triples inside the proof's scope
    std::size_t three_node_violations = 0; // must be 0: pure kernel algebra
    std::size_t lower_bound_checked = 0;
    std::size_t lower_bound_violations = 0; // points with |union of pair intersections| > |N(x_i)|
    std::size_t precondition_unmet = 0;     // C1: intersection not inside the aggregate candidate set
    std::size_t near_misses = 0;            // C1: inclusion failed where the precondition was unmet
    std::vector<ViolationDetail> near_miss_details;

    // T2
    std::size_t kernel_level_checked = 0;
    std::size_t kernel_level_violations = 0;
    std::size_t embedded_checked = 0;
    std::size_t embedded_violations = 0;

    // L1
    std::size_t admitted_count = 0;
    std::size_t rejected_count = 0;
    std::vector<LemmaWitness> admitted_witnesses; // capped at max_details
    std::vector<LemmaWitness> rejected_witnesses;

    static constexpr std::size_t max_details = 64;

    bool passed() const {
        if (theorem_id == TheoremId::L1) return violations == 0 && admitted_count > 0 && rejected_count > 0;
        return violations == 0;
    }
};

namespace detail {

/// Does `self` survive the hyperplane of `other` for query i (three-node KRI)?
inline bool survives(double k_i_self, double k_i_other, double k_self_other) {
    return kri_admits({k_i_other, k_i_self, k_self_other});
}

inline void push_capped(std::vector<ViolationDetail>& out, const ViolationDetail& d) {
    if (out.size() < TheoremReport::max_details) out.push_back(d);
}

} // namespace detail

/// Builds channel graphs and the union-initialized aggregate graph, then checks
/// for every query and channel pair that each common NNK neighbor is an
/// aggregate NNK neighbor. Also runs the three-node form of the same check on
/// every (i, j, k) with k in the aggregate candidate set, using the aggregate
/// of the two channels involved.
inline TheoremReport verify_theorem1(const FeatureSet& features, std::size_t k, const KernelConfig& config,
                                     const NNKOptions& options = {}) {
    const std::size_t c = features.channel_count();
    detail::require(c >= 2, ErrorCode::invalid_input, "theorem checks need at least 2 channels");
    const double sigma = select_sigma(features.view(), k, config);
    const auto bundle = build_cw_graphs(features, k, sigma, options);
    const auto aggregate = build_aggregate_graph(features, AggregateInit::union_of_channel_knn, k, sigma, options);
    const auto views = split_channels(features);
    const std::size_t n = features.size();

    struct NodeResult {
        std::size_t checked = 0, three_checked = 0, three_violations = 0;
        bool lower_bound_ok = true;
        std::vector<ViolationDetail> violations;
    };
    std::vector<NodeResult> per_node(n);

    parallel_for(n, options.threads, [&](std::size_t i) {
        auto& res = per_node[i];
        const auto candidates = aggregate_candidates(features, views, i, AggregateInit::union_of_channel_knn, k);
        std::vector<NodeId> pair_union;
        for (std::size_t a = 0; a < c; ++a) {
            for (std::size_t b = a + 1; b < c; ++b) {
                const auto& na = bundle.per_channel[a][i];
                const auto& nb = bundle.per_channel[b][i];
                for (NodeId j : na.neighbor_indices) {
                    if (!nb.contains(j)) continue;
                    pair_union.push_back(j);
                    if (!std::binary_search(candidates.begin(), candidates.end(), j)) continue;
                    ++res.checked;
                    if (!aggregate[i].contains(j)) res.violations.push_back({i, a, b, j});

                    const double dij_a = squared_distance(views[a].row(i), views[a].row(j));
                    const double dij_b = squared_distance(views[b].row(i), views[b].row(j));
                    for (NodeId other : candidates) {
                        if (other == j) continue;
                        const double dik_a = squared_distance(views[a].row(i), views[a].row(other));
                        const double dik_b = squared_distance(views[b].row(i), views[b].row(other));
                        const double djk_a = squared_distance(views[a].row(j), views[a].row(other));
                        const double djk_b = squared_distance(views[b].row(j), views[b].row(other));
                        if (djk_a == 0.0 || djk_b == 0.0) continue;
                        const auto kern = [&](double d2) { return gaussian_from_sq_dist(d2, sigma); };
                        const bool in_a = detail::survives(kern(dij_a), kern(dik_a), kern(djk_a));
                        const bool in_b = detail::survives(kern(dij_b), kern(dik_b), kern(djk_b));
                        if (!(in_a && in_b)) continue;
                        ++res.three_checked;
                        if (!detail::survives(kern(dij_a + dij_b), kern(dik_a + dik_b), kern(djk_a + djk_b)))
                            ++res.three_violations;
                    }
                }
            }
        }
        std::sort(pair_union.begin(), pair_union.end());
        pair_union.erase(std::unique(pair_union.begin(), pair_union.end()), pair_union.end());
        res.lower_bound_ok = pair_union.size() <= aggregate[i].size();
    });

    TheoremReport report;
    report.theorem_id = TheoremId::T1;
    for (const auto& res : per_node) {
        report.instances_checked += res.checked;
        report.violations += res.violations.size();
        for (const auto& v : res.violations) detail::push_capped(report.violation_details, v);
        report.three_node_checked += res.three_checked;
        report.three_node_violations += res.three_violations;
        ++report.lower_bound_checked;
        if (!res.lower_bound_ok) ++report.lower_bound_violations;
    }
    return report;
}

/// Per (query, channel pair) set inclusion N_a(i) ∩ N_b(i) ⊆ N(i). Pairs whose
/// intersection is not inside the aggregate candidate set do not meet the
/// precondition; inclusion failures there are listed as near misses only.
inline TheoremReport verify_corollary1(const FeatureSet& features, std::size_t k, const KernelConfig& config,
                                       AggregateInit init = AggregateInit::union_of_channel_knn,
                                       const NNKOptions& options = {}) {
    const std::size_t c = features.channel_count();
    detail::require(c >= 2, ErrorCode::invalid_input, "corollary check needs at least 2 channels");
    const double sigma = select_sigma(features.view(), k, config);
    const auto bundle = build_cw_graphs(features, k, sigma, options);
    const auto aggregate = build_aggregate_graph(features, init, k, sigma, options);
    const auto views = split_channels(features);

    TheoremReport report;
    report.theorem_id = TheoremId::C1;
    for (NodeId i = 0; i < features.size(); ++i) {
        const auto candidates = aggregate_candidates(features, views, i, init, k);
        std::vector<NodeId> sorted_candidates = candidates;
        std::sort(sorted_candidates.begin(), sorted_candidates.end());
        for (std::size_t a = 0; a < c; ++a) {
            for (std::size_t b = a + 1; b < c; ++b) {
                std::vector<NodeId> common;
                std::set_intersection(bundle.per_channel[a][i].neighbor_indices.begin(),
                                      bundle.per_channel[a][i].neighbor_indices.end(),
                                      bundle.per_channel[b][i].neighbor_indices.begin(),
                                      bundle.per_channel[b][i].neighbor_indices.end(), std::back_inserter(common));
                const bool precondition = std::includes(sorted_candidates.begin(), sorted_candidates.end(),
                                                        common.begin(), common.end());
                std::optional<NodeId> missing;
                for (NodeId j : common) {
                    if (!aggregate[i].contains(j)) {
                        missing = j;
                        break;
                    }
                }
                if (!precondition) {
                    ++report.precondition_unmet;
                    if (missing) {
                        ++report.near_misses;
                        detail::push_capped(report.near_miss_details, {i, a, b, *missing});
                    }
                    continue;
                }
                ++report.instances_checked;
                if (missing) {
                    ++report.violations;
                    detail::push_capped(report.violation_details, {i, a, b, *missing});
                }
            }
        }
    }
    return report;
}

namespace detail {

/// Points i, j, k in the plane, stored as a 3 x 2 row-major block.
inline std::vector<double> sample_triple(Rng& rng, double half_width) {
    std::uniform_real_distribution<double> coord(-half_width, half_width);
    std::vector<double> p(6);
    for (auto& v : p) v = coord(rng);
    return p;
}

inline KRIInstance triple_kernels(const std::vector<double>& p, std::size_t stride, std::size_t offset,
                                  std::size_t dim, NodeId i, NodeId j, NodeId k, double sigma) {
    auto row = [&](NodeId r) { return std::span<const double>(p.data() + r * stride + offset, dim); };
    return {gaussian_kernel(row(i), row(j), sigma), gaussian_kernel(row(i), row(k), sigma),
            gaussian_kernel(row(j), row(k), sigma)};
}

/// Kernel values realizable by three points under a Gaussian kernel with unit
/// bandwidth: the implied distances satisfy the triangle inequality.
inline bool realizable(const KRIInstance& inst) {
    const double dij = std::sqrt(-2.0 * std::log(inst.k_ij));
    const double dik = std::sqrt(-2.0 * std::log(inst.k_ik));
    const double djk = std::sqrt(-2.0 * std::log(inst.k_jk));
    return dij + dik > djk && dij + djk > dik && dik + djk > dij;
}

inline constexpr std::size_t max_sampling_attempts = 100000;

/// Kernel-level instance where j eliminates k: K_ij / K_ik > 1 / K_jk.
inline KRIInstance sample_eliminating_kernels(Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t attempt = 0; attempt < max_sampling_attempts; ++attempt) {
        const KRIInstance inst{unit(rng), unit(rng), unit(rng)};
        if (!(inst.k_ij > 0.0 && inst.k_ik > 0.0 && inst.k_jk > 0.0 && inst.k_jk < 1.0)) continue;
        if (kri_admits(inst) || !realizable(inst)) continue;
        return inst;
    }
    throw Error(ErrorCode::sampling_failure, "could not sample an eliminating kernel configuration");
}

} // namespace detail

/// Two-channel three-node configurations where the same j eliminates k in both
/// channels; the aggregate must eliminate k as well. Every trial runs a
/// kernel-level sampler and a point-embedded sampler.
inline TheoremReport verify_theorem2(std::size_t num_trials, std::uint64_t rng_seed, unsigned threads = 1) {
    detail::require(num_trials >= 1, ErrorCode::invalid_input, "need at least one trial");
    struct TrialResult {
        bool kernel_violation = false;
        bool embedded_violation = false;
    };
    std::vector<TrialResult> results(num_trials);

    parallel_for(num_trials, threads, [&](std::size_t t) {
        Rng rng(substream_seed(rng_seed, t));

        const auto c1 = detail::sample_eliminating_kernels(rng);
        const auto c2 = detail::sample_eliminating_kernels(rng);
        const KRIInstance agg{c1.k_ij * c2.k_ij, c1.k_ik * c2.k_ik, c1.k_jk * c2.k_jk};
        results[t].kernel_violation = kri_admits(agg) || solve_two_candidate(agg).theta_k != 0.0;

        // point-embedded: channel c occupies columns [2c, 2c+2) of a 3 x 4 matrix
        constexpr double sigma = 1.0;
        std::vector<double> pts(12);
        for (std::size_t ch = 0; ch < 2; ++ch) {
            std::size_t attempt = 0;
            for (;; ++attempt) {
                if (attempt == detail::max_sampling_attempts)
                    throw Error(ErrorCode::sampling_failure, "could not embed an eliminating point triple");
                const auto tri = detail::sample_triple(rng, 1.5);
                const auto inst = detail::triple_kernels(tri, 2, 0, 2, 0, 1, 2, sigma);
                if (inst.k_jk < 1.0 && !kri_admits(inst)) {
                    for (std::size_t r = 0; r < 3; ++r)
                        for (std::size_t d = 0; d < 2; ++d) pts[r * 4 + ch * 2 + d] = tri[r * 2 + d];
                    break;
                }
            }
        }
        const FeatureSet fs("t2", 3, 4, pts, {{"c1", 2}, {"c2", 2}});
        const auto agg_inst = detail::triple_kernels(pts, 4, 0, 4, 0, 1, 2, sigma);
        NNKOptions exact;
        exact.weight_threshold = 0.0;
        const std::vector<NodeId> cand{1, 2};
        const auto row = nnk_solve(fs.view(), 0, std::span<const NodeId>(cand), sigma, exact);
        results[t].embedded_violation = row.contains(2) || solve_two_candidate(agg_inst).theta_k != 0.0;
    });

    TheoremReport report;
    report.theorem_id = TheoremId::T2;
    for (std::size_t t = 0; t < num_trials; ++t) {
        report.kernel_level_checked += 1;
        report.embedded_checked += 1;
        if (results[t].kernel_violation) {
            ++report.kernel_level_violations;
            detail::push_capped(report.violation_details, {t, 0, 1, 2});
        }
        if (results[t].embedded_violation) {
            ++report.embedded_violations;
            detail::push_capped(report.violation_details, {t, 0, 1, 2});
        }
    }
    report.instances_checked = report.kernel_level_checked + report.embedded_checked;
    report.violations = report.kernel_level_violations + report.embedded_violations;
    return report;
}

/// Searches embedded four-point configurations (query i, j, k, q) where k is
/// not an NNK neighbor in either channel, j eliminates k in channel 1 only and
/// q eliminates k in channel 2. Records the three-node (i, j, k) aggregate
/// outcome together with the a*eps ?> b*gamma prediction. A prediction that
/// disagrees with the exact two-candidate QP or with nnk_solve counts as a
/// violation.
inline TheoremReport search_lemma1_witnesses(std::size_t num_trials, std::uint64_t rng_seed, unsigned threads = 1) {
    detail::require(num_trials >= 1, ErrorCode::invalid_input, "need at least one trial");
    std::vector<std::optional<LemmaWitness>> found(num_trials);
    constexpr double sigma = 1.0;

    parallel_for(num_trials, threads, [&](std::size_t t) {
        Rng rng(substream_seed(rng_seed, t));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_real_distribution<double> coord(-1.5, 1.5);

        // rows: 0 = i, 1 = j, 2 = k, 3 = q; channel 1 columns 0-1, channel 2 columns 2-3
        std::vector<double> pts(16);
        auto at = [&](std::size_t r, std::size_t ch, std::size_t d) -> double& { return pts[r * 4 + ch * 2 + d]; };

        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t ch = 0; ch < 2; ++ch)
                for (std::size_t d = 0; d < 2; ++d) at(r, ch, d) = coord(rng);
        // q on the segment from i to k in channel 2, so it shadows k there
        const double s = 0.2 + 0.6 * unit(rng);
        for (std::size_t d = 0; d < 2; ++d) at(3, 1, d) = at(0, 1, d) + s * (at(2, 1, d) - at(0, 1, d));

        const auto ch1 = detail::triple_kernels(pts, 4, 0, 2, 0, 1, 2, sigma);
        const auto ch2 = detail::triple_kernels(pts, 4, 2, 2, 0, 1, 2, sigma);
        if (!(ch1.k_jk < 1.0 && ch2.k_jk < 1.0)) return;
        if (kri_admits(ch1) || !kri_admits(ch2)) return; // j eliminates k in channel 1 only

        const FeatureSet fs("l1", 4, 4, pts, {{"c1", 2}, {"c2", 2}});
        const auto views = split_channels(fs);
        NNKOptions exact;
        exact.weight_threshold = 0.0;
        const std::vector<NodeId> full{1, 2, 3};
        for (const auto& v : views) {
            if (nnk_solve(v, 0, std::span<const NodeId>(full), sigma, exact).contains(2)) return;
        }

        LemmaWitness w;
        w.trial = t;
        w.a = 1.0 / ch1.k_jk;
        w.gamma = ch1.k_ij / ch1.k_ik - w.a;
        w.b = ch2.k_ij / ch2.k_ik;
        w.epsilon = 1.0 / ch2.k_jk - w.b;
        if (!(w.gamma > 0.0 && w.epsilon > 0.0)) return;
        w.predicted_admitted = w.a * w.epsilon > w.b * w.gamma;

        const auto agg = detail::triple_kernels(pts, 4, 0, 4, 0, 1, 2, sigma);
        w.qp_admitted = solve_two_candidate(agg).theta_k > 0.0;
        const std::vector<NodeId> three{1, 2};
        w.solver_admitted = nnk_solve(fs.view(), 0, std::span<const NodeId>(three), sigma, exact).contains(2);
        found[t] = w;
    });

    TheoremReport report;
    report.theorem_id = TheoremId::L1;
    for (const auto& w : found) {
        if (!w) continue;
        ++report.instances_checked;
        if (w->predicted_admitted != w->qp_admitted || w->qp_admitted != w->solver_admitted) {
            ++report.violations;
            detail::push_capped(report.violation_details, {static_cast<NodeId>(w->trial), 0, 1, 2});
        }
        if (w->qp_admitted) {
            ++report.admitted_count;
            if (report.admitted_witnesses.size() < TheoremReport::max_details) report.admitted_witnesses.push_back(*w);
        } else {
            ++report.rejected_count;
            if (report.rejected_witnesses.size() < TheoremReport::max_details) report.rejected_witnesses.push_back(*w);
        }
    }
    return report;
}

} // namespace cwnnk
