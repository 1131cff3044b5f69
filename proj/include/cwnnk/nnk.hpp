#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cwnnk/error.hpp"
#include "cwnnk/features.hpp"
#include "cwnnk/kernel.hpp"
#include "cwnnk/knn.hpp"
#include "cwnnk/parallel.hpp"

namespace cwnnk {

// -----------------------------------------------------------------------------
// Kernel ratio interval
// -----------------------------------------------------------------------------

/// Kernel values of a three-node configuration: query i, neighbors j and k.
struct KRIInstance {
    double k_ij = 1.0;
    double k_ik = 1.0;
    double k_jk = 1.0;
};

/// True iff k survives the hyperplane created by j with respect to query i,
/// i.e. K_ij / K_ik < 1 / K_jk. Strict: the boundary counts as eliminated.
inline bool kri_admits(const KRIInstance& inst) {
    detail::require(inst.k_ij > 0.0 && inst.k_ik > 0.0 && inst.k_jk > 0.0 && inst.k_ij <= 1.0 &&
                        inst.k_ik <= 1.0 && inst.k_jk <= 1.0,
                    ErrorCode::invalid_input, "KRI kernel values must lie in (0, 1]");
    // K_ij / K_ik < 1 / K_jk, cleared of denominators (all positive)
    return inst.k_jk * inst.k_ij < inst.k_ik;
}

struct TwoCandidateWeights {
    double theta_j = 0.0;
    double theta_k = 0.0;
};

/// Exact minimizer of 1/2 t'Gt - b't over t >= 0 for two candidates, with
/// G = [[1, K_jk], [K_jk, 1]] and b = (K_ij, K_ik). Closed form by case
/// analysis on the active set; requires K_jk < 1.
inline TwoCandidateWeights solve_two_candidate(const KRIInstance& inst) {
    detail::require(inst.k_jk < 1.0, ErrorCode::invalid_input, "two-candidate solve needs distinct candidates");
    const double det = 1.0 - inst.k_jk * inst.k_jk;
    const double tj = (inst.k_ij - inst.k_jk * inst.k_ik) / det;
    const double tk = (inst.k_ik - inst.k_jk * inst.k_ij) / det;
    if (tj > 0.0 && tk > 0.0) return {tj, tk};
    // one bound active; both cannot be since K_jk < 1
    if (tk <= 0.0) return {inst.k_ij, 0.0};
    return {0.0, inst.k_ik};
}

// -----------------------------------------------------------------------------
// Non-negative kernel regression
// -----------------------------------------------------------------------------

struct NNKOptions {
    double weight_threshold = 1e-6;
    /// Iteration cap is max_iteration_factor times the candidate count.
    std::size_t max_iteration_factor = 10;
    unsigned threads = 1;
};

struct NNKNeighborhood {
    NodeId query_index = 0;
    std::vector<NodeId> neighbor_indices; // ascending
    std::vector<double> weights;          // aligned, all > weight_threshold
    /// Candidates whose optimal weight was positive but <= weight_threshold.
    std::vector<NodeId> threshold_pruned;

    std::size_t size() const noexcept { return neighbor_indices.size(); }
    bool contains(NodeId j) const {
        return std::binary_search(neighbor_indices.begin(), neighbor_indices.end(), j);
    }

    friend bool operator==(const NNKNeighborhood& a, const NNKNeighborhood& b) {
        return a.query_index == b.query_index && a.neighbor_indices == b.neighbor_indices &&
               a.weights == b.weights;
    }
};

namespace detail {

/// In-place Cholesky of a packed symmetric m x m matrix (row-major, lower
/// triangle used). Returns false when a pivot is not safely positive.
inline bool cholesky_factor(std::vector<double>& a, std::size_t m) {
    constexpr double min_pivot = 1e-12;
    for (std::size_t j = 0; j < m; ++j) {
        double diag = a[j * m + j];
        for (std::size_t p = 0; p < j; ++p) diag -= a[j * m + p] * a[j * m + p];
        if (!(diag > min_pivot)) return false;
        const double ljj = std::sqrt(diag);
        a[j * m + j] = ljj;
        for (std::size_t r = j + 1; r < m; ++r) {
            double v = a[r * m + j];
            for (std::size_t p = 0; p < j; ++p) v -= a[r * m + p] * a[j * m + p];
            a[r * m + j] = v / ljj;
        }
    }
    return true;
}

inline void cholesky_solve(const std::vector<double>& l, std::size_t m, std::vector<double>& x) {
    for (std::size_t r = 0; r < m; ++r) {
        double v = x[r];
        for (std::size_t p = 0; p < r; ++p) v -= l[r * m + p] * x[p];
        x[r] = v / l[r * m + r];
    }
    for (std::size_t r = m; r-- > 0;) {
        double v = x[r];
        for (std::size_t p = r + 1; p < m; ++p) v -= l[p * m + r] * x[p];
        x[r] = v / l[r * m + r];
    }
}

/// Solves G_PP z = b_P for the passive index list. Returns false if G_PP is
/// numerically singular.
inline bool solve_passive(const std::vector<double>& gram, const std::vector<double>& rhs, std::size_t m,
                          const std::vector<std::size_t>& passive, std::vector<double>& z) {
    const std::size_t p = passive.size();
    std::vector<double> sub(p * p);
    for (std::size_t r = 0; r < p; ++r)
        for (std::size_t c = 0; c <= r; ++c) sub[r * p + c] = gram[passive[r] * m + passive[c]];
    if (!cholesky_factor(sub, p)) return false;
    z.resize(p);
    for (std::size_t r = 0; r < p; ++r) z[r] = rhs[passive[r]];
    cholesky_solve(sub, p, z);
    return true;
}

} // namespace detail

/// Active-set (Lawson-Hanson) solver for min 1/2 t'Gt - b't subject to t >= 0,
/// with G symmetric positive definite (m x m, row-major). Candidates that make
/// the passive system numerically singular are frozen at zero.
inline std::vector<double> nonnegative_qp(const std::vector<double>& gram, const std::vector<double>& rhs,
                                          std::size_t max_iterations) {
    const std::size_t m = rhs.size();
    double rhs_scale = 0.0;
    for (double v : rhs) rhs_scale = std::max(rhs_scale, std::abs(v));
    const double kkt_tol = 1e-12 * rhs_scale;

    std::vector<double> theta(m, 0.0);
    std::vector<char> in_passive(m, 0), frozen(m, 0);
    std::vector<std::size_t> passive;
    std::vector<double> z;
    std::size_t iterations = 0;

    auto gradient_gap = [&](std::size_t j) {
        double v = rhs[j];
        for (std::size_t t : passive) v -= gram[j * m + t] * theta[t];
        return v;
    };

    for (;;) {
        std::size_t entering = m;
        double best = kkt_tol;
        if (!(rhs_scale > 0.0)) break;
        for (std::size_t j = 0; j < m; ++j) {
            if (in_passive[j] || frozen[j]) continue;
            const double w = gradient_gap(j);
            if (w > best) {
                best = w;
                entering = j;
            }
        }
        if (entering == m) break;

        in_passive[entering] = 1;
        passive.push_back(entering);
        bool first_pass = true;

        for (;;) {
            if (++iterations > max_iterations) {
                throw Error(ErrorCode::solver_nonconvergence,
                            "NNK solver did not converge after " + std::to_string(iterations - 1) + " iterations");
            }
            const bool solved = detail::solve_passive(gram, rhs, m, passive, z);
            const auto entering_pos = static_cast<std::size_t>(
                std::find(passive.begin(), passive.end(), entering) - passive.begin());
            if (first_pass && (!solved || !(z[entering_pos] > 0.0))) {
                // degenerate direction: entering column is (numerically) dependent
                passive.erase(passive.begin() + static_cast<std::ptrdiff_t>(entering_pos));
                in_passive[entering] = 0;
                frozen[entering] = 1;
                break;
            }
            if (!solved) {
                throw Error(ErrorCode::solver_nonconvergence, "NNK solver hit a singular passive system");
            }
            first_pass = false;

            bool feasible = true;
            for (double v : z) feasible = feasible && v > 0.0;
            if (feasible) {
                for (std::size_t r = 0; r < passive.size(); ++r) theta[passive[r]] = z[r];
                break;
            }

            double alpha = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < passive.size(); ++r) {
                if (z[r] <= 0.0) {
                    const double t = theta[passive[r]];
                    alpha = std::min(alpha, t / (t - z[r]));
                }
            }
            for (std::size_t r = 0; r < passive.size(); ++r) {
                const std::size_t idx = passive[r];
                theta[idx] += alpha * (z[r] - theta[idx]);
            }
            std::vector<std::size_t> kept;
            for (std::size_t r = 0; r < passive.size(); ++r) {
                const std::size_t idx = passive[r];
                if (theta[idx] <= 0.0 || (z[r] <= 0.0 && theta[idx] <= 1e-15 * rhs_scale)) {
                    theta[idx] = 0.0;
                    in_passive[idx] = 0;
                } else {
                    kept.push_back(idx);
                }
            }
            passive = std::move(kept);
            if (passive.empty()) break;
        }
    }
    return theta;
}

/// NNK neighborhood of one query: non-negative kernel regression of the query
/// on its candidate set, keeping candidates with weight > weight_threshold.
/// Repeated ids and coincident candidates (kernel exactly 1 between them) are
/// collapsed to the lowest id before solving.
inline NNKNeighborhood nnk_solve(const FeatureView& features, NodeId query_index,
                                 std::span<const NodeId> candidates, double sigma,
                                 const NNKOptions& options = {}) {
    detail::require(!candidates.empty(), ErrorCode::invalid_input, "NNK solve needs at least one candidate");
    detail::require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::invalid_input, "sigma must be positive");
    detail::require(query_index < features.size(), ErrorCode::invalid_input, "query index out of range");

    std::vector<NodeId> ids;
    ids.reserve(candidates.size());
    for (NodeId c : candidates) {
        detail::require(c < features.size(), ErrorCode::invalid_input,
                        "candidate " + std::to_string(c) + " out of range");
        if (c != query_index) ids.push_back(c);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    detail::require(!ids.empty(), ErrorCode::invalid_input, "candidate set only contains the query");

    std::vector<NodeId> reps;
    reps.reserve(ids.size());
    for (NodeId c : ids) {
        bool duplicate = false;
        for (NodeId r : reps) {
            if (gaussian_from_sq_dist(squared_distance(features.row(c), features.row(r)), sigma) == 1.0) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) reps.push_back(c);
    }

    const std::size_t m = reps.size();
    std::vector<double> gram(m * m), rhs(m);
    const auto q = features.row(query_index);
    for (std::size_t a = 0; a < m; ++a) {
        const auto xa = features.row(reps[a]);
        rhs[a] = gaussian_from_sq_dist(squared_distance(q, xa), sigma);
        gram[a * m + a] = 1.0;
        for (std::size_t b = 0; b < a; ++b) {
            const double v = gaussian_from_sq_dist(squared_distance(xa, features.row(reps[b])), sigma);
            gram[a * m + b] = v;
            gram[b * m + a] = v;
        }
    }

    const auto theta = nonnegative_qp(gram, rhs, std::max<std::size_t>(1, options.max_iteration_factor * m));

    NNKNeighborhood out;
    out.query_index = query_index;
    for (std::size_t a = 0; a < m; ++a) {
        if (theta[a] > options.weight_threshold) {
            out.neighbor_indices.push_back(reps[a]);
            out.weights.push_back(theta[a]);
        } else if (theta[a] > 0.0) {
            out.threshold_pruned.push_back(reps[a]);
        }
    }
    return out;
}

inline NNKNeighborhood nnk_solve(const FeatureView& features, NodeId query_index,
                                 const NeighborCandidates& candidates, double sigma,
                                 const NNKOptions& options = {}) {
    return nnk_solve(features, query_index, std::span<const NodeId>(candidates.indices), sigma, options);
}

// -----------------------------------------------------------------------------
// Graph
// -----------------------------------------------------------------------------

/// Sparse directed weighted graph; row i holds the NNK weights of node i.
struct NNKGraph {
    std::vector<NNKNeighborhood> rows;

    std::size_t node_count() const noexcept { return rows.size(); }
    std::size_t edge_count() const noexcept {
        std::size_t e = 0;
        for (const auto& r : rows) e += r.size();
        return e;
    }
    const NNKNeighborhood& operator[](NodeId i) const { return rows.at(i); }

    friend bool operator==(const NNKGraph& a, const NNKGraph& b) { return a.rows == b.rows; }
};

/// Builds one NNK row per node, seeding each solve with candidates_of(i).
/// Rows are independent and written to their own slot, so the result does not
/// depend on options.threads.
template <typename CandidateFn>
NNKGraph build_graph_from_candidates(const FeatureView& features, double sigma, const NNKOptions& options,
                                     CandidateFn&& candidates_of) {
    NNKGraph graph;
    graph.rows.resize(features.size());
    parallel_for(features.size(), options.threads, [&](std::size_t i) {
        try {
            const std::vector<NodeId> cand = candidates_of(static_cast<NodeId>(i));
            graph.rows[i] = nnk_solve(features, i, std::span<const NodeId>(cand), sigma, options);
        } catch (const Error& e) {
            throw Error(e.code(), "node " + std::to_string(i) + ": " + e.what());
        }
    });
    return graph;
}

/// NNK graph with plain KNN initialization and a pre-resolved bandwidth.
inline NNKGraph build_graph(const FeatureView& features, std::size_t k, double sigma,
                            const NNKOptions& options = {}) {
    detail::require(features.size() >= k + 1, ErrorCode::invalid_input,
                    "graph construction needs N >= K+1 (N=" + std::to_string(features.size()) +
                        ", K=" + std::to_string(k) + ")");
    return build_graph_from_candidates(features, sigma, options,
                                       [&](NodeId i) { return knn_search(features, i, k).indices; });
}

inline NNKGraph build_graph(const FeatureView& features, std::size_t k, const KernelConfig& config,
                            const NNKOptions& options = {}) {
    detail::require(features.size() >= k + 1, ErrorCode::invalid_input, "graph construction needs N >= K+1");
    return build_graph(features, k, select_sigma(features, k, config), options);
}

} // namespace cwnnk
