// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "cwnnk/cwnnk.hpp"
#include "oracles.hpp"

using namespace cwnnk;

namespace {

unsigned worker_count() { return std::max(2u, std::thread::hardware_concurrency()); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void print_line(const char* name, const Outcome& o) {
    std::printf("%s  %-34s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. KRI predicate vs the sign of theta_k in the exact two-candidate QP.
Outcome kri_qp_equivalence() {
    constexpr std::size_t instances = 20000;
    constexpr double tol = 1e-8;
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(2024);
    std::uniform_int_distribution<std::size_t> dim_dist(1, 4);
    std::uniform_real_distribution<double> coord(-1.5, 1.5);
    std::size_t checked = 0, decision_mismatch = 0, admitted = 0;
    double worst_theta = 0.0;
    while (checked < instances) {
        const std::size_t d = dim_dist(rng);
        std::vector<double> p(3 * d);
        for (auto& v : p) v = coord(rng);
        const std::span<const double> xi(p.data(), d), xj(p.data() + d, d), xk(p.data() + 2 * d, d);
        const KRIInstance inst{oracle::kernel(xi, xj, 1.0), oracle::kernel(xi, xk, 1.0), oracle::kernel(xj, xk, 1.0)};
        if (!(inst.k_jk < 1.0 && inst.k_ij > 0.0 && inst.k_ik > 0.0 && inst.k_jk > 0.0)) continue;
        ++checked;

        Eigen::MatrixXd g(2, 2);
        g << 1.0, inst.k_jk, inst.k_jk, 1.0;
        Eigen::VectorXd b(2);
        b << inst.k_ij, inst.k_ik;
        const auto ref = oracle::exhaustive_nnqp(g, b);
        const auto closed = solve_two_candidate(inst);
        worst_theta = std::max({worst_theta, std::abs(closed.theta_j - ref(0)), std::abs(closed.theta_k - ref(1))});

        const bool pred = kri_admits(inst);
        admitted += pred;
        // admitted needs a strictly positive weight; eliminated allows |theta_k| <= tol
        const bool qp_positive = ref(1) > 0.0;
        if (pred ? !qp_positive : ref(1) > tol) ++decision_mismatch;
    }
    const double secs = seconds_since(t0);
    return {decision_mismatch == 0 && worst_theta <= tol && secs < 10.0,
            fmt("instances=%zu admitted=%zu mismatches=%zu max|dtheta|=%.2e time=%.2fs", checked, admitted,
                decision_mismatch, worst_theta, secs)};
}

// 2. nnk_solve vs exhaustive active-set enumeration.
Outcome solver_oracle_equivalence() {
    constexpr std::size_t queries = 500;
    Rng rng(77);
    std::uniform_int_distribution<std::size_t> k_dist(1, 10), dim_dist(2, 6);
    NNKOptions exact;
    exact.weight_threshold = 0.0;
    double worst = 0.0;
    std::size_t support_mismatch = 0;
    for (std::size_t q = 0; q < queries; ++q) {
        const auto fs = synthetic::gaussian_features(60, dim_dist(rng), 1, substream_seed(77, q));
        const std::size_t k = k_dist(rng);
        const NodeId query = q % fs.size();
        const double sigma = select_sigma(fs.view(), k, KernelConfig{});
        const auto cand = knn_search(fs.view(), query, k);
        auto ids = cand.indices;
        std::sort(ids.begin(), ids.end());
        const auto got = nnk_solve(fs.view(), query, cand, sigma, exact);
        const auto ref = oracle::exhaustive_nnk(fs.view(), query, ids, sigma);
        for (std::size_t a = 0; a < ids.size(); ++a) {
            double w = 0.0;
            for (std::size_t t = 0; t < got.size(); ++t)
                if (got.neighbor_indices[t] == ids[a]) w = got.weights[t];
            worst = std::max(worst, std::abs(w - ref[a]));
            if ((w > 1e-6) != (ref[a] > 1e-6)) ++support_mismatch;
        }
    }
    return {worst <= 1e-6, fmt("queries=%zu max|dtheta|=%.2e support_mismatches(>1e-6)=%zu", queries, worst,
                               support_mismatch)};
}

// 3. Mean NNK degree on a 2-D manifold in R^10 barely moves between K=30 and K=50.
Outcome nnk_stability() {
    const auto fs = synthetic::curved_sheet(1000, 10, 31);
    NNKOptions opts;
    opts.threads = worker_count();
    const auto g30 = build_graph(fs.view(), 30, KernelConfig{}, opts);
    const auto g50 = build_graph(fs.view(), 50, KernelConfig{}, opts);
    const double m30 = neighbor_count_stats(g30).mean;
    const double m50 = neighbor_count_stats(g50).mean;
    const double change = std::abs(m50 - m30) / m30;
    return {change < 0.10, fmt("mean|N| K=30: %.3f  K=50: %.3f  change=%.2f%% (KNN grows 66.7%%)", m30, m50,
                               100.0 * change)};
}

// 4. Full-graph inclusion under union initialization.
Outcome theorem1_corollary1() {
    constexpr std::size_t sets = 20, n = 200, dim = 8, k = 50;
    NNKOptions opts;
    opts.threads = worker_count();
    std::string detail;
    bool pass = true;
    for (std::size_t c : {2u, 4u}) {
        std::size_t t1_checked = 0, t1_viol = 0, c1_checked = 0, c1_viol = 0, tn_checked = 0, tn_viol = 0, unmet = 0;
        std::size_t sets_with_violation = 0;
        for (std::size_t s = 0; s < sets; ++s) {
            const auto fs = synthetic::gaussian_features(n, dim, c, substream_seed(1000 + c, s));
            const auto t1 = verify_theorem1(fs, k, KernelConfig{}, opts);
            const auto c1 = verify_corollary1(fs, k, KernelConfig{}, AggregateInit::union_of_channel_knn, opts);
            t1_checked += t1.instances_checked;
            t1_viol += t1.violations;
            tn_checked += t1.three_node_checked;
            tn_viol += t1.three_node_violations;
            c1_checked += c1.instances_checked;
            c1_viol += c1.violations;
            unmet += c1.precondition_unmet;
            sets_with_violation += (t1.violations + c1.violations) > 0;
        }
        pass = pass && t1_viol == 0 && c1_viol == 0;
        detail += fmt("[C=%zu T1 %zu/%zu C1 %zu/%zu sets_hit=%zu/%zu unmet=%zu three-node %zu/%zu] ", c, t1_viol,
                      t1_checked, c1_viol, c1_checked, sets_with_violation, sets, unmet, tn_viol, tn_checked);
    }
    return {pass, detail + "(violations/checked)"};
}

// 5. Double elimination carries to the aggregate.
Outcome theorem2() {
    const auto r = verify_theorem2(10000, 42, worker_count());
    return {r.violations == 0 && r.kernel_level_checked == 10000 && r.embedded_checked == 10000,
            fmt("kernel-level %zu/%zu embedded %zu/%zu (violations/checked)", r.kernel_level_violations,
                r.kernel_level_checked, r.embedded_violations, r.embedded_checked)};
}

// 6. Single-channel elimination can go either way.
Outcome lemma1() {
    const auto r = search_lemma1_witnesses(10000, 7, worker_count());
    return {r.passed(), fmt("witnesses=%zu admitted=%zu rejected=%zu prediction_mismatches=%zu",
                            r.instances_checked, r.admitted_count, r.rejected_count, r.violations)};
}

// 7. Aggregate NNK degree orders line < plane < 8-D blob.
Outcome id_proxy_monotonicity() {
    constexpr std::size_t n = 500, ambient = 10, k = 30;
    NNKOptions opts;
    opts.threads = worker_count();
    auto mean_degree = [&](const FeatureSet& fs) {
        return neighbor_count_stats(build_graph(fs.view(), k, KernelConfig{}, opts)).mean;
    };
    const double line = mean_degree(synthetic::line_manifold(n, ambient, 5));
    const double plane = mean_degree(synthetic::plane_manifold(n, ambient, 5));
    const double blob = mean_degree(synthetic::gaussian_blob(n, 8, ambient, 5));
    return {line < plane && plane < blob,
            fmt("K=%zu adaptive sigma: line %.3f < plane %.3f < blob8 %.3f", k, line, plane, blob)};
}

// 8. Byte-identical artifacts across thread counts and repeats.
Outcome determinism() {
    const auto fs = synthetic::gaussian_features(300, 12, 3, 8, "block");
    auto artifacts = [&](unsigned threads) {
        NNKOptions opts;
        opts.threads = threads;
        const auto a = analyze_layer(fs, 25, KernelConfig{}, opts);
        std::vector<std::string> out;
        for (const auto& g : a.bundle.per_channel) out.push_back(io::serialize_graph(g));
        out.push_back(io::serialize_graph(a.aggregate));
        out.push_back(io::to_json(layer_report(fs, a)).dump(2));
        out.push_back(io::to_json(verify_theorem2(2000, 42, threads)).dump(2));
        out.push_back(io::to_json(search_lemma1_witnesses(2000, 7, threads)).dump(2));
        out.push_back(io::to_json(verify_theorem1(fs, 25, KernelConfig{}, opts)).dump(2));
        return out;
    };
    const auto base = artifacts(1);
    std::size_t runs = 0, differing = 0;
    for (unsigned t : {1u, 2u, 3u, worker_count(), 2 * worker_count()}) {
        ++runs;
        if (artifacts(t) != base) ++differing;
    }
    return {differing == 0, fmt("%zu artifacts x %zu runs (threads 1..%u), differing runs=%zu", base.size(), runs,
                                2 * worker_count(), differing)};
}

} // namespace

int main() {
    std::printf("cwnnk acceptance (%u worker threads)\n", worker_count());
    auto guarded = [](const char* name, auto fn) {
        try {
            print_line(name, fn());
        } catch (const std::exception& e) {
            print_line(name, {false, std::string("error: ") + e.what()});
        }
    };
    guarded("kri-qp-equivalence", kri_qp_equivalence);
    guarded("solver-oracle-equivalence", solver_oracle_equivalence);
    guarded("nnk-stability", nnk_stability);
    guarded("theorem1-corollary1-inclusion", theorem1_corollary1);
    guarded("theorem2-double-elimination", theorem2);
    guarded("lemma1-witnesses", lemma1);
    guarded("id-proxy-monotonicity", id_proxy_monotonicity);
    guarded("determinism", determinism);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
