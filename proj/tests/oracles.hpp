#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cwnnk/cwnnk.hpp"

namespace oracle {

inline double kernel(std::span<const double> a, std::span<const double> b, double sigma) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return std::exp(-s / (2.0 * sigma * sigma));
}

/// Minimizer of 1/2 t'Gt - b't over t >= 0 by trying every support set.
/// A support is accepted when the unconstrained solve on it is non-negative
/// and the gradient on the complement is non-negative (KKT); the accepted
/// candidate with the lowest objective is returned. m <= 16.
inline Eigen::VectorXd exhaustive_nnqp(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs) {
    const Eigen::Index m = rhs.size();
    Eigen::VectorXd best = Eigen::VectorXd::Zero(m);
    double best_obj = 0.0;
    const double tol = 1e-10 * std::max(1.0, rhs.cwiseAbs().maxCoeff());
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<Eigen::Index> s;
        for (Eigen::Index a = 0; a < m; ++a)
            if (mask & (1u << a)) s.push_back(a);
        const auto p = static_cast<Eigen::Index>(s.size());
        Eigen::MatrixXd g(p, p);
        Eigen::VectorXd b(p);
        for (Eigen::Index r = 0; r < p; ++r) {
            b(r) = rhs(s[r]);
            for (Eigen::Index c = 0; c < p; ++c) g(r, c) = gram(s[r], s[c]);
        }
        const Eigen::VectorXd ts = g.ldlt().solve(b);
        if ((ts.array() < 0.0).any()) continue;
        Eigen::VectorXd t = Eigen::VectorXd::Zero(m);
        for (Eigen::Index r = 0; r < p; ++r) t(s[r]) = ts(r);
        const Eigen::VectorXd grad = gram * t - rhs;
        bool kkt = true;
        for (Eigen::Index a = 0; a < m; ++a)
            if (!(mask & (1u << a)) && grad(a) < -tol) kkt = false;
        if (!kkt) continue;
        const double obj = 0.5 * t.dot(gram * t) - rhs.dot(t);
        if (obj < best_obj) {
            best_obj = obj;
            best = t;
        }
    }
    return best;
}

/// Exhaustive NNK weights of `query` against `cands` (sorted, distinct, no query).
inline std::vector<double> exhaustive_nnk(const cwnnk::FeatureView& v, cwnnk::NodeId query,
                                          const std::vector<cwnnk::NodeId>& cands, double sigma) {
    const auto m = static_cast<Eigen::Index>(cands.size());
    Eigen::MatrixXd g(m, m);
    Eigen::VectorXd b(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        b(a) = kernel(v.row(query), v.row(cands[a]), sigma);
        for (Eigen::Index c = 0; c < m; ++c) g(a, c) = kernel(v.row(cands[a]), v.row(cands[c]), sigma);
    }
    const auto t = exhaustive_nnqp(g, b);
    return {t.data(), t.data() + m};
}

/// Brute-force KNN by full sort over (distance, id).
inline std::vector<cwnnk::NodeId> knn(const cwnnk::FeatureView& v, cwnnk::NodeId query, std::size_t k) {
    std::vector<std::pair<double, cwnnk::NodeId>> all;
    for (cwnnk::NodeId j = 0; j < v.size(); ++j) {
        if (j == query) continue;
        double s = 0.0;
        for (std::size_t d = 0; d < v.dim(); ++d) s += (v.row(query)[d] - v.row(j)[d]) * (v.row(query)[d] - v.row(j)[d]);
        all.emplace_back(s, j);
    }
    std::sort(all.begin(), all.end());
    std::vector<cwnnk::NodeId> out;
    for (std::size_t t = 0; t < k; ++t) out.push_back(all[t].second);
    return out;
}

/// Overlap from explicit neighbor sets via std::set intersections.
inline double cw_overlap(const std::vector<std::vector<std::set<cwnnk::NodeId>>>& sets_per_channel) {
    const std::size_t c = sets_per_channel.size();
    const std::size_t n = sets_per_channel.front().size();
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double raw = 0.0, total = 0.0;
        for (std::size_t a = 0; a < c; ++a) {
            total += static_cast<double>(sets_per_channel[a][i].size());
            for (std::size_t b = a + 1; b < c; ++b) {
                std::vector<cwnnk::NodeId> inter;
                std::set_intersection(sets_per_channel[a][i].begin(), sets_per_channel[a][i].end(),
                                      sets_per_channel[b][i].begin(), sets_per_channel[b][i].end(),
                                      std::back_inserter(inter));
                raw += static_cast<double>(inter.size());
            }
        }
        if (total == 0.0) continue;
        sum += raw / (total / static_cast<double>(c));
        ++used;
    }
    return used ? sum / static_cast<double>(used) : 0.0;
}

} // namespace oracle
