#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cwnnk/error.hpp"
#include "cwnnk/features.hpp"
#include "cwnnk/knn.hpp"

namespace cwnnk {

enum class SigmaMode { fixed, adaptive_mean_knn_dist };

/// Bandwidth settings for one layer. The resolved sigma is shared by every
/// channel of the layer and by the aggregate space.
struct KernelConfig {
    double sigma = 1.0;
    SigmaMode sigma_mode = SigmaMode::adaptive_mean_knn_dist;
    double scale_factor = 1.0;
};

/// Gaussian kernel value for a precomputed squared distance.
inline double gaussian_from_sq_dist(double sq_dist, double sigma) noexcept {
    return std::exp(-sq_dist / (2.0 * sigma * sigma));
}

inline double gaussian_kernel(std::span<const double> xi, std::span<const double> xj, double sigma) {
    detail::require(xi.size() == xj.size(), ErrorCode::dimension_mismatch,
                    "kernel arguments differ in dimension (" + std::to_string(xi.size()) + " vs " +
                        std::to_string(xj.size()) + ")");
    detail::require(std::isfinite(sigma) && sigma > 0.0, ErrorCode::invalid_input, "sigma must be positive");
    for (std::size_t t = 0; t < xi.size(); ++t) {
        detail::require(std::isfinite(xi[t]) && std::isfinite(xj[t]), ErrorCode::non_finite,
                        "kernel arguments must be finite");
    }
    return gaussian_from_sq_dist(squared_distance(xi, xj), sigma);
}

/// Checks that the aggregate kernel equals the product of per-channel kernels
/// (relative tolerance 1e-12). Every channel must use the same sigma; differing
/// per-channel bandwidths are rejected since the identity does not hold then.
inline bool kernel_product_identity_check(std::span<const double> xi, std::span<const double> xj,
                                          const ChannelLayout& layout,
                                          std::span<const double> channel_sigmas) {
    detail::require(xi.size() == xj.size() && layout_width(layout) == xi.size(), ErrorCode::dimension_mismatch,
                    "channelized vectors do not match the channel layout");
    detail::require(channel_sigmas.size() == layout.size(), ErrorCode::invalid_input,
                    "need one sigma per channel");
    for (double s : channel_sigmas) {
        detail::require(s == channel_sigmas.front(), ErrorCode::invalid_input,
                        "product identity requires a single sigma shared by all channels");
    }
    const double sigma = channel_sigmas.front();

    double product = 1.0;
    std::size_t offset = 0;
    for (const auto& c : layout) {
        product *= gaussian_kernel(xi.subspan(offset, c.dim), xj.subspan(offset, c.dim), sigma);
        offset += c.dim;
    }
    const double aggregate = gaussian_kernel(xi, xj, sigma);
    const double scale = std::max(std::abs(aggregate), std::abs(product));
    if (scale == 0.0) return true;
    return std::abs(aggregate - product) <= 1e-12 * scale;
}

inline bool kernel_product_identity_check(std::span<const double> xi, std::span<const double> xj,
                                          const ChannelLayout& layout, double sigma) {
    std::vector<double> sigmas(layout.size(), sigma);
    return kernel_product_identity_check(xi, xj, layout, sigmas);
}

/// Resolves the layer bandwidth. In adaptive mode this is scale_factor times
/// the mean, over all points, of the mean Euclidean distance to their K
/// nearest neighbors, computed on whatever view is passed (normally the
/// aggregate layer features).
inline double select_sigma(const FeatureView& features, std::size_t k, const KernelConfig& config) {
    if (config.sigma_mode == SigmaMode::fixed) {
        detail::require(std::isfinite(config.sigma) && config.sigma > 0.0, ErrorCode::invalid_input,
                        "fixed sigma must be positive");
        return config.sigma;
    }
    detail::require(config.scale_factor > 0.0, ErrorCode::invalid_input, "scale factor must be positive");
    const std::size_t n = features.size();
    detail::require(n >= k + 1, ErrorCode::invalid_input,
                    "adaptive sigma needs N >= K+1 (N=" + std::to_string(n) + ", K=" + std::to_string(k) + ")");

    double total = 0.0;
    for (NodeId i = 0; i < n; ++i) {
        const auto nn = knn_search(features, i, k);
        double per_point = 0.0;
        for (double d2 : nn.distances) per_point += std::sqrt(d2);
        total += per_point / static_cast<double>(k);
    }
    const double sigma = config.scale_factor * total / static_cast<double>(n);
    detail::require(sigma > 0.0, ErrorCode::zero_bandwidth, "zero bandwidth: all points coincide");
    return sigma;
}

} // namespace cwnnk
