#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cwnnk/error.hpp"

namespace cwnnk {

using NodeId = std::size_t;

struct ChannelSpec {
    std::string name;
    std::size_t dim = 0;

    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

using ChannelLayout = std::vector<ChannelSpec>;

inline std::size_t layout_width(const ChannelLayout& layout) {
    std::size_t total = 0;
    for (const auto& c : layout) total += c.dim;
    return total;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double diff = a[t] - b[t];
        acc += diff * diff;
    }
    return acc;
}

/// Read-only strided view over a column window of a row-major matrix.
/// A full feature set and each of its channels are both exposed this way.
class FeatureView {
public:
    FeatureView() = default;
    FeatureView(const double* base, std::size_t rows, std::size_t stride,
                std::size_t offset, std::size_t dim)
        : base_(base), rows_(rows), stride_(stride), offset_(offset), dim_(dim) {}

    std::size_t size() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t offset() const noexcept { return offset_; }

    std::span<const double> row(NodeId i) const noexcept {
        return {base_ + i * stride_ + offset_, dim_};
    }

private:
    const double* base_ = nullptr;
    std::size_t rows_ = 0;
    std::size_t stride_ = 0;
    std::size_t offset_ = 0;
    std::size_t dim_ = 0;
};

/// N x D feature matrix of one layer together with its channel layout.
/// Immutable after construction; all values are held in double precision.
class FeatureSet {
public:
    FeatureSet() = default;

    FeatureSet(std::string layer_name, std::size_t n, std::size_t d,
               std::vector<double> data, ChannelLayout layout,
               nlohmann::json source = nlohmann::json::object(),
               std::vector<int> labels = {})
        : layer_name_(std::move(layer_name)),
          n_(n),
          d_(d),
          data_(std::move(data)),
          layout_(std::move(layout)),
          source_(std::move(source)),
          labels_(std::move(labels)) {
        detail::require(n_ >= 2, ErrorCode::invalid_input,
                        "feature set needs at least 2 points, got " + std::to_string(n_));
        detail::require(d_ >= 1, ErrorCode::invalid_input, "feature dimension must be positive");
        detail::require(data_.size() == n_ * d_, ErrorCode::dimension_mismatch,
                        "feature buffer holds " + std::to_string(data_.size()) +
                            " values, expected " + std::to_string(n_ * d_));
        if (layout_.empty()) layout_.push_back({"c0", d_});
        for (const auto& c : layout_) {
            detail::require(c.dim > 0, ErrorCode::dimension_mismatch,
                            "channel '" + c.name + "' has zero width");
        }
        detail::require(layout_width(layout_) == d_, ErrorCode::dimension_mismatch,
                        "channel dims sum to " + std::to_string(layout_width(layout_)) +
                            " but feature width is " + std::to_string(d_));
        for (double v : data_) {
            detail::require(std::isfinite(v), ErrorCode::non_finite, "feature matrix has non-finite entries");
        }
        detail::require(labels_.empty() || labels_.size() == n_, ErrorCode::dimension_mismatch,
                        "label count does not match point count");
    }

    const std::string& layer_name() const noexcept { return layer_name_; }
    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }
    std::size_t channel_count() const noexcept { return layout_.size(); }
    const ChannelLayout& layout() const noexcept { return layout_; }
    const std::vector<double>& data() const noexcept { return data_; }
    const nlohmann::json& source() const noexcept { return source_; }
    const std::vector<int>& labels() const noexcept { return labels_; }

    std::span<const double> row(NodeId i) const noexcept { return {data_.data() + i * d_, d_}; }

    FeatureView view() const noexcept { return {data_.data(), n_, d_, 0, d_}; }

private:
    std::string layer_name_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> data_;
    ChannelLayout layout_;
    nlohmann::json source_ = nlohmann::json::object();
    std::vector<int> labels_;
};

} // namespace cwnnk
