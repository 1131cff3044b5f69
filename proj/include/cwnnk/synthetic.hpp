#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cwnnk/error.hpp"
#include "cwnnk/features.hpp"

namespace cwnnk {

/// Seed for substream `stream` of a run seeded with `seed` (splitmix64 mix).
/// Trials derive their generators this way so results do not depend on the
/// order in which trials execute.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

namespace synthetic {

/// cols orthonormal vectors of length rows, stored column-major.
inline std::vector<double> random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
    detail::require(cols <= rows, ErrorCode::invalid_input, "cannot fit more orthonormal vectors than dimensions");
    std::normal_distribution<double> normal;
    std::vector<double> basis(rows * cols);
    for (std::size_t c = 0; c < cols; ++c) {
        double* v = basis.data() + c * rows;
        for (;;) {
            for (std::size_t r = 0; r < rows; ++r) v[r] = normal(rng);
            for (std::size_t p = 0; p < c; ++p) {
                const double* u = basis.data() + p * rows;
                double dot = 0.0;
                for (std::size_t r = 0; r < rows; ++r) dot += u[r] * v[r];
                for (std::size_t r = 0; r < rows; ++r) v[r] -= dot * u[r];
            }
            double norm = 0.0;
            for (std::size_t r = 0; r < rows; ++r) norm += v[r] * v[r];
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (std::size_t r = 0; r < rows; ++r) v[r] /= norm;
                break;
            }
        }
    }
    return basis;
}

/// Maps n intrinsic coordinate rows (width intrinsic) into ambient space via a
/// random orthonormal frame.
inline std::vector<double> embed(const std::vector<double>& coords, std::size_t n, std::size_t intrinsic,
                                 std::size_t ambient, Rng& rng) {
    const auto frame = random_orthonormal(ambient, intrinsic, rng);
    std::vector<double> out(n * ambient, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < intrinsic; ++c)
            for (std::size_t r = 0; r < ambient; ++r)
                out[i * ambient + r] += coords[i * intrinsic + c] * frame[c * ambient + r];
    return out;
}

inline ChannelLayout even_layout(std::size_t dim, std::size_t channels) {
    detail::require(channels >= 1 && dim % channels == 0, ErrorCode::invalid_input,
                    "feature width must split evenly across channels");
    ChannelLayout layout;
    for (std::size_t c = 0; c < channels; ++c) layout.push_back({"c" + std::to_string(c), dim / channels});
    return layout;
}

/// i.i.d. standard normal entries.
inline FeatureSet gaussian_features(std::size_t n, std::size_t dim, std::size_t channels, std::uint64_t seed,
                                    std::string name = "gaussian") {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> data(n * dim);
    for (auto& v : data) v = normal(rng);
    return FeatureSet(std::move(name), n, dim, std::move(data), even_layout(dim, channels));
}

/// Uniform samples on a segment of length 1 along a random direction.
inline FeatureSet line_manifold(std::size_t n, std::size_t ambient, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> coords(n);
    for (auto& t : coords) t = unit(rng);
    return FeatureSet("line", n, ambient, embed(coords, n, 1, ambient, rng), even_layout(ambient, 1));
}

/// Uniform samples on a unit square in a random 2-D linear subspace.
inline FeatureSet plane_manifold(std::size_t n, std::size_t ambient, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> coords(n * 2);
    for (auto& t : coords) t = unit(rng);
    return FeatureSet("plane", n, ambient, embed(coords, n, 2, ambient, rng), even_layout(ambient, 1));
}

/// Isotropic Gaussian blob spanning `intrinsic` dimensions.
inline FeatureSet gaussian_blob(std::size_t n, std::size_t intrinsic, std::size_t ambient, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> coords(n * intrinsic);
    for (auto& t : coords) t = normal(rng);
    return FeatureSet("blob", n, ambient, embed(coords, n, intrinsic, ambient, rng), even_layout(ambient, 1));
}

/// Curved 2-D sheet: (u, v) on the unit square lifted through smooth
/// nonlinear coordinates, then rotated into the ambient space.
inline FeatureSet curved_sheet(std::size_t n, std::size_t ambient, std::uint64_t seed) {
    constexpr std::size_t lifted = 5;
    detail::require(ambient >= lifted, ErrorCode::invalid_input, "curved sheet needs ambient dimension >= 5");
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> coords(n * lifted);
    const double pi = std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = unit(rng);
        const double v = unit(rng);
        double* x = coords.data() + i * lifted;
        x[0] = u;
        x[1] = v;
        x[2] = 0.3 * std::sin(pi * u);
        x[3] = 0.3 * std::cos(pi * v);
        x[4] = 0.2 * std::sin(pi * (u + v));
    }
    return FeatureSet("sheet", n, ambient, embed(coords, n, lifted, ambient, rng), even_layout(ambient, 1));
}

} // namespace synthetic
} // namespace cwnnk
