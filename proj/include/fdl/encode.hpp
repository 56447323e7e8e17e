#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fdl/curve.hpp"

namespace fdl {

inline constexpr std::size_t image_side = 28;
inline constexpr std::size_t image_pixels = image_side * image_side;

/// 28x28 grayscale signed-distance image, row-major, row i top-down.
/// pixel(i, j) = (f(x_i) - f(x_j) + 1) / 2 for the normalized, resampled f.
struct EncodedImage {
    std::array<double, image_pixels> pixels{};
    CurveMeta source_meta;

    double at(std::size_t row, std::size_t col) const { return pixels[row * image_side + col]; }
};

/// Image of an already normalized profile of exactly image_side values.
inline EncodedImage encode_normalized(std::span<const double> f, CurveMeta meta = {}) {
    EncodedImage img;
    img.source_meta = std::move(meta);
    for (std::size_t i = 0; i < image_side; ++i)
        for (std::size_t j = 0; j < image_side; ++j) img.pixels[i * image_side + j] = (f[i] - f[j] + 1.0) * 0.5;
    return img;
}

/// Reduces a curve to m values. Longer curves are box-averaged over m equal
/// bins of the sample axis (each sample covers one unit cell); this is the
/// same as building the full n x n distance matrix and area-resizing it,
/// since d_ij is linear in f. Shorter curves are linearly interpolated.
inline std::vector<double> reduce_to(const Curve& curve, std::size_t m) {
    const auto& y = curve.ys();
    const std::size_t n = y.size();
    if (n <= m) return resample(curve, m).ys();
    std::vector<double> out(m);
    // Bin i covers [i*n/m, (i+1)*n/m) in sample units; work in units of 1/m.
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t lo = i * n, hi = (i + 1) * n;
        double acc = 0.0;
        for (std::size_t k = lo / m; k * m < hi; ++k) {
            const std::size_t a = std::max(lo, k * m), b = std::min(hi, (k + 1) * m);
            acc += y[k] * static_cast<double>(b - a);
        }
        out[i] = acc / static_cast<double>(n);
    }
    return out;
}

/// normalize -> reduce to 28 points -> signed distance matrix -> [0,1].
inline EncodedImage encode(const Curve& curve, const NormalizationMode& mode) {
    return encode_normalized(reduce_to(minmax_normalize(curve, mode), image_side), curve.meta());
}

inline std::vector<EncodedImage> encode_batch(std::span<const Curve> curves, const NormalizationMode& mode) {
    std::vector<EncodedImage> out;
    out.reserve(curves.size());
    for (const Curve& c : curves) out.push_back(encode(c, mode));
    return out;
}

}  // namespace fdl
