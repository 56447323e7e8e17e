#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fdl/errors.hpp"

namespace fdl::nn {

/// Per-sample extent. Flat vectors are 1 x 1 x length.
struct Shape {
    std::size_t h = 1;
    std::size_t w = 1;
    std::size_t c = 1;

    constexpr std::size_t size() const noexcept { return h * w * c; }
    constexpr bool operator==(const Shape&) const = default;

    std::string str() const { return std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c); }
};

/// Batch of samples, each stored row-major (height, width, channels).
template <class T>
struct Tensor {
    std::size_t n = 0;
    Shape shape;
    std::vector<T> data;

    Tensor() = default;
    Tensor(std::size_t batch, Shape s) : n(batch), shape(s), data(batch * s.size(), T(0)) {}

    /// Reshapes without clearing; callers overwrite or call zero().
    void resize(std::size_t batch, Shape s) {
        n = batch;
        shape = s;
        data.resize(batch * s.size());
    }

    void zero() { std::fill(data.begin(), data.end(), T(0)); }

    std::size_t sample_size() const noexcept { return shape.size(); }
    std::span<T> sample(std::size_t i) { return {data.data() + i * sample_size(), sample_size()}; }
    std::span<const T> sample(std::size_t i) const { return {data.data() + i * sample_size(), sample_size()}; }
};

}  // namespace fdl::nn
