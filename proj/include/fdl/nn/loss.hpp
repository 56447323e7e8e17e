#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "fdl/errors.hpp"
#include "fdl/nn/tensor.hpp"

namespace fdl::nn {

enum class LossKind { MSE, SoftmaxCrossEntropy, BinaryCrossEntropy };

inline const char* to_string(LossKind k) {
    switch (k) {
        case LossKind::MSE: return "mse";
        case LossKind::SoftmaxCrossEntropy: return "softmax_cross_entropy";
        case LossKind::BinaryCrossEntropy: return "binary_cross_entropy";
    }
    return "?";
}

inline LossKind loss_kind_from_string(const std::string& s) {
    for (auto k : {LossKind::MSE, LossKind::SoftmaxCrossEntropy, LossKind::BinaryCrossEntropy})
        if (s == to_string(k)) return k;
    throw DataError("unknown loss '" + s + "'");
}

/// Loss value averaged over the batch; writes dLoss/dOutput into grad when
/// non-null.
///  MSE: targets hold one value per output, loss = mean over all elements.
///  SoftmaxCrossEntropy: output holds probabilities, targets one class index
///    per sample.
///  BinaryCrossEntropy: output holds one probability per sample, targets 0/1.
template <class T>
double compute_loss(LossKind kind, const Tensor<T>& out, std::span<const T> targets, Tensor<T>* grad) {
    const std::size_t n = out.n, k = out.sample_size();
    if (grad) grad->resize(n, out.shape);
    constexpr double p_floor = 1e-12;
    double loss = 0.0;
    switch (kind) {
        case LossKind::MSE: {
            if (targets.size() != out.data.size()) throw ArgumentError("mse: target size mismatch");
            const double scale = 1.0 / static_cast<double>(out.data.size());
            for (std::size_t i = 0; i < out.data.size(); ++i) {
                const double d = static_cast<double>(out.data[i]) - targets[i];
                loss += d * d;
                if (grad) grad->data[i] = static_cast<T>(2.0 * d * scale);
            }
            return loss * scale;
        }
        case LossKind::SoftmaxCrossEntropy: {
            if (targets.size() != n) throw ArgumentError("cross entropy: one class index per sample expected");
            if (grad) grad->zero();
            for (std::size_t s = 0; s < n; ++s) {
                const auto cls = static_cast<std::size_t>(targets[s]);
                if (cls >= k) throw ArgumentError("cross entropy: class index out of range");
                const double p = std::max<double>(out.data[s * k + cls], p_floor);
                loss -= std::log(p);
                if (grad) grad->data[s * k + cls] = static_cast<T>(-1.0 / (p * static_cast<double>(n)));
            }
            return loss / static_cast<double>(n);
        }
        case LossKind::BinaryCrossEntropy: {
            if (k != 1 || targets.size() != n) throw ArgumentError("bce: one probability and target per sample");
            for (std::size_t s = 0; s < n; ++s) {
                const double p = std::clamp<double>(out.data[s], p_floor, 1.0 - p_floor);
                const double y = targets[s];
                loss -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
                if (grad) grad->data[s] = static_cast<T>((p - y) / (p * (1.0 - p)) / static_cast<double>(n));
            }
            return loss / static_cast<double>(n);
        }
    }
    return loss;
}

}  // namespace fdl::nn
