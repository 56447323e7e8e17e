#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fdl/errors.hpp"
#include "fdl/nn/loss.hpp"
#include "fdl/nn/network.hpp"
#include "fdl/nn/optim.hpp"
#include "fdl/nn/tensor.hpp"
#include "fdl/rng.hpp"

namespace fdl::nn {

struct TrainConfig {
    AdamConfig adam;
    std::size_t batch_size = 64;
    std::size_t epochs = 30;
    LossKind loss = LossKind::MSE;
    std::uint64_t seed = 0;
    /// Piecewise-constant schedule: lr *= drop_factor every drop_period epochs
    /// (period 0 disables it).
    double lr_drop_factor = 1.0;
    std::size_t lr_drop_period = 0;
};

struct History {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
};

/// Inputs plus targets: target_width values per sample for MSE, one class
/// index or 0/1 label per sample otherwise.
template <class T>
struct LabeledSet {
    Tensor<T> inputs;
    std::vector<T> targets;
    std::size_t target_width = 1;

    std::size_t size() const noexcept { return inputs.n; }
};

template <class T>
void gather(const Tensor<T>& src, std::span<const std::size_t> idx, Tensor<T>& dst) {
    dst.resize(idx.size(), src.shape);
    const std::size_t k = src.sample_size();
    for (std::size_t b = 0; b < idx.size(); ++b)
        std::copy_n(src.data.begin() + idx[b] * k, k, dst.data.begin() + b * k);
}

template <class T>
void gather_targets(const LabeledSet<T>& set, std::span<const std::size_t> idx, std::vector<T>& dst) {
    const std::size_t w = set.target_width;
    dst.resize(idx.size() * w);
    for (std::size_t b = 0; b < idx.size(); ++b)
        std::copy_n(set.targets.begin() + idx[b] * w, w, dst.begin() + b * w);
}

/// Inference-mode forward over all inputs in chunks.
template <class T>
Tensor<T> predict(Network<T>& net, const Tensor<T>& inputs, std::size_t chunk = 256) {
    Tensor<T> out(inputs.n, net.output_shape());
    Tensor<T> batch;
    std::vector<std::size_t> idx;
    const std::size_t k = net.output_shape().size();
    for (std::size_t start = 0; start < inputs.n; start += chunk) {
        const std::size_t end = std::min(inputs.n, start + chunk);
        idx.resize(end - start);
        std::iota(idx.begin(), idx.end(), start);
        gather(inputs, std::span<const std::size_t>(idx), batch);
        const Tensor<T>& y = net.forward(batch, false);
        std::copy(y.data.begin(), y.data.end(), out.data.begin() + start * k);
    }
    return out;
}

template <class T>
double evaluate_loss(Network<T>& net, const LabeledSet<T>& set, LossKind loss) {
    const Tensor<T> y = predict(net, set.inputs);
    return compute_loss<T>(loss, y, set.targets, nullptr);
}

/// Shuffled mini-batch Adam. Deterministic for a fixed cfg.seed. Throws
/// NumericError on a non-finite loss.
template <class T>
History train(Network<T>& net, const LabeledSet<T>& data, const LabeledSet<T>* val, const TrainConfig& cfg,
              const std::function<void(std::size_t, const History&)>& on_epoch = {}) {
    if (data.size() == 0) throw ArgumentError("train: empty dataset");
    if (cfg.batch_size < 1) throw ArgumentError("train: batch_size must be >= 1");
    if (!(cfg.adam.lr >= 0.0)) throw ArgumentError("train: learning rate must be >= 0");
    Adam<T> opt(net.param_groups(), net.grad_groups(), cfg.adam);
    Rng shuffle_rng(mix_seed(cfg.seed, 12));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Tensor<T> batch, grad;
    std::vector<T> targets;
    History hist;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.lr_drop_period > 0 && epoch > 0 && epoch % cfg.lr_drop_period == 0)
            opt.set_lr(opt.lr() * cfg.lr_drop_factor);
        shuffle_rng.shuffle(std::span<std::size_t>(order));
        double total = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            std::span<const std::size_t> idx(order.data() + start, end - start);
            gather(data.inputs, idx, batch);
            gather_targets(data, idx, targets);
            net.zero_grad();
            const Tensor<T>& y = net.forward(batch, true);
            const double loss = compute_loss<T>(cfg.loss, y, targets, &grad);
            if (!std::isfinite(loss)) {
                throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                   std::to_string(batches) + "; layer norms: " + net.layer_norms());
            }
            net.backward(grad);
            opt.step();
            total += loss;
            ++batches;
        }
        hist.train_loss.push_back(total / static_cast<double>(batches));
        if (val && val->size() > 0) hist.val_loss.push_back(evaluate_loss(net, *val, cfg.loss));
        if (on_epoch) on_epoch(epoch, hist);
    }
    return hist;
}

}  // namespace fdl::nn
