#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fdl/errors.hpp"
#include "fdl/nn/layers.hpp"
#include "fdl/nn/tensor.hpp"
#include "fdl/rng.hpp"

namespace fdl::nn {

/// Sequential stack of layers. Owns parameters, running statistics, cached
/// activations of the last training-mode forward, and the dropout stream.
template <class T>
class Network {
public:
    Network(std::vector<LayerSpec> specs, Shape input, InitSpec init = {}, std::uint64_t seed = 0)
        : specs_(std::move(specs)), input_(input), init_(init), dropout_rng_(mix_seed(seed, 13)) {
        Shape s = input_;
        for (const auto& spec : specs_) {
            layers_.push_back(make_layer<T>(spec, s));
            s = layers_.back()->output_shape(s);
            shapes_.push_back(s);
        }
        if (layers_.empty()) throw ArgumentError("network needs at least one layer");
        reinitialize(seed);
    }

    Network(const Network& o)
        : specs_(o.specs_), input_(o.input_), init_(o.init_), shapes_(o.shapes_), dropout_rng_(o.dropout_rng_) {
        for (const auto& l : o.layers_) layers_.push_back(l->clone());
    }
    Network& operator=(const Network& o) {
        if (this != &o) *this = Network(o);
        return *this;
    }
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    void reinitialize(std::uint64_t seed) {
        Rng rng(mix_seed(seed, 11));
        for (auto& l : layers_) l->init(rng, init_);
        dropout_rng_ = Rng(mix_seed(seed, 13));
        acts_.clear();
    }

    const std::vector<LayerSpec>& specs() const noexcept { return specs_; }
    Shape input_shape() const noexcept { return input_; }
    Shape output_shape() const noexcept { return shapes_.back(); }
    /// Output shape after every layer, in order.
    const std::vector<Shape>& shape_chain() const noexcept { return shapes_; }
    const InitSpec& init_spec() const noexcept { return init_; }
    std::size_t layer_count() const noexcept { return layers_.size(); }
    Layer<T>& layer(std::size_t i) { return *layers_[i]; }

    const Tensor<T>& forward(const Tensor<T>& in, bool training) {
        if (!(in.shape == input_))
            throw ArgumentError("network input " + in.shape.str() + " does not match expected " + input_.str());
        acts_.resize(layers_.size());
        const Tensor<T>* cur = &in;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i]->forward(*cur, acts_[i], training, dropout_rng_);
            cur = &acts_[i];
        }
        trained_forward_ = training;
        return acts_.back();
    }

    /// Backpropagates dLoss/dOutput, accumulating into grads(). Returns
    /// dLoss/dInput.
    const Tensor<T>& backward(const Tensor<T>& loss_grad) {
        if (!trained_forward_) throw StateError("network backward called without a training-mode forward");
        const Tensor<T>* g = &loss_grad;
        grad_bufs_.resize(2);
        for (std::size_t i = layers_.size(); i-- > 0;) {
            Tensor<T>& dst = grad_bufs_[i % 2];
            layers_[i]->backward(*g, dst);
            g = &dst;
        }
        return *g;
    }

    void zero_grad() {
        for (auto& l : layers_) {
            auto g = l->grads();
            std::fill(g.begin(), g.end(), T(0));
        }
    }

    std::vector<std::span<T>> param_groups() {
        std::vector<std::span<T>> out;
        for (auto& l : layers_)
            if (!l->params().empty()) out.push_back(l->params());
        return out;
    }
    std::vector<std::span<T>> grad_groups() {
        std::vector<std::span<T>> out;
        for (auto& l : layers_)
            if (!l->params().empty()) out.push_back(l->grads());
        return out;
    }

    std::size_t param_count() {
        std::size_t n = 0;
        for (auto& l : layers_) n += l->params().size();
        return n;
    }

    /// Parameters then buffers of each layer, in layer order.
    std::vector<T> state_vector() {
        std::vector<T> out;
        for (auto& l : layers_) {
            out.insert(out.end(), l->params().begin(), l->params().end());
            out.insert(out.end(), l->buffers().begin(), l->buffers().end());
        }
        return out;
    }

    void load_state_vector(std::span<const T> v) {
        std::size_t need = 0;
        for (auto& l : layers_) need += l->params().size() + l->buffers().size();
        if (v.size() != need)
            throw DataError("parameter stream has " + std::to_string(v.size()) + " values, network needs " +
                            std::to_string(need));
        std::size_t k = 0;
        for (auto& l : layers_) {
            for (auto& p : l->params()) p = v[k++];
            for (auto& b : l->buffers()) b = v[k++];
        }
    }

    /// L2 norm of every parameterised layer, for diagnostics.
    std::string layer_norms() {
        std::string s;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            auto p = layers_[i]->params();
            if (p.empty()) continue;
            double acc = 0.0;
            for (T v : p) acc += static_cast<double>(v) * v;
            s += layers_[i]->name() + "#" + std::to_string(i) + "=" + std::to_string(std::sqrt(acc)) + " ";
        }
        return s;
    }

private:
    std::vector<LayerSpec> specs_;
    Shape input_;
    InitSpec init_;
    std::vector<std::unique_ptr<Layer<T>>> layers_;
    std::vector<Shape> shapes_;
    std::vector<Tensor<T>> acts_;
    std::vector<Tensor<T>> grad_bufs_;
    Rng dropout_rng_;
    bool trained_forward_ = false;
};

}  // namespace fdl::nn
