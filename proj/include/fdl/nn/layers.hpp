#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fdl/errors.hpp"
#include "fdl/nn/tensor.hpp"
#include "fdl/rng.hpp"

namespace fdl::nn {

enum class LayerKind { Conv, BatchNorm, ReLU, AvgPool, MaxPool, Dropout, Dense, Softmax, Sigmoid };

inline const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Conv: return "conv";
        case LayerKind::BatchNorm: return "batchnorm";
        case LayerKind::ReLU: return "relu";
        case LayerKind::AvgPool: return "avgpool";
        case LayerKind::MaxPool: return "maxpool";
        case LayerKind::Dropout: return "dropout";
        case LayerKind::Dense: return "dense";
        case LayerKind::Softmax: return "softmax";
        case LayerKind::Sigmoid: return "sigmoid";
    }
    return "?";
}

inline LayerKind layer_kind_from_string(const std::string& s) {
    for (auto k : {LayerKind::Conv, LayerKind::BatchNorm, LayerKind::ReLU, LayerKind::AvgPool, LayerKind::MaxPool,
                   LayerKind::Dropout, LayerKind::Dense, LayerKind::Softmax, LayerKind::Sigmoid})
        if (s == to_string(k)) return k;
    throw DataError("unknown layer kind '" + s + "'");
}

/// Declarative layer description. Conv is always 3x3, valid, stride 1; pools
/// are 2x2 stride 2 with floor division.
struct LayerSpec {
    LayerKind kind = LayerKind::ReLU;
    std::size_t units = 0;  // conv filters or dense outputs
    double rate = 0.0;      // dropout
    double eps = 1e-5;      // batch norm
    double momentum = 0.9;  // batch norm running statistics

    static LayerSpec conv(std::size_t filters) { return {LayerKind::Conv, filters}; }
    static LayerSpec batch_norm(double eps = 1e-5, double momentum = 0.9) {
        return {LayerKind::BatchNorm, 0, 0.0, eps, momentum};
    }
    static LayerSpec relu() { return {LayerKind::ReLU}; }
    static LayerSpec avg_pool() { return {LayerKind::AvgPool}; }
    static LayerSpec max_pool() { return {LayerKind::MaxPool}; }
    static LayerSpec dropout(double rate) { return {LayerKind::Dropout, 0, rate}; }
    static LayerSpec dense(std::size_t out) { return {LayerKind::Dense, out}; }
    static LayerSpec softmax() { return {LayerKind::Softmax}; }
    static LayerSpec sigmoid() { return {LayerKind::Sigmoid}; }

    bool operator==(const LayerSpec&) const = default;
};

struct InitSpec {
    enum class Kind { HeUniform, Normal };
    Kind kind = Kind::HeUniform;
    double sd = 0.01;  // Normal only

    static InitSpec he_uniform() { return {}; }
    static InitSpec normal(double sd) { return {Kind::Normal, sd}; }
};

template <class T>
class Layer {
public:
    explicit Layer(LayerSpec spec) : spec_(spec) {}
    virtual ~Layer() = default;

    virtual std::unique_ptr<Layer> clone() const = 0;

    /// Throws ArgumentError naming the layer when the input does not fit.
    virtual Shape output_shape(Shape in) const = 0;

    /// Overwrites out. In training mode caches whatever backward needs.
    virtual void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng& rng) = 0;

    /// Accumulates parameter gradients and overwrites grad_in.
    virtual void backward(const Tensor<T>& grad_out, Tensor<T>& grad_in) = 0;

    virtual void init(Rng&, const InitSpec&) {}
    virtual std::span<T> params() { return {}; }
    virtual std::span<T> grads() { return {}; }
    /// Non-trainable persistent state (batch-norm running statistics).
    virtual std::span<T> buffers() { return {}; }

    const LayerSpec& spec() const noexcept { return spec_; }
    std::string name() const { return to_string(spec_.kind); }

protected:
    void require_cache() const {
        if (!cached_) throw StateError(name() + ": backward called without a training-mode forward");
    }
    [[noreturn]] void shape_error(Shape in, const char* why) const {
        throw ArgumentError(name() + " layer: input " + in.str() + " " + why);
    }

    LayerSpec spec_;
    Shape in_shape_;
    bool cached_ = false;
};

// ---------------------------------------------------------------------------

/// 3x3 valid convolution. Weights stored [ky][kx][c_in][filter], then bias.
template <class T>
class Conv3x3 : public Layer<T> {
public:
    explicit Conv3x3(LayerSpec s, std::size_t in_channels)
        : Layer<T>(s), cin_(in_channels), patch_(9 * in_channels),
          params_(patch_ * s.units + s.units, T(0)), grads_(params_.size(), T(0)) {}

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv3x3>(*this); }

    Shape output_shape(Shape in) const override {
        if (in.c != cin_) this->shape_error(in, "has wrong channel count");
        if (in.h < 3 || in.w < 3) this->shape_error(in, "is smaller than the 3x3 kernel");
        return {in.h - 2, in.w - 2, this->spec_.units};
    }

    void init(Rng& rng, const InitSpec& init) override {
        const std::size_t f = this->spec_.units;
        const double limit = std::sqrt(6.0 / static_cast<double>(patch_));
        for (std::size_t i = 0; i < patch_ * f; ++i)
            params_[i] = static_cast<T>(init.kind == InitSpec::Kind::Normal ? rng.normal(0.0, init.sd)
                                                                            : rng.uniform(-limit, limit));
        std::fill(params_.begin() + patch_ * f, params_.end(), T(0));
    }

    void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng&) override {
        const Shape os = output_shape(in.shape);
        this->in_shape_ = in.shape;
        const std::size_t f = os.c, positions = os.h * os.w;
        out.resize(in.n, os);
        cols_.resize(in.n * positions * patch_);
        const T* w = params_.data();
        const T* b = params_.data() + patch_ * f;
        for (std::size_t s = 0; s < in.n; ++s) {
            const T* x = in.data.data() + s * in.shape.size();
            T* col = cols_.data() + s * positions * patch_;
            for (std::size_t oy = 0; oy < os.h; ++oy)
                for (std::size_t ox = 0; ox < os.w; ++ox) {
                    T* c = col + (oy * os.w + ox) * patch_;
                    for (std::size_t ky = 0; ky < 3; ++ky) {
                        const T* row = x + ((oy + ky) * in.shape.w + ox) * cin_;
                        std::copy(row, row + 3 * cin_, c + ky * 3 * cin_);
                    }
                }
            T* y = out.data.data() + s * os.size();
            for (std::size_t p = 0; p < positions; ++p) {
                T* yp = y + p * f;
                std::copy(b, b + f, yp);
                const T* c = col + p * patch_;
                for (std::size_t k = 0; k < patch_; ++k) {
                    const T v = c[k];
                    const T* wk = w + k * f;
                    for (std::size_t q = 0; q < f; ++q) yp[q] += v * wk[q];
                }
            }
        }
        this->cached_ = training;
    }

    void backward(const Tensor<T>& gout, Tensor<T>& gin) override {
        this->require_cache();
        const Shape is = this->in_shape_;
        const Shape os = gout.shape;
        const std::size_t f = os.c, positions = os.h * os.w;
        gin.resize(gout.n, is);
        gin.zero();
        T* dw = grads_.data();
        T* db = grads_.data() + patch_ * f;
        const T* w = params_.data();
        std::vector<T> dcol(patch_);
        for (std::size_t s = 0; s < gout.n; ++s) {
            const T* g = gout.data.data() + s * os.size();
            const T* col = cols_.data() + s * positions * patch_;
            T* dx = gin.data.data() + s * is.size();
            for (std::size_t p = 0; p < positions; ++p) {
                const T* gp = g + p * f;
                const T* c = col + p * patch_;
                for (std::size_t q = 0; q < f; ++q) db[q] += gp[q];
                for (std::size_t k = 0; k < patch_; ++k) {
                    const T v = c[k];
                    T* dwk = dw + k * f;
                    const T* wk = w + k * f;
                    T acc = T(0);
                    for (std::size_t q = 0; q < f; ++q) {
                        dwk[q] += v * gp[q];
                        acc += wk[q] * gp[q];
                    }
                    dcol[k] = acc;
                }
                const std::size_t oy = p / os.w, ox = p % os.w;
                for (std::size_t ky = 0; ky < 3; ++ky) {
                    T* row = dx + ((oy + ky) * is.w + ox) * cin_;
                    const T* d = dcol.data() + ky * 3 * cin_;
                    for (std::size_t k = 0; k < 3 * cin_; ++k) row[k] += d[k];
                }
            }
        }
    }

    std::span<T> params() override { return params_; }
    std::span<T> grads() override { return grads_; }

private:
    std::size_t cin_;
    std::size_t patch_;
    std::vector<T> params_;
    std::vector<T> grads_;
    std::vector<T> cols_;
};

// ---------------------------------------------------------------------------

/// Per-channel batch normalization over batch and spatial positions.
/// Params: gamma[c], beta[c]. Buffers: running_mean[c], running_var[c]
/// updated as r = momentum r + (1 - momentum) batch_stat, with the biased
/// batch variance.
template <class T>
class BatchNorm : public Layer<T> {
public:
    BatchNorm(LayerSpec s, std::size_t channels)
        : Layer<T>(s), c_(channels), params_(2 * channels), grads_(2 * channels, T(0)), buffers_(2 * channels) {
        std::fill(params_.begin(), params_.begin() + c_, T(1));
        std::fill(params_.begin() + c_, params_.end(), T(0));
        std::fill(buffers_.begin(), buffers_.begin() + c_, T(0));
        std::fill(buffers_.begin() + c_, buffers_.end(), T(1));
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<BatchNorm>(*this); }

    Shape output_shape(Shape in) const override {
        if (in.c != c_) this->shape_error(in, "has wrong channel count");
        return in;
    }

    void init(Rng&, const InitSpec&) override {
        std::fill(params_.begin(), params_.begin() + c_, T(1));
        std::fill(params_.begin() + c_, params_.end(), T(0));
        std::fill(buffers_.begin(), buffers_.begin() + c_, T(0));
        std::fill(buffers_.begin() + c_, buffers_.end(), T(1));
    }

    void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng&) override {
        output_shape(in.shape);
        this->in_shape_ = in.shape;
        out.resize(in.n, in.shape);
        const std::size_t count = in.data.size() / c_;
        const T* gamma = params_.data();
        const T* beta = params_.data() + c_;
        T* rmean = buffers_.data();
        T* rvar = buffers_.data() + c_;
        std::vector<double> mean(c_, 0.0), var(c_, 0.0);
        if (training) {
            for (std::size_t i = 0; i < in.data.size(); ++i) mean[i % c_] += in.data[i];
            for (auto& m : mean) m /= static_cast<double>(count);
            for (std::size_t i = 0; i < in.data.size(); ++i) {
                const double d = in.data[i] - mean[i % c_];
                var[i % c_] += d * d;
            }
            for (auto& v : var) v /= static_cast<double>(count);
            const double mom = this->spec_.momentum;
            for (std::size_t c = 0; c < c_; ++c) {
                rmean[c] = static_cast<T>(mom * rmean[c] + (1.0 - mom) * mean[c]);
                rvar[c] = static_cast<T>(mom * rvar[c] + (1.0 - mom) * var[c]);
            }
        } else {
            for (std::size_t c = 0; c < c_; ++c) {
                mean[c] = rmean[c];
                var[c] = rvar[c];
            }
        }
        inv_std_.resize(c_);
        for (std::size_t c = 0; c < c_; ++c) inv_std_[c] = static_cast<T>(1.0 / std::sqrt(var[c] + this->spec_.eps));
        if (training) xhat_.resize(in.data.size());
        for (std::size_t i = 0; i < in.data.size(); ++i) {
            const std::size_t c = i % c_;
            const T xh = static_cast<T>((in.data[i] - mean[c]) * inv_std_[c]);
            if (training) xhat_[i] = xh;
            out.data[i] = gamma[c] * xh + beta[c];
        }
        this->cached_ = training;
    }

    void backward(const Tensor<T>& gout, Tensor<T>& gin) override {
        this->require_cache();
        gin.resize(gout.n, gout.shape);
        const std::size_t count = gout.data.size() / c_;
        const T* gamma = params_.data();
        T* dgamma = grads_.data();
        T* dbeta = grads_.data() + c_;
        std::vector<double> sum_g(c_, 0.0), sum_gx(c_, 0.0);
        for (std::size_t i = 0; i < gout.data.size(); ++i) {
            const std::size_t c = i % c_;
            sum_g[c] += gout.data[i];
            sum_gx[c] += gout.data[i] * xhat_[i];
        }
        for (std::size_t c = 0; c < c_; ++c) {
            dgamma[c] += static_cast<T>(sum_gx[c]);
            dbeta[c] += static_cast<T>(sum_g[c]);
        }
        const double inv_count = 1.0 / static_cast<double>(count);
        for (std::size_t i = 0; i < gout.data.size(); ++i) {
            const std::size_t c = i % c_;
            const double dxhat_mean = sum_g[c] * inv_count;
            const double dxhat_x_mean = sum_gx[c] * inv_count;
            gin.data[i] = static_cast<T>(gamma[c] * inv_std_[c] *
                                         (gout.data[i] - dxhat_mean - xhat_[i] * dxhat_x_mean));
        }
    }

    std::span<T> params() override { return params_; }
    std::span<T> grads() override { return grads_; }
    std::span<T> buffers() override { return buffers_; }

private:
    std::size_t c_;
    std::vector<T> params_;
    std::vector<T> grads_;
    std::vector<T> buffers_;
    std::vector<T> xhat_;
    std::vector<T> inv_std_;
};

// ---------------------------------------------------------------------------

template <class T>
class ReLU : public Layer<T> {
public:
    using Layer<T>::Layer;
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<ReLU>(*this); }
    Shape output_shape(Shape in) const override { return in; }

    void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng&) override {
        out.resize(in.n, in.shape);
        for (std::size_t i = 0; i < in.data.size(); ++i) out.data[i] = in.data[i] < T(0) ? T(0) : in.data[i];  // NaN passes through
        if (training) mask_.assign(in.data.begin(), in.data.end());
        this->cached_ = training;
    }

    void backward(const Tensor<T>& gout, Tensor<T>& gin) override {
        this->require_cache();
        gin.resize(gout.n, gout.shape);
        for (std::size_t i = 0; i < gout.data.size(); ++i) gin.data[i] = mask_[i] > T(0) ? gout.data[i] : T(0);
    }

private:
    std::vector<T> mask_;  // forward input
};

// ---------------------------------------------------------------------------

/// 2x2 stride-2 pooling; odd trailing rows/columns are dropped.
template <class T, bool Max>
class Pool2 : public Layer<T> {
public:
    using Layer<T>::Layer;
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Pool2>(*this); }

    Shape output_shape(Shape in) const override {
        if (in.h < 2 || in.w < 2) this->shape_error(in, "is smaller than the 2x2 pool");
        return {in.h / 2, in.w / 2, in.c};
    }

    void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng&) override {
        const Shape os = output_shape(in.shape);
        const Shape is = in.shape;
        this->in_shape_ = is;
        out.resize(in.n, os);
        if (Max) argmax_.resize(out.data.size());
        for (std::size_t s = 0; s < in.n; ++s) {
            const T* x = in.data.data() + s * is.size();
            T* y = out.data.data() + s * os.size();
            for (std::size_t oy = 0; oy < os.h; ++oy)
                for (std::size_t ox = 0; ox < os.w; ++ox)
                    for (std::size_t c = 0; c < is.c; ++c) {
                        const std::size_t i00 = ((2 * oy) * is.w + 2 * ox) * is.c + c;
                        const std::size_t idx[4] = {i00, i00 + is.c, i00 + is.w * is.c, i00 + is.w * is.c + is.c};
                        const std::size_t o = (oy * os.w + ox) * os.c + c;
                        if constexpr (Max) {
                            std::size_t best = idx[0];
                            for (int k = 1; k < 4; ++k)
                                if (x[idx[k]] > x[best]) best = idx[k];
                            y[o] = x[best];
                            argmax_[s * os.size() + o] = best;
                        } else {
                            y[o] = (x[idx[0]] + x[idx[1]] + x[idx[2]] + x[idx[3]]) * T(0.25);
                        }
                    }
        }
        this->cached_ = training;
    }

    void backward(const Tensor<T>& gout, Tensor<T>& gin) override {
        this->require_cache();
        const Shape is = this->in_shape_;
        const Shape os = gout.shape;
        gin.resize(gout.n, is);
        gin.zero();
        for (std::size_t s = 0; s < gout.n; ++s) {
            const T* g = gout.data.data() + s * os.size();
            T* dx = gin.data.data() + s * is.size();
            for (std::size_t oy = 0; oy < os.h; ++oy)
                for (std::size_t ox = 0; ox < os.w; ++ox)
                    for (std::size_t c = 0; c < is.c; ++c) {
                        const std::size_t o = (oy * os.w + ox) * os.c + c;
                        if constexpr (Max) {
                            dx[argmax_[s * os.size() + o]] += g[o];
                        } else {
                            const std::size_t i00 = ((2 * oy) * is.w + 2 * ox) * is.c + c;
                            const T q = g[o] * T(0.25);
                            dx[i00] += q;
                            dx[i00 + is.c] += q;
                            dx[i00 + is.w * is.c] += q;
                            dx[i00 + is.w * is.c + is.c] += q;
                        }
                    }
        }
    }

private:
    std::vector<std::size_t> argmax_;
};

// ---------------------------------------------------------------------------

/// Inverted dropout: kept activations scaled by 1/(1-rate) in training,
/// identity at inference.
template <class T>
class Dropout : public Layer<T> {
public:
    explicit Dropout(LayerSpec s) : Layer<T>(s) {
        if (!(s.rate >= 0.0 && s.rate < 1.0)) throw ArgumentError("dropout rate must be in [0, 1)");
    }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dropout>(*this); }
    Shape output_shape(Shape in) const override { return in; }

    void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng& rng) override {
        out.resize(in.n, in.shape);
        if (!training || this->spec_.rate == 0.0) {
            std::copy(in.data.begin(), in.data.end(), out.data.begin());
            mask_.assign(in.data.size(), T(1));
        } else {
            const T keep_scale = static_cast<T>(1.0 / (1.0 - this->spec_.rate));
            mask_.resize(in.data.size());
            for (std::size_t i = 0; i < in.data.size(); ++i) {
                mask_[i] = rng.uniform() < this->spec_.rate ? T(0) : keep_scale;
                out.data[i] = in.data[i] * mask_[i];
            }
        }
        this->cached_ = training;
    }

    void backward(const Tensor<T>& gout, Tensor<T>& gin) override {
        this->require_cache();
        gin.resize(gout.n, gout.shape);
        for (std::size_t i = 0; i < gout.data.size(); ++i) gin.data[i] = gout.data[i] * mask_[i];
    }

private:
    std::vector<T> mask_;
};

// ---------------------------------------------------------------------------

/// Fully connected on the flattened sample. Weights stored [in][out], then bias.
template <class T>
class Dense : public Layer<T> {
public:
    Dense(LayerSpec s, std::size_t in_size)
        : Layer<T>(s), in_(in_size), out_(s.units), params_(in_size * s.units + s.units, T(0)),
          grads_(params_.size(), T(0)) {}

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dense>(*this); }

    Shape output_shape(Shape in) const override {
        if (in.size() != in_) this->shape_error(in, ("does not flatten to " + std::to_string(in_)).c_str());
        return {1, 1, out_};
    }

    void init(Rng& rng, const InitSpec& init) override {
        const double limit = std::sqrt(6.0 / static_cast<double>(in_));
        for (std::size_t i = 0; i < in_ * out_; ++i)
            params_[i] = static_cast<T>(init.kind == InitSpec::Kind::Normal ? rng.normal(0.0, init.sd)
                                                                            : rng.uniform(-limit, limit));
        std::fill(params_.begin() + in_ * out_, params_.end(), T(0));
    }

    void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng&) override {
        const Shape os = output_shape(in.shape);
        this->in_shape_ = in.shape;
        out.resize(in.n, os);
        const T* w = params_.data();
        const T* b = params_.data() + in_ * out_;
        for (std::size_t s = 0; s < in.n; ++s) {
            const T* x = in.data.data() + s * in_;
            T* y = out.data.data() + s * out_;
            std::copy(b, b + out_, y);
            for (std::size_t i = 0; i < in_; ++i) {
                const T v = x[i];
                if (v == T(0)) continue;
                const T* wi = w + i * out_;
                for (std::size_t o = 0; o < out_; ++o) y[o] += v * wi[o];
            }
        }
        if (training) input_.assign(in.data.begin(), in.data.end());
        this->cached_ = training;
    }

    void backward(const Tensor<T>& gout, Tensor<T>& gin) override {
        this->require_cache();
        gin.resize(gout.n, this->in_shape_);
        const T* w = params_.data();
        T* dw = grads_.data();
        T* db = grads_.data() + in_ * out_;
        for (std::size_t s = 0; s < gout.n; ++s) {
            const T* g = gout.data.data() + s * out_;
            const T* x = input_.data() + s * in_;
            T* dx = gin.data.data() + s * in_;
            for (std::size_t o = 0; o < out_; ++o) db[o] += g[o];
            for (std::size_t i = 0; i < in_; ++i) {
                const T v = x[i];
                const T* wi = w + i * out_;
                T* dwi = dw + i * out_;
                T acc = T(0);
                for (std::size_t o = 0; o < out_; ++o) {
                    dwi[o] += v * g[o];
                    acc += wi[o] * g[o];
                }
                dx[i] = acc;
            }
        }
    }

    std::span<T> params() override { return params_; }
    std::span<T> grads() override { return grads_; }

private:
    std::size_t in_;
    std::size_t out_;
    std::vector<T> params_;
    std::vector<T> grads_;
    std::vector<T> input_;
};

// ---------------------------------------------------------------------------

template <class T>
class Softmax : public Layer<T> {
public:
    using Layer<T>::Layer;
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Softmax>(*this); }
    Shape output_shape(Shape in) const override { return {1, 1, in.size()}; }

    void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng&) override {
        const Shape os = output_shape(in.shape);
        out.resize(in.n, os);
        const std::size_t k = os.c;
        for (std::size_t s = 0; s < in.n; ++s) {
            const T* x = in.data.data() + s * k;
            T* y = out.data.data() + s * k;
            const T mx = *std::max_element(x, x + k);
            double sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) sum += std::exp(static_cast<double>(x[i] - mx));
            for (std::size_t i = 0; i < k; ++i) y[i] = static_cast<T>(std::exp(static_cast<double>(x[i] - mx)) / sum);
        }
        this->in_shape_ = in.shape;
        if (training) output_.assign(out.data.begin(), out.data.end());
        this->cached_ = training;
    }

    void backward(const Tensor<T>& gout, Tensor<T>& gin) override {
        this->require_cache();
        gin.resize(gout.n, this->in_shape_);
        const std::size_t k = gout.shape.size();
        for (std::size_t s = 0; s < gout.n; ++s) {
            const T* g = gout.data.data() + s * k;
            const T* p = output_.data() + s * k;
            double dot = 0.0;
            for (std::size_t i = 0; i < k; ++i) dot += static_cast<double>(g[i]) * p[i];
            for (std::size_t i = 0; i < k; ++i) gin.data[s * k + i] = static_cast<T>(p[i] * (g[i] - dot));
        }
    }

private:
    std::vector<T> output_;
};

template <class T>
class Sigmoid : public Layer<T> {
public:
    using Layer<T>::Layer;
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Sigmoid>(*this); }
    Shape output_shape(Shape in) const override { return in; }

    void forward(const Tensor<T>& in, Tensor<T>& out, bool training, Rng&) override {
        out.resize(in.n, in.shape);
        for (std::size_t i = 0; i < in.data.size(); ++i)
            out.data[i] = static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(in.data[i]))));
        if (training) output_.assign(out.data.begin(), out.data.end());
        this->cached_ = training;
    }

    void backward(const Tensor<T>& gout, Tensor<T>& gin) override {
        this->require_cache();
        gin.resize(gout.n, gout.shape);
        for (std::size_t i = 0; i < gout.data.size(); ++i)
            gin.data[i] = gout.data[i] * output_[i] * (T(1) - output_[i]);
    }

private:
    std::vector<T> output_;
};

/// Instantiates the layer for a given input shape.
template <class T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& s, Shape in) {
    switch (s.kind) {
        case LayerKind::Conv:
            if (s.units == 0) throw ArgumentError("conv layer needs at least one filter");
            return std::make_unique<Conv3x3<T>>(s, in.c);
        case LayerKind::BatchNorm: return std::make_unique<BatchNorm<T>>(s, in.c);
        case LayerKind::ReLU: return std::make_unique<ReLU<T>>(s);
        case LayerKind::AvgPool: return std::make_unique<Pool2<T, false>>(s);
        case LayerKind::MaxPool: return std::make_unique<Pool2<T, true>>(s);
        case LayerKind::Dropout: return std::make_unique<Dropout<T>>(s);
        case LayerKind::Dense:
            if (s.units == 0) throw ArgumentError("dense layer needs at least one output");
            return std::make_unique<Dense<T>>(s, in.size());
        case LayerKind::Softmax: return std::make_unique<Softmax<T>>(s);
        case LayerKind::Sigmoid: return std::make_unique<Sigmoid<T>>(s);
    }
    throw ArgumentError("unknown layer kind");
}

}  // namespace fdl::nn
