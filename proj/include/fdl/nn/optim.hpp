#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fdl/errors.hpp"

namespace fdl::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam over a fixed list of parameter groups.
template <class T>
class Adam {
public:
    Adam(std::vector<std::span<T>> params, std::vector<std::span<T>> grads, AdamConfig cfg)
        : params_(std::move(params)), grads_(std::move(grads)), cfg_(cfg) {
        if (!(cfg_.lr >= 0.0)) throw ArgumentError("adam: learning rate must be >= 0");
        if (params_.size() != grads_.size()) throw ArgumentError("adam: params/grads group mismatch");
        for (const auto& p : params_) {
            m_.emplace_back(p.size(), 0.0);
            v_.emplace_back(p.size(), 0.0);
        }
    }

    void set_lr(double lr) { cfg_.lr = lr; }
    double lr() const { return cfg_.lr; }

    void step() {
        ++t_;
        const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t g = 0; g < params_.size(); ++g) {
            auto p = params_[g];
            auto d = grads_[g];
            auto& m = m_[g];
            auto& v = v_[g];
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double gi = d[i];
                m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * gi;
                v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * gi * gi;
                const double update = cfg_.lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg_.eps);
                p[i] = static_cast<T>(p[i] - update);
            }
        }
    }

private:
    std::vector<std::span<T>> params_;
    std::vector<std::span<T>> grads_;
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_, v_;
    std::size_t t_ = 0;
};

}  // namespace fdl::nn
