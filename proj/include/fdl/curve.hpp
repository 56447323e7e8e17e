#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fdl/errors.hpp"
#include "fdl/rng.hpp"

namespace fdl {

enum class Family {
    Custom,
    Exponential,
    Sine,
    Cosine,
    GaussianMixture,
    Monotone,
    Curvature,
    Growth,
    Lorenz,
    Sir,
    Dissolution,
    Drawing,
};

inline const char* to_string(Family f) {
    switch (f) {
        case Family::Custom: return "custom";
        case Family::Exponential: return "exp";
        case Family::Sine: return "sine";
        case Family::Cosine: return "cosine";
        case Family::GaussianMixture: return "gaussmix";
        case Family::Monotone: return "monotone";
        case Family::Curvature: return "curvature";
        case Family::Growth: return "growth";
        case Family::Lorenz: return "lorenz";
        case Family::Sir: return "sir";
        case Family::Dissolution: return "dissolution";
        case Family::Drawing: return "drawing";
    }
    return "custom";
}

inline Family family_from_string(const std::string& s) {
    for (Family f : {Family::Custom, Family::Exponential, Family::Sine, Family::Cosine,
                     Family::GaussianMixture, Family::Monotone, Family::Curvature, Family::Growth,
                     Family::Lorenz, Family::Sir, Family::Dissolution, Family::Drawing}) {
        if (s == to_string(f)) return f;
    }
    throw ArgumentError("unknown curve family '" + s + "'");
}

/// Generator parameters and ground-truth labels travelling with a curve.
struct CurveMeta {
    Family family = Family::Custom;
    std::map<std::string, double> params;
    std::map<std::string, double> labels;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Equidistantly sampled real function. The constructor enforces the sampling
/// invariants, so every Curve in flight is valid.
class Curve {
public:
    Curve(std::vector<double> xs, std::vector<double> ys, CurveMeta meta = {})
        : xs_(std::move(xs)), ys_(std::move(ys)), meta_(std::move(meta)) {
        if (xs_.size() != ys_.size()) throw ArgumentError("curve: xs and ys differ in length");
        if (xs_.size() < 2) throw ArgumentError("curve: need at least 2 samples");
        const double step = (xs_.back() - xs_.front()) / static_cast<double>(xs_.size() - 1);
        if (!(step > 0.0)) throw ArgumentError("curve: xs must be strictly increasing");
        for (std::size_t i = 1; i < xs_.size(); ++i) {
            const double d = xs_[i] - xs_[i - 1];
            if (!(d > 0.0) || std::abs(d - step) > 1e-9 * step + 1e-12 * std::abs(xs_[i])) {
                throw ArgumentError("curve: xs must be equidistant");
            }
        }
    }

    /// n equidistant samples on [x0, x1] with the given ordinates.
    static Curve on_grid(double x0, double x1, std::vector<double> ys, CurveMeta meta = {}) {
        auto xs = grid(x0, x1, ys.size());
        return Curve(std::move(xs), std::move(ys), std::move(meta));
    }

    static std::vector<double> grid(double x0, double x1, std::size_t n) {
        if (n < 2) throw ArgumentError("grid: need at least 2 points");
        std::vector<double> xs(n);
        const double h = (x1 - x0) / static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i) xs[i] = x0 + h * static_cast<double>(i);
        xs.back() = x1;
        return xs;
    }

    const std::vector<double>& xs() const noexcept { return xs_; }
    const std::vector<double>& ys() const noexcept { return ys_; }
    const CurveMeta& meta() const noexcept { return meta_; }
    CurveMeta& meta() noexcept { return meta_; }
    std::size_t size() const noexcept { return ys_.size(); }

    Curve with_ys(std::vector<double> ys) const { return Curve(xs_, std::move(ys), meta_); }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
    CurveMeta meta_;
};

/// Min-Max normalization mode. Global carries corpus-wide bounds.
struct NormalizationMode {
    enum class Kind { Local, Global };
    Kind kind = Kind::Local;
    double global_min = 0.0;
    double global_max = 1.0;

    static NormalizationMode local() { return {}; }
    static NormalizationMode global(double lo, double hi) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
            throw ArgumentError("global normalization requires finite max > min");
        }
        return {Kind::Global, lo, hi};
    }
    bool is_global() const noexcept { return kind == Kind::Global; }
    bool operator==(const NormalizationMode&) const = default;
};

struct NoiseSpec {
    double sigma = 0.0;
};

/// Local: affine map onto [0,1] (constant curves map to 0.5).
/// Global: affine map with the corpus bounds followed by clamping to [0,1].
inline Curve minmax_normalize(const Curve& curve, const NormalizationMode& mode) {
    const auto& ys = curve.ys();
    std::vector<double> out(ys.size());
    if (mode.is_global()) {
        const double span = mode.global_max - mode.global_min;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            out[i] = std::clamp((ys[i] - mode.global_min) / span, 0.0, 1.0);
        }
    } else {
        const auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
        const double mn = *lo;
        const double span = *hi - mn;
        if (span == 0.0) {
            std::fill(out.begin(), out.end(), 0.5);
        } else {
            for (std::size_t i = 0; i < ys.size(); ++i) out[i] = (ys[i] - mn) / span;
        }
    }
    return curve.with_ys(std::move(out));
}

/// ys + sigma * z with z i.i.d. standard normal from Rng(seed).
inline Curve add_noise(const Curve& curve, const NoiseSpec& spec, std::uint64_t seed) {
    if (!(spec.sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
    Curve out = curve;
    out.meta().noise_sigma = spec.sigma;
    if (spec.sigma == 0.0) return out;
    Rng rng(seed);
    std::vector<double> ys = curve.ys();
    for (double& y : ys) y += spec.sigma * rng.normal();
    out = curve.with_ys(std::move(ys));
    out.meta().noise_sigma = spec.sigma;
    return out;
}

/// Linear interpolation onto m equidistant points spanning the same domain.
/// Endpoints are reproduced exactly; m == size() is the identity.
inline Curve resample(const Curve& curve, std::size_t m) {
    if (m < 2) throw ArgumentError("resample: m must be >= 2");
    const auto& ys = curve.ys();
    const std::size_t n = ys.size();
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        // position i*(n-1)/(m-1) split into integer part and fraction
        const std::size_t num = i * (n - 1);
        const std::size_t j = num / (m - 1);
        const std::size_t rem = num % (m - 1);
        if (rem == 0) {
            out[i] = ys[j];
        } else {
            const double t = static_cast<double>(rem) / static_cast<double>(m - 1);
            out[i] = ys[j] + t * (ys[j + 1] - ys[j]);
        }
    }
    return Curve(Curve::grid(curve.xs().front(), curve.xs().back(), m), std::move(out), curve.meta());
}

}  // namespace fdl
