#pragma once

// Classical reference algorithms: Rosenstein and Benettin largest-Lyapunov
// estimators, prominence-based peak metrics, dissolution f1/f2 factors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "fdl/curve.hpp"
#include "fdl/errors.hpp"
#include "fdl/ode.hpp"
#include "fdl/systems.hpp"

namespace fdl {

// ---------------------------------------------------------------------------
// Rosenstein

struct RosensteinConfig {
    std::size_t embed_dim = 3;
    std::size_t delay = 1;
    /// Minimum temporal separation of neighbours, in samples. Unset: first
    /// zero crossing of the autocorrelation (the mean period), capped so that
    /// enough candidate pairs survive.
    std::optional<std::size_t> exclusion;
    /// Length of the mean log-divergence curve. Unset: a quarter of the
    /// embedded length.
    std::optional<std::size_t> horizon;
    /// Fit window [begin, end) on the divergence curve. Unset: the first
    /// fit_fraction of it.
    std::optional<std::size_t> fit_begin;
    std::optional<std::size_t> fit_end;
    double fit_fraction = 0.2;
    double sample_dt = 1.0;
};

struct RosensteinResult {
    double lambda = 0.0;  // per unit time
    bool degenerate = false;
    std::size_t exclusion = 0;
    std::vector<double> divergence;  // mean ln d(k), NaN where no pair was valid
};

/// First lag at which the autocorrelation of the mean-removed series is <= 0.
inline std::size_t autocorrelation_zero_crossing(std::span<const double> x) {
    const std::size_t n = x.size();
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    for (std::size_t lag = 1; lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) acc += (x[i] - mean) * (x[i + lag] - mean);
        if (acc <= 0.0) return lag;
    }
    return n;
}

/// Least-squares slope of ys against xs.
inline double ls_slope(std::span<const double> xs, std::span<const double> ys) {
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

/// Largest Lyapunov exponent of a scalar series by delay embedding and the
/// mean log divergence of nearest neighbours.
inline RosensteinResult rosenstein_lle(std::span<const double> series, const RosensteinConfig& cfg = {}) {
    if (cfg.embed_dim < 1 || cfg.delay < 1) throw ArgumentError("rosenstein: embed_dim and delay must be >= 1");
    if (!(cfg.sample_dt > 0.0)) throw ArgumentError("rosenstein: sample_dt must be > 0");
    const std::size_t n = series.size();
    const std::size_t span = (cfg.embed_dim - 1) * cfg.delay;
    if (n < span + 8) throw ArgumentError("rosenstein: series too short for the embedding");
    const std::size_t m = n - span;  // embedded points

    RosensteinResult res;
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    const double scale = std::max({std::abs(*lo), std::abs(*hi), 1e-300});
    if (*hi - *lo <= 1e-12 * scale) {
        res.degenerate = true;
        return res;
    }

    const std::size_t horizon = cfg.horizon.value_or(std::max<std::size_t>(4, m / 4));
    std::size_t excl = cfg.exclusion.value_or(autocorrelation_zero_crossing(series));
    if (!cfg.exclusion) excl = std::min(excl, m / 4);
    res.exclusion = excl;
    if (horizon < 2 || horizon >= m) throw ArgumentError("rosenstein: horizon does not fit the series");
    if (excl + horizon >= m) throw ArgumentError("rosenstein: series too short for exclusion + horizon");

    // Embedded vectors, point-major.
    const std::size_t dim = cfg.embed_dim;
    std::vector<double> emb(m * dim);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t d = 0; d < dim; ++d) emb[i * dim + d] = series[i + d * cfg.delay];
    auto dist2 = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double q = emb[a * dim + d] - emb[b * dim + d];
            s += q * q;
        }
        return s;
    };

    // Nearest neighbour of every point that can be followed for at least one step.
    std::vector<std::size_t> nn(m, m);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j + 1 < m; ++j) {
            const std::size_t sep = i > j ? i - j : j - i;
            if (sep <= excl) continue;
            const double d = dist2(i, j);
            if (d > 0.0 && d < best) {
                best = d;
                nn[i] = j;
            }
        }
    }

    res.divergence.assign(horizon, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < horizon; ++k) {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i + k < m; ++i) {
            const std::size_t j = nn[i];
            if (j == m || j + k >= m) continue;
            const double d = dist2(i + k, j + k);
            if (d > 0.0) {
                acc += 0.5 * std::log(d);
                ++count;
            }
        }
        if (count > 0) res.divergence[k] = acc / static_cast<double>(count);
    }

    const std::size_t fb = cfg.fit_begin.value_or(0);
    std::size_t fe = cfg.fit_end.value_or(
        std::max<std::size_t>(fb + 2, static_cast<std::size_t>(std::lround(cfg.fit_fraction * horizon))));
    fe = std::min(fe, horizon);
    std::vector<double> tk, yk;
    for (std::size_t k = fb; k < fe; ++k) {
        if (std::isfinite(res.divergence[k])) {
            tk.push_back(static_cast<double>(k) * cfg.sample_dt);
            yk.push_back(res.divergence[k]);
        }
    }
    if (tk.size() < 2) {
        res.degenerate = true;
        return res;
    }
    res.lambda = ls_slope(tk, yk);
    return res;
}

// ---------------------------------------------------------------------------
// Benettin

struct BenettinOptions {
    double t_total = 200.0;
    double renorm_interval = 1.0;
    double transient = 0.0;  // integrated before tangent tracking starts
    OdeOptions ode{1e-9, 1e-11};
};

/// Largest Lyapunov exponent of x' = f(x) from the growth of one tangent vector
/// integrated alongside the trajectory and renormalized every interval.
/// jac(x) returns the row-major N*N Jacobian.
template <std::size_t N, class F, class J>
double benettin_lle(F&& f, J&& jac, State<N> x0, const BenettinOptions& opt = {}) {
    if (!(opt.t_total > 0.0) || !(opt.renorm_interval > 0.0))
        throw ArgumentError("benettin: t_total and renorm_interval must be > 0");
    if (opt.transient > 0.0) x0 = integrate_to<N>([&](double t, const State<N>& s) { return f(t, s); }, x0, 0.0,
                                                 opt.transient, opt.ode);

    auto aug = [&](double t, const State<2 * N>& s) {
        State<N> x;
        std::copy_n(s.begin(), N, x.begin());
        const State<N> fx = f(t, x);
        const auto a = jac(x);
        State<2 * N> out;
        for (std::size_t i = 0; i < N; ++i) {
            out[i] = fx[i];
            double acc = 0.0;
            for (std::size_t k = 0; k < N; ++k) acc += a[i * N + k] * s[N + k];
            out[N + i] = acc;
        }
        return out;
    };

    State<2 * N> s{};
    std::copy(x0.begin(), x0.end(), s.begin());
    for (std::size_t i = 0; i < N; ++i) s[N + i] = 1.0 / std::sqrt(static_cast<double>(N));

    const auto steps = static_cast<std::size_t>(std::ceil(opt.t_total / opt.renorm_interval - 1e-9));
    double log_sum = 0.0;
    double t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double dt = std::min(opt.renorm_interval, opt.t_total - t);
        s = integrate_to<2 * N>(aug, s, t, t + dt, opt.ode);
        t += dt;
        double norm = 0.0;
        for (std::size_t i = 0; i < N; ++i) norm += s[N + i] * s[N + i];
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("benettin: tangent vector collapsed");
        log_sum += std::log(norm);
        for (std::size_t i = 0; i < N; ++i) s[N + i] /= norm;
    }
    return log_sum / t;
}

inline double benettin_lle(const LorenzSpec& spec, double t_total, double renorm_interval,
                           double transient = 0.0) {
    BenettinOptions opt;
    opt.t_total = t_total;
    opt.renorm_interval = renorm_interval;
    opt.transient = transient;
    return benettin_lle<3>(spec, [&](const State<3>& x) { return spec.jacobian(x); }, spec.init, opt);
}

// ---------------------------------------------------------------------------
// Peaks

struct Peak {
    std::size_t index = 0;
    double height = 0.0;
    double prominence = 0.0;
    double width = 0.0;  // at half prominence, x units
};

struct PeakMetrics {
    std::size_t count = 0;
    std::optional<double> max_height;
    std::optional<double> half_prom_width;
    std::vector<Peak> peaks;
};

/// Interior local maxima (flat tops allowed) with topographic prominence and the width at
/// half prominence (linear interpolation between samples).
inline PeakMetrics peak_metrics(const Curve& curve) {
    const auto& y = curve.ys();
    const std::size_t n = y.size();
    const double dx = (curve.xs().back() - curve.xs().front()) / static_cast<double>(n - 1);
    PeakMetrics out;
    for (std::size_t q = 1; q + 1 < n; ++q) {
        if (!(y[q - 1] < y[q])) continue;
        // A flat top (equal samples) counts once, at its middle sample.
        std::size_t e = q;
        while (e + 1 < n && y[e + 1] == y[q]) ++e;
        if (e + 1 >= n || !(y[e + 1] < y[q])) continue;
        const std::size_t p = (q + e) / 2;
        q = e;
        Peak pk;
        pk.index = p;
        pk.height = y[p];

        // Walk outwards until terrain exceeds the peak or the domain ends.
        std::size_t left_base = p, right_base = p;
        double left_min = y[p], right_min = y[p];
        for (std::size_t i = p + 1; i-- > 0;) {
            if (y[i] > y[p]) break;
            if (y[i] < left_min) {
                left_min = y[i];
                left_base = i;
            }
        }
        for (std::size_t i = p; i < n; ++i) {
            if (y[i] > y[p]) break;
            if (y[i] < right_min) {
                right_min = y[i];
                right_base = i;
            }
        }
        pk.prominence = y[p] - std::max(left_min, right_min);

        const double h = y[p] - 0.5 * pk.prominence;
        std::size_t i = p;
        while (left_base < i && h < y[i]) --i;
        double left_ip = static_cast<double>(i);
        if (y[i] < h) left_ip += (h - y[i]) / (y[i + 1] - y[i]);
        i = p;
        while (i < right_base && h < y[i]) ++i;
        double right_ip = static_cast<double>(i);
        if (y[i] < h) right_ip -= (h - y[i]) / (y[i - 1] - y[i]);
        pk.width = (right_ip - left_ip) * dx;
        out.peaks.push_back(pk);
    }
    out.count = out.peaks.size();
    if (out.count > 0) {
        const auto best = std::max_element(out.peaks.begin(), out.peaks.end(),
                                           [](const Peak& a, const Peak& b) { return a.height < b.height; });
        out.max_height = best->height;
        out.half_prom_width = best->width;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dissolution profile comparison

struct SimilarityScores {
    double f1 = 0.0;  // difference factor, percent
    double f2 = 0.0;  // similarity factor
    bool similar() const { return f1 >= 0.0 && f1 <= 15.0 && f2 >= 50.0 && f2 <= 100.0; }
};

inline SimilarityScores f1_f2(std::span<const double> r, std::span<const double> s) {
    if (r.size() != s.size() || r.empty()) throw ArgumentError("f1_f2: profiles must have equal nonzero length");
    double abs_diff = 0.0, sum_r = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double d = r[i] - s[i];
        abs_diff += std::abs(d);
        sum_r += r[i];
        sq += d * d;
    }
    if (sum_r == 0.0) throw ArgumentError("f1_f2: reference profile sums to zero, f1 undefined");
    SimilarityScores out;
    out.f1 = abs_diff / sum_r * 100.0;
    out.f2 = 50.0 * std::log10(100.0 / std::sqrt(1.0 + sq / static_cast<double>(r.size())));
    return out;
}

}  // namespace fdl
