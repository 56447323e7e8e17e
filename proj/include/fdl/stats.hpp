#pragma once

// Evaluation statistics: Pearson r, OLS of predicted on true with t-tests,
// confusion matrices.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "fdl/errors.hpp"

namespace fdl {

/// Regularized incomplete beta I_x(a, b), continued fraction evaluated with
/// the modified Lentz method (relative tolerance 1e-15).
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("incomplete_beta: a and b must be > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // Use the symmetry relation where the fraction converges fastest.
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log1p(-x);
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    double f = 1.0, c = 1.0, d = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const int m = i / 2;
        double num;
        if (i == 0) {
            num = 1.0;
        } else if (i % 2 == 0) {
            num = (m * (b - m) * x) / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        } else {
            num = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        }
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        const double cd = c * d;
        f *= cd;
        if (std::abs(1.0 - cd) < eps) return std::exp(log_front) * (f - 1.0) / a;
    }
    throw NumericError("incomplete_beta: continued fraction did not converge");
}

/// P(T <= t) for Student's t with df degrees of freedom.
inline double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw ArgumentError("student_t_cdf: df must be > 0");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
    return t > 0 ? 1.0 - tail : tail;
}

/// Two-sided p-value of a t statistic.
inline double two_sided_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    return std::min(1.0, incomplete_beta(0.5 * df, 0.5, df / (df + t * t)));
}

inline double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw ArgumentError("pearson: need two equal-length samples");
    const double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// predicted = intercept + slope * true, with H0 intercept = 0 and H0 slope = 1.
struct RegressionReport {
    std::size_t n = 0;
    double r = 0.0;
    double intercept = 0.0;
    double slope = 0.0;
    double se_intercept = 0.0;
    double se_slope = 0.0;
    double p_intercept = 1.0;
    double p_slope = 1.0;
    /// Zero residual variance: p-values are not meaningful.
    bool degenerate = false;
    std::vector<double> truth;
    std::vector<double> predicted;
};

inline RegressionReport regression_report(std::span<const double> truth, std::span<const double> predicted) {
    if (truth.size() != predicted.size()) throw ArgumentError("regression_report: length mismatch");
    if (truth.size() < 3) throw ArgumentError("regression_report: need at least 3 points");
    const std::size_t n = truth.size();
    const double mx = mean(truth), my = mean(predicted);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (truth[i] - mx) * (truth[i] - mx);
        sxy += (truth[i] - mx) * (predicted[i] - my);
    }
    if (sxx == 0.0) throw ArgumentError("regression_report: true values have zero variance");

    RegressionReport rep;
    rep.n = n;
    rep.truth.assign(truth.begin(), truth.end());
    rep.predicted.assign(predicted.begin(), predicted.end());
    rep.r = pearson(truth, predicted);
    rep.slope = sxy / sxx;
    rep.intercept = my - rep.slope * mx;
    double sse = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = predicted[i] - rep.intercept - rep.slope * truth[i];
        sse += e * e;
        syy += (predicted[i] - my) * (predicted[i] - my);
    }
    const double df = static_cast<double>(n - 2);
    if (sse <= 1e-24 * std::max(syy, 1e-300) || sse == 0.0) {
        rep.degenerate = true;
        rep.p_intercept = std::numeric_limits<double>::quiet_NaN();
        rep.p_slope = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    const double s2 = sse / df;
    rep.se_slope = std::sqrt(s2 / sxx);
    rep.se_intercept = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    rep.p_intercept = two_sided_p(rep.intercept / rep.se_intercept, df);
    rep.p_slope = two_sided_p((rep.slope - 1.0) / rep.se_slope, df);
    return rep;
}

/// counts[true][predicted].
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> counts;
    double accuracy = 0.0;

    std::size_t total() const {
        std::size_t t = 0;
        for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
        return t;
    }
    std::size_t trace() const {
        std::size_t t = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
        return t;
    }
};

inline ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted,
                                 std::vector<std::string> labels) {
    if (truth.size() != predicted.size()) throw ArgumentError("confusion: length mismatch");
    const std::size_t k = labels.size();
    ConfusionMatrix cm;
    cm.labels = std::move(labels);
    cm.counts.assign(k, std::vector<std::size_t>(k, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || predicted[i] < 0 || static_cast<std::size_t>(truth[i]) >= k ||
            static_cast<std::size_t>(predicted[i]) >= k)
            throw ArgumentError("confusion: label outside the declared class set");
        ++cm.counts[truth[i]][predicted[i]];
    }
    const std::size_t total = cm.total();
    cm.accuracy = total == 0 ? 0.0 : static_cast<double>(cm.trace()) / static_cast<double>(total);
    return cm;
}

inline ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, std::size_t classes) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < classes; ++i) labels.push_back(std::to_string(i));
    return confusion(truth, predicted, std::move(labels));
}

/// Wall-clock measurement of one pipeline.
struct BenchResult {
    std::string method;
    double seconds = 0.0;
    std::size_t items = 0;
    double speedup = 1.0;  // baseline seconds / these seconds
};

}  // namespace fdl
