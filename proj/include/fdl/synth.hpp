#pragma once

// Seeded generators for every curve family, with ground-truth labels.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fdl/curve.hpp"
#include "fdl/ode.hpp"
#include "fdl/oracles.hpp"
#include "fdl/rng.hpp"
#include "fdl/systems.hpp"

namespace fdl {

struct ExponentialSpec {
    double omega = 0.0;
    double x_max = 10.0;
    std::size_t n = 100;
};

enum class TrigKind { Sine, Cosine };

struct TrigSpec {
    TrigKind kind = TrigKind::Sine;
    double omega = 1.0;
    double x_max = 10.0;
    std::size_t n = 100;
};

struct GaussianMixtureSpec {
    std::array<double, 2> heights{0.0, 0.0};
    std::array<double, 2> widths{1.0, 1.0};
    std::array<double, 2> positions{1.0, 1.0};
    double x_max = 50.0;
    std::size_t n = 1000;
};

struct MonotoneSpec {
    double w1 = 1.0;  // +1 increasing, -1 decreasing
    double w2 = 3.0;
    double x_max = 5.0;
    std::size_t n = 100;
};

struct CurvatureSpec {
    double w1 = 1.0;  // +1 convex, -1 concave
    double w2 = 3.0;
    double x_max = 5.0;
    std::size_t n = 100;
};

enum class GrowthKind { Exponential = 0, Algebraic = 1 };

struct GrowthSpec {
    GrowthKind kind = GrowthKind::Exponential;
    double c = 2.0;
    double x_max = 3.0;
    std::size_t n = 100;
};

/// Release profile sampling schedule, minutes.
inline constexpr std::array<double, 8> dissolution_times{5, 10, 15, 20, 30, 60, 90, 120};
inline constexpr double dissolution_slow_rate = 0.01;
inline constexpr double dissolution_fast_rate = 0.03;
inline constexpr double dissolution_rate_sd = 0.001;

using Profile = std::array<double, dissolution_times.size()>;

enum class PairKind { Dissimilar = 0, Similar = 1 };

struct DissolutionPair {
    Profile reference{};
    Profile test{};
    double rate_reference = 0.0;
    double rate_test = 0.0;
    PairKind kind = PairKind::Similar;
};

// ---------------------------------------------------------------------------

inline Curve gen_exponential(const ExponentialSpec& s) {
    auto xs = Curve::grid(0.0, s.x_max, s.n);
    std::vector<double> ys(s.n);
    for (std::size_t i = 0; i < s.n; ++i) ys[i] = std::exp(s.omega * xs[i]);
    CurveMeta meta{Family::Exponential, {{"omega", s.omega}}, {{"omega", s.omega}}};
    return Curve(std::move(xs), std::move(ys), std::move(meta));
}

inline Curve gen_trig(const TrigSpec& s) {
    auto xs = Curve::grid(0.0, s.x_max, s.n);
    std::vector<double> ys(s.n);
    for (std::size_t i = 0; i < s.n; ++i)
        ys[i] = s.kind == TrigKind::Sine ? std::sin(s.omega * xs[i]) : std::cos(s.omega * xs[i]);
    const Family fam = s.kind == TrigKind::Sine ? Family::Sine : Family::Cosine;
    CurveMeta meta{fam, {{"omega", s.omega}}, {{"omega", s.omega}}};
    return Curve(std::move(xs), std::move(ys), std::move(meta));
}

/// Sum of two kernels H exp(-((x-P)/W)^2). Labels (height, width) describe
/// the highest interior peak and are absent when there is none; "peaks" is
/// always set.
inline Curve gen_gaussian_mixture(const GaussianMixtureSpec& s) {
    auto xs = Curve::grid(0.0, s.x_max, s.n);
    std::vector<double> ys(s.n, 0.0);
    for (std::size_t i = 0; i < s.n; ++i) {
        for (int k = 0; k < 2; ++k) {
            const double u = (xs[i] - s.positions[k]) / s.widths[k];
            ys[i] += s.heights[k] * std::exp(-u * u);
        }
    }
    CurveMeta meta;
    meta.family = Family::GaussianMixture;
    meta.params = {{"h1", s.heights[0]}, {"h2", s.heights[1]}, {"w1", s.widths[0]},
                   {"w2", s.widths[1]},  {"p1", s.positions[0]}, {"p2", s.positions[1]}};
    Curve c(std::move(xs), std::move(ys), std::move(meta));
    const PeakMetrics pm = peak_metrics(c);
    c.meta().labels["peaks"] = static_cast<double>(pm.count);
    if (pm.max_height) c.meta().labels["height"] = *pm.max_height;
    if (pm.half_prom_width) c.meta().labels["width"] = *pm.half_prom_width;
    return c;
}

/// y = exp(w1 (x - w2)); class 1 = increasing.
inline Curve gen_classification_curve(const MonotoneSpec& s) {
    auto xs = Curve::grid(0.0, s.x_max, s.n);
    std::vector<double> ys(s.n);
    for (std::size_t i = 0; i < s.n; ++i) ys[i] = std::exp(s.w1 * (xs[i] - s.w2));
    CurveMeta meta{Family::Monotone, {{"w1", s.w1}, {"w2", s.w2}}, {{"class", s.w1 > 0 ? 1.0 : 0.0}}};
    return Curve(std::move(xs), std::move(ys), std::move(meta));
}

/// y = w1 (x - w2)^2; class 1 = convex.
inline Curve gen_classification_curve(const CurvatureSpec& s) {
    auto xs = Curve::grid(0.0, s.x_max, s.n);
    std::vector<double> ys(s.n);
    for (std::size_t i = 0; i < s.n; ++i) ys[i] = s.w1 * (xs[i] - s.w2) * (xs[i] - s.w2);
    CurveMeta meta{Family::Curvature, {{"w1", s.w1}, {"w2", s.w2}}, {{"class", s.w1 > 0 ? 1.0 : 0.0}}};
    return Curve(std::move(xs), std::move(ys), std::move(meta));
}

/// y = exp(c x) (class 0) or y = x^c (class 1).
inline Curve gen_classification_curve(const GrowthSpec& s) {
    auto xs = Curve::grid(0.0, s.x_max, s.n);
    std::vector<double> ys(s.n);
    for (std::size_t i = 0; i < s.n; ++i)
        ys[i] = s.kind == GrowthKind::Exponential ? std::exp(s.c * xs[i]) : std::pow(xs[i], s.c);
    CurveMeta meta{Family::Growth, {{"c", s.c}}, {{"class", static_cast<double>(s.kind)}}};
    return Curve(std::move(xs), std::move(ys), std::move(meta));
}

/// Trajectory sampled at n equidistant times (rtol 1e-6, atol 1e-8).
inline std::vector<State<3>> lorenz_trajectory(const LorenzSpec& s, const OdeOptions& opt = {}) {
    return integrate_ode<3>(s, s.init, s.t0, s.t1, s.n, opt);
}

/// Rosenstein settings used for Lorenz labels: defaults with the sample step
/// of the generated series.
inline RosensteinConfig lorenz_label_config(const LorenzSpec& s) {
    RosensteinConfig cfg;
    cfg.sample_dt = (s.t1 - s.t0) / static_cast<double>(s.n - 1);
    return cfg;
}

/// x component of the trajectory; label "lle" is the Rosenstein estimate of
/// that (noise-free) series. Constant series get label 0 and "degenerate" = 1.
inline Curve gen_lorenz(const LorenzSpec& s) {
    const auto traj = lorenz_trajectory(s);
    std::vector<double> xs_comp(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) xs_comp[i] = traj[i][0];
    const RosensteinResult rr = rosenstein_lle(xs_comp, lorenz_label_config(s));
    CurveMeta meta;
    meta.family = Family::Lorenz;
    meta.params = {{"alpha", s.alpha}, {"beta", s.beta}, {"rho", s.rho}};
    meta.labels = {{"lle", rr.degenerate ? 0.0 : rr.lambda}, {"degenerate", rr.degenerate ? 1.0 : 0.0}};
    return Curve::on_grid(s.t0, s.t1, std::move(xs_comp), std::move(meta));
}

inline std::vector<State<3>> sir_trajectory(const SirSpec& s, const OdeOptions& opt = {}) {
    return integrate_ode<3>(s, s.init, s.t0, s.t1, s.n, opt);
}

/// Infected share I(t) in percent of the population (scale 100); label "beta".
inline Curve gen_sir(const SirSpec& s, double scale = 100.0) {
    const auto traj = sir_trajectory(s);
    std::vector<double> infected(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) infected[i] = scale * traj[i][1];
    CurveMeta meta{Family::Sir, {{"beta", s.beta}, {"r0", s.r0()}}, {{"beta", s.beta}}};
    return Curve::on_grid(s.t0, s.t1, std::move(infected), std::move(meta));
}

/// 100 / (1 + exp(-c (t - 6))) at the sampling schedule.
inline Profile dissolution_profile(double rate) {
    Profile p{};
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 100.0 / (1.0 + std::exp(-rate * (dissolution_times[i] - 6.0)));
    return p;
}

/// Similar pairs draw both rates around one randomly chosen centre; dissimilar
/// pairs draw one rate around each centre, in random order.
inline DissolutionPair gen_dissolution_pair(PairKind kind, std::uint64_t seed) {
    Rng rng(seed);
    DissolutionPair pair;
    pair.kind = kind;
    const bool first_fast = rng.uniform() < 0.5;
    const double c_a = first_fast ? dissolution_fast_rate : dissolution_slow_rate;
    const double c_b = kind == PairKind::Similar ? c_a
                       : first_fast              ? dissolution_slow_rate
                                                 : dissolution_fast_rate;
    pair.rate_reference = c_a + dissolution_rate_sd * rng.normal();
    pair.rate_test = c_b + dissolution_rate_sd * rng.normal();
    pair.reference = dissolution_profile(pair.rate_reference);
    pair.test = dissolution_profile(pair.rate_test);
    return pair;
}

/// Profile as a curve over its sample index (the schedule itself is not
/// equidistant).
inline Curve profile_curve(const Profile& p) {
    CurveMeta meta;
    meta.family = Family::Dissolution;
    return Curve::on_grid(0.0, static_cast<double>(p.size() - 1), std::vector<double>(p.begin(), p.end()),
                          std::move(meta));
}

// ---------------------------------------------------------------------------
// Replication-preset parameter draws

inline ExponentialSpec draw_exponential(Rng& rng) { return {rng.uniform(-1.0, 1.0)}; }

inline TrigSpec draw_trig(Rng& rng, TrigKind kind) { return {kind, rng.uniform(0.0, 3.0)}; }

inline GaussianMixtureSpec draw_gaussian_mixture(Rng& rng, std::size_t n = 1000) {
    GaussianMixtureSpec s;
    s.n = n;
    for (int k = 0; k < 2; ++k) {
        s.heights[k] = rng.uniform(0.0, 2200.0);
        s.widths[k] = std::floor(50.0 * rng.uniform() + 1.0);
        s.positions[k] = std::floor(50.0 * rng.uniform() + 1.0);
    }
    return s;
}

inline double sign_draw(Rng& rng) { return rng.uniform() - 0.5 >= 0.0 ? 1.0 : -1.0; }

inline MonotoneSpec draw_monotone(Rng& rng) {
    MonotoneSpec s;
    s.w1 = sign_draw(rng);
    s.w2 = 2.0 * rng.uniform() + 2.5;
    return s;
}

inline CurvatureSpec draw_curvature(Rng& rng) {
    CurvatureSpec s;
    s.w1 = sign_draw(rng);
    s.w2 = 2.0 * rng.uniform() + 2.5;
    return s;
}

inline GrowthSpec draw_growth(Rng& rng) {
    GrowthSpec s;
    s.kind = rng.uniform() < 0.5 ? GrowthKind::Exponential : GrowthKind::Algebraic;
    s.c = 3.0 * rng.uniform() + 1.0;
    return s;
}

inline LorenzSpec draw_lorenz(Rng& rng, std::size_t n = 1000) {
    LorenzSpec s;
    s.alpha = 10.0 * rng.uniform();
    s.beta = 8.0 / 3.0 * rng.uniform();
    s.rho = 20.0 * rng.uniform();
    s.n = n;
    return s;
}

inline SirSpec draw_sir(Rng& rng) {
    SirSpec s;
    s.beta = rng.uniform(0.01, 1.0);
    return s;
}

}  // namespace fdl
