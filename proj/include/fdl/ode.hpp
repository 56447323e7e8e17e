#pragma once

// Dormand-Prince 4(5) adaptive integrator with the 4th-order continuous
// extension used for dense output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fdl/errors.hpp"

namespace fdl {

template <std::size_t N>
using State = std::array<double, N>;

struct OdeOptions {
    double rtol = 1e-6;
    double atol = 1e-8;
    double first_step = 0.0;  // 0 selects automatically
    std::size_t max_steps = 1'000'000;
};

namespace detail {

inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
inline constexpr double dp_b[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
// b - b_hat
inline constexpr double dp_e[7] = {-71.0 / 57600, 0.0, 71.0 / 16695, -71.0 / 1920, 17253.0 / 339200, -22.0 / 525, 1.0 / 40};
// Continuous extension: y(t + th*h) = y + h * sum_k K_k * sum_j P[k][j] th^(j+1)
inline constexpr double dp_p[7][4] = {
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608, -12715105075.0 / 11282082432},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933, 87487479700.0 / 32700410799},
    {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304, -10690763975.0 / 1880347072},
    {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408, 701980252875.0 / 199316789632},
    {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
};

template <std::size_t N>
double rms_norm(const State<N>& v, const State<N>& scale) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double q = v[i] / scale[i];
        s += q * q;
    }
    return std::sqrt(s / static_cast<double>(N));
}

template <std::size_t N, class F>
double initial_step(F& rhs, double t0, const State<N>& y0, const State<N>& f0, double direction_span,
                    const OdeOptions& opt) {
    State<N> scale;
    for (std::size_t i = 0; i < N; ++i) scale[i] = opt.atol + std::abs(y0[i]) * opt.rtol;
    const double d0 = rms_norm<N>(y0, scale);
    const double d1 = rms_norm<N>(f0, scale);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, direction_span);
    State<N> y1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
    State<N> f1 = rhs(t0 + h0, y1);
    State<N> df;
    for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - f0[i];
    const double d2 = rms_norm<N>(df, scale) / h0;
    const double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
    return std::min({100 * h0, h1, direction_span});
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 and returns the state at n_out
/// equidistant times (t0 and t1 included). rhs must be callable as
/// State<N>(double, const State<N>&).
template <std::size_t N, class F>
std::vector<State<N>> integrate_ode(F&& rhs, const State<N>& init, double t0, double t1, std::size_t n_out,
                                    const OdeOptions& opt = {}) {
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw ArgumentError("integrate_ode: tolerances must be > 0");
    if (n_out < 2) throw ArgumentError("integrate_ode: n_out must be >= 2");
    if (!(t1 > t0)) throw ArgumentError("integrate_ode: t_span must be increasing");

    std::vector<State<N>> out;
    out.reserve(n_out);
    out.push_back(init);
    const double span = t1 - t0;
    auto out_time = [&](std::size_t k) {
        return k + 1 == n_out ? t1 : t0 + span * static_cast<double>(k) / static_cast<double>(n_out - 1);
    };
    std::size_t next_out = 1;

    double t = t0;
    State<N> y = init;
    std::array<State<N>, 7> K;
    K[0] = rhs(t, y);
    double h = opt.first_step > 0.0 ? opt.first_step : detail::initial_step<N>(rhs, t0, y, K[0], span, opt);

    std::size_t steps = 0;
    while (next_out < n_out) {
        if (++steps > opt.max_steps) throw IntegrationError("integrate_ode: too many steps", t);
        const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < min_step) throw IntegrationError("integrate_ode: step size underflow", t);
        h = std::min(h, t1 - t);

        State<N> y_new{};
        State<N> stage;
        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += detail::dp_a[s][j] * K[j][i];
                stage[i] = y[i] + h * acc;
            }
            K[s] = rhs(t + detail::dp_c[s] * h, stage);
            if (s == 6) y_new = stage;  // row 6 of A equals b (FSAL)
        }

        State<N> err;
        State<N> scale;
        for (std::size_t i = 0; i < N; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 7; ++j) acc += detail::dp_e[j] * K[j][i];
            err[i] = h * acc;
            scale[i] = opt.atol + std::max(std::abs(y[i]), std::abs(y_new[i])) * opt.rtol;
        }
        const double err_norm = detail::rms_norm<N>(err, scale);
        if (!std::isfinite(err_norm)) {
            h *= 0.2;
            continue;
        }
        if (err_norm > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            continue;
        }

        const double t_new = (t1 - t <= h) ? t1 : t + h;
        while (next_out < n_out && out_time(next_out) <= t_new) {
            const double theta = (out_time(next_out) - t) / h;
            State<N> yo;
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                for (int k = 0; k < 7; ++k) {
                    const double* p = detail::dp_p[k];
                    const double poly = theta * (p[0] + theta * (p[1] + theta * (p[2] + theta * p[3])));
                    acc += K[k][i] * poly;
                }
                yo[i] = y[i] + h * acc;
            }
            if (next_out + 1 == n_out) yo = y_new;
            out.push_back(yo);
            ++next_out;
        }

        t = t_new;
        y = y_new;
        K[0] = K[6];
        const double factor = err_norm == 0.0 ? 10.0 : std::min(10.0, 0.9 * std::pow(err_norm, -0.2));
        h *= std::max(0.2, factor);
    }
    return out;
}

/// State at t1 only.
template <std::size_t N, class F>
State<N> integrate_to(F&& rhs, const State<N>& init, double t0, double t1, const OdeOptions& opt = {}) {
    return integrate_ode<N>(rhs, init, t0, t1, 2, opt).back();
}

}  // namespace fdl
