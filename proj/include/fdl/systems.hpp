#pragma once

#include <cstddef>

#include "fdl/ode.hpp"

namespace fdl {

/// Lorenz system dx/dt = alpha(y - x), dy/dt = x(rho - z) - y, dz/dt = xy - beta z.
struct LorenzSpec {
    double alpha = 10.0;
    double beta = 8.0 / 3.0;
    double rho = 28.0;
    State<3> init{1.0, 1.0, 1.0};
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t n = 1000;

    State<3> operator()(double, const State<3>& s) const {
        return {alpha * (s[1] - s[0]), s[0] * (rho - s[2]) - s[1], s[0] * s[1] - beta * s[2]};
    }

    /// Jacobian of the vector field at s, row-major.
    std::array<double, 9> jacobian(const State<3>& s) const {
        return {-alpha, alpha, 0.0, rho - s[2], -1.0, -s[0], s[1], s[0], -beta};
    }
};

/// SIR model with vital dynamics, state (S, I, R) as population proportions.
struct SirSpec {
    double mu = 1.0 / (365.0 * 50.0);
    double gamma = 1.0 / 28.0;
    double beta = 0.5;
    State<3> init{0.99, 0.01, 0.0};
    double t0 = 0.0;
    double t1 = 50.0;
    std::size_t n = 100;

    double r0() const { return beta / (mu + gamma); }

    State<3> operator()(double, const State<3>& s) const {
        const double infection = beta * s[0] * s[1];
        return {mu - infection - mu * s[0], infection - (mu + gamma) * s[1], gamma * s[1] - mu * s[2]};
    }
};

}  // namespace fdl
