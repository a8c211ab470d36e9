#pragma once

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace critnls {

/// Accepted step record: abscissa, state, derivative (for Hermite resampling).
template <std::size_t D>
struct OdeStep {
    double x;
    std::array<double, D> y;
    std::array<double, D> dy;
};

template <std::size_t D>
struct OdeOptions {
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    double initial_step = 1e-4;
    double max_step = 0.5;
    double min_step = 1e-14;
    std::size_t max_steps = 2'000'000;
    bool record = false;
};

/// Dormand-Prince 5(4) with step control. Integrates y' = f(x, y) from x0 to
/// x1, calling stop(x, y) after every accepted step; a true return ends the
/// run early. Returns the final accepted step.
template <std::size_t D>
OdeStep<D> integrate_ode(
    const std::function<void(double, const std::array<double, D>&, std::array<double, D>&)>& f,
    double x0, const std::array<double, D>& y0, double x1, const OdeOptions<D>& opt,
    const std::function<bool(double, const std::array<double, D>&)>& stop = nullptr,
    std::vector<OdeStep<D>>* trace = nullptr) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                            e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double x = x0;
    std::array<double, D> y = y0;
    std::array<double, D> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
    f(x, y, k1);
    if (trace) trace->push_back({x, y, k1});

    double h = std::min(opt.initial_step, std::abs(x1 - x0));
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    h *= dir;

    for (std::size_t steps = 0; steps < opt.max_steps; ++steps) {
        if ((x - x1) * dir >= 0.0) break;
        if ((x + h - x1) * dir > 0.0) h = x1 - x;

        for (std::size_t i = 0; i < D; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        f(x + h / 5.0, ytmp, k2);
        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(x + 3.0 * h / 10.0, ytmp, k3);
        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(x + 4.0 * h / 5.0, ytmp, k4);
        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(x + 8.0 * h / 9.0, ytmp, k5);
        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        f(x + h, ytmp, k6);
        for (std::size_t i = 0; i < D; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                  b5 * k5[i] + b6 * k6[i]);
        f(x + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / scale) * (ei / scale);
        }
        err = std::sqrt(err / D);

        if (err <= 1.0 || std::abs(h) <= opt.min_step) {
            x += h;
            y = ynew;
            k1 = k7;  // FSAL
            if (trace) trace->push_back({x, y, k1});
            if (stop && stop(x, y)) return {x, y, k1};
        }
        const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
        if (std::abs(h) > opt.max_step) h = dir * opt.max_step;
        if (std::abs(h) < opt.min_step) h = dir * opt.min_step;
        if (!std::isfinite(h) || !std::isfinite(err))
            throw NumericError("integrate_ode: step-size collapse");
    }
    return {x, y, k1};
}

} // namespace critnls
