#include "quadrature.hpp"
#include <limits>

#include "errors.hpp"

#include <algorithm>
#include <cmath>

namespace critnls {

double unit_sphere_area(int dim) {
    if (dim < 1) throw DomainError("unit_sphere_area: dim must be >= 1");
    return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

double unit_ball_volume(int dim) {
    return unit_sphere_area(dim) / dim;
}

namespace {

double adaptive_step(const std::function<double(double)>& f, double a, double b,
                     double fa, double fm, double fb, double whole, double tol,
                     int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw NumericError("integrate_adaptive: recursion depth exhausted");
    // Roundoff floor: stop once the correction is at noise level or the
    // interval can no longer be split in floating point.
    const double noise =
        4.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
    if (std::abs(delta) <= std::max(15.0 * tol, noise) || m <= a || m >= b)
        return left + right + delta / 15.0;
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw NumericError("integrate_adaptive: non-finite integrand");
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 64);
}

double simpson_nonuniform(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 3)
        throw DomainError("simpson_nonuniform: need at least 3 matching nodes");
    for (const double v : y)
        if (!std::isfinite(v)) throw NumericError("simpson_nonuniform: NaN in samples");

    double total = 0.0;
    std::size_t i = 0;
    // Pairs of intervals, quadratic through (x_i, x_{i+1}, x_{i+2}).
    while (i + 2 < n) {
        const double h0 = x[i + 1] - x[i];
        const double h1 = x[i + 2] - x[i + 1];
        const double hs = h0 + h1;
        total += hs / 6.0 * ((2.0 - h1 / h0) * y[i] +
                             hs * hs / (h0 * h1) * y[i + 1] +
                             (2.0 - h0 / h1) * y[i + 2]);
        i += 2;
    }
    if (i + 1 < n) {
        // One interval left: integrate the quadratic through the last three
        // nodes over it so the composite rule keeps its order.
        const std::size_t k = n - 3;
        const double h0 = x[k + 1] - x[k];
        const double h1 = x[k + 2] - x[k + 1];
        const double hs = h0 + h1;
        total += h1 / 6.0 * (y[k + 2] * (3.0 - h1 / hs) +
                             y[k + 1] * (3.0 + h1 / h0) -
                             y[k] * (h1 / h0) * (h1 / hs));
    }
    return total;
}

double radial_power_integral(double a, double p, double tol) {
    if (a <= -1.0) throw DomainError("radial_power_integral: a must exceed -1");
    if (2.0 * p - a <= 1.0)
        throw DomainError("radial_power_integral: divergent tail (need 2p - a > 1)");

    const auto near = [a, p](double r) {
        return std::pow(r, a) * std::pow(1.0 + r * r, -p);
    };
    // r = 1/t on the tail gives integrand t^beta (1+t^2)^{-p} with
    // beta = 2p - a - 2 > -1; substitute t = w^m to blunt the endpoint power.
    const double beta = 2.0 * p - a - 2.0;
    const int m = beta >= 3.0 ? 1 : static_cast<int>(std::ceil(4.0 / (1.0 + beta)));
    const auto far = [beta, p, m](double w) {
        const double t = std::pow(w, m);
        return static_cast<double>(m) * std::pow(w, m * (beta + 1.0) - 1.0) *
               std::pow(1.0 + t * t, -p);
    };
    return integrate_adaptive(near, 0.0, 1.0, 0.5 * tol) +
           integrate_adaptive(far, 0.0, 1.0, 0.5 * tol);
}

} // namespace critnls
