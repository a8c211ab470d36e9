#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace critnls {

/// Area of the unit sphere S^{N-1} in R^N: 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_area(int dim);

/// Volume of the unit ball in R^N.
double unit_ball_volume(int dim);

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
double integrate_adaptive(const std::function<double(double)>& f,
                          double a, double b, double tol = 1e-12);

/// Composite Simpson on sampled values over arbitrary strictly increasing
/// nodes. Handles non-uniform spacing pairwise; a trailing odd interval is
/// closed with the quadratic through the last three nodes.
double simpson_nonuniform(std::span<const double> x, std::span<const double> y);

/// \int_0^infty r^a (1 + r^2)^{-p} dr, the radial moment behind the bubble
/// integrals K1..K4. Split at r = 1 and mapped to [0, 1] on both sides; the
/// endpoint power singularity of the far piece is removed by a power-law
/// change of variable, so plain adaptive Simpson converges at full order.
/// Requires 2p - a > 1 (integrability at infinity) and a > -1.
double radial_power_integral(double a, double p, double tol = 1e-13);

} // namespace critnls
