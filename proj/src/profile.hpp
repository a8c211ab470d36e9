#pragma once

#include "grid.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace critnls {

/// Radial function on R^N with a lazily tracked mass-preserving dilation:
/// the represented function is (s * u)(x) = e^{Ns/2} u(e^s x), where u is
/// the stored base sample vector and s = dilation_log. Norms obey the exact
/// scaling laws and never touch the samples; point values interpolate.
class RadialProfile {
public:
    RadialProfile(std::shared_ptr<const RadialGrid> grid, std::vector<double> values,
                  double dilation_log = 0.0);

    static RadialProfile sample(std::shared_ptr<const RadialGrid> grid,
                                const std::function<double(double)>& f);

    const RadialGrid& grid() const { return *grid_; }
    std::shared_ptr<const RadialGrid> grid_ptr() const { return grid_; }
    const std::vector<double>& base_values() const { return values_; }
    double dilation_log() const { return dilation_log_; }

    /// |u|_p (p >= 1), from the base norm and the exact dilation law
    /// |s*u|_p^p = e^{N(p-2)s/2} |u|_p^p.
    double lp_norm(double p) const;
    /// |u|_p^p.
    double lp_norm_pow(double p) const;
    double mass() const { return lp_norm(2.0); }
    /// |grad u|_2^2, five-point differences plus e^{2s} scaling.
    double grad_norm_sq() const;

    /// Lazy dilation: only dilation_log changes.
    RadialProfile dilate(double s) const;
    /// Fold the dilation into the samples on the same grid (cubic resample).
    RadialProfile materialize() const;
    /// Point value of the represented function at radius r.
    double value_at(double r) const;

    bool nonnegative(double tol = 0.0) const;

private:
    double base_lp_pow(double p) const;
    double base_grad_sq() const;

    std::shared_ptr<const RadialGrid> grid_;
    std::vector<double> values_;
    double dilation_log_;
};

/// omega_N \int f r^{N-1} dr of a sampled integrand (dilation must be zero:
/// integrands are materialized quantities).
double integrate(const RadialProfile& integrand);

/// a u / |u|_2. Throws DomainError on a zero profile.
RadialProfile normalize_mass(const RadialProfile& u, double a);

/// Radially decreasing rearrangement of a nonnegative profile: values are
/// redistributed against the measure of super-level sets, preserving every
/// L^p norm up to quadrature accuracy.
RadialProfile rearrange_decreasing(const RadialProfile& u);

/// CSV round-trip: "r,value" rows under a comment recording N, dilation_log.
void write_csv(std::ostream& os, const RadialProfile& u);
RadialProfile read_csv(std::istream& is);

/// Cubic 4-point interpolation of tabulated (x, y); zero beyond the table.
double interpolate_cubic(std::span<const double> x, std::span<const double> y,
                         double xq);

} // namespace critnls
