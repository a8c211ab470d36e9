#include "profile.hpp"

#include "errors.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace critnls {

RadialProfile::RadialProfile(std::shared_ptr<const RadialGrid> grid,
                             std::vector<double> values, double dilation_log)
    : grid_(std::move(grid)), values_(std::move(values)), dilation_log_(dilation_log) {
    if (!grid_) throw DomainError("RadialProfile: null grid");
    if (values_.size() != grid_->size())
        throw DomainError("RadialProfile: value count does not match grid");
    for (const double v : values_)
        if (!std::isfinite(v)) throw DomainError("RadialProfile: values must be finite");
}

RadialProfile RadialProfile::sample(std::shared_ptr<const RadialGrid> grid,
                                    const std::function<double(double)>& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) v[i] = f(grid->r(i));
    return RadialProfile(std::move(grid), std::move(v));
}

double RadialProfile::base_lp_pow(double p) const {
    std::vector<double> integrand(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
        integrand[i] = std::pow(std::abs(values_[i]), p);
    return grid_->integrate(integrand);
}

double RadialProfile::base_grad_sq() const {
    std::vector<double> d = grid_->derivative(values_);
    for (double& v : d) v *= v;
    return grid_->integrate(d);
}

double RadialProfile::lp_norm_pow(double p) const {
    if (p < 1.0) throw DomainError("lp_norm: p must be >= 1");
    const double base = base_lp_pow(p);
    return base * std::exp(0.5 * grid_->dim() * (p - 2.0) * dilation_log_);
}

double RadialProfile::lp_norm(double p) const {
    return std::pow(lp_norm_pow(p), 1.0 / p);
}

double RadialProfile::grad_norm_sq() const {
    return base_grad_sq() * std::exp(2.0 * dilation_log_);
}

RadialProfile RadialProfile::dilate(double s) const {
    return RadialProfile(grid_, values_, dilation_log_ + s);
}

double interpolate_cubic(std::span<const double> x, std::span<const double> y,
                         double xq) {
    const std::size_t n = x.size();
    if (xq <= x.front()) return y.front();
    if (xq >= x.back()) return 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x.begin());  // x[i-1] <= xq < x[i]
    std::size_t s = i >= 2 ? i - 2 : 0;
    s = std::min(s, n - 4);
    double acc = 0.0;
    for (std::size_t j = s; j < s + 4; ++j) {
        double l = 1.0;
        for (std::size_t k = s; k < s + 4; ++k)
            if (k != j) l *= (xq - x[k]) / (x[j] - x[k]);
        acc += l * y[j];
    }
    return acc;
}

double RadialProfile::value_at(double r) const {
    const double scale = std::exp(0.5 * grid_->dim() * dilation_log_);
    return scale * interpolate_cubic(grid_->nodes(), values_,
                                     std::exp(dilation_log_) * r);
}

RadialProfile RadialProfile::materialize() const {
    if (dilation_log_ == 0.0) return *this;
    std::vector<double> v(grid_->size());
    for (std::size_t i = 0; i < grid_->size(); ++i) v[i] = value_at(grid_->r(i));
    return RadialProfile(grid_, std::move(v), 0.0);
}

bool RadialProfile::nonnegative(double tol) const {
    return std::all_of(values_.begin(), values_.end(),
                       [tol](double v) { return v >= -tol; });
}

double integrate(const RadialProfile& integrand) {
    if (integrand.dilation_log() != 0.0)
        throw DomainError("integrate: materialize the integrand first");
    return integrand.grid().integrate(integrand.base_values());
}

RadialProfile normalize_mass(const RadialProfile& u, double a) {
    if (!(a > 0.0)) throw DomainError("normalize_mass: a must be positive");
    const double m = u.mass();
    if (!(m > 0.0)) throw DomainError("normalize_mass: zero profile");
    std::vector<double> v = u.base_values();
    const double factor = a / m;
    for (double& x : v) x *= factor;
    return RadialProfile(u.grid_ptr(), std::move(v), u.dilation_log());
}

RadialProfile rearrange_decreasing(const RadialProfile& u) {
    if (!u.nonnegative())
        throw DomainError("rearrange_decreasing: profile must be nonnegative");
    const RadialGrid& g = u.grid();
    const std::size_t n = g.size();
    const std::vector<double>& v = u.base_values();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&v](std::size_t a, std::size_t b) { return v[a] > v[b]; });

    // Cumulative measure of super-level cells, largest value first.
    std::span<const double> w = g.cell_volumes();
    std::vector<double> cum(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += w[order[k]];
        cum[k] = acc;
    }

    const int N = g.dim();
    std::vector<double> out(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ball = std::pow(g.r(i), N) / N;
        while (k + 1 < n && cum[k] <= ball) ++k;
        out[i] = v[order[k]];
    }
    return RadialProfile(u.grid_ptr(), std::move(out), u.dilation_log());
}

void write_csv(std::ostream& os, const RadialProfile& u) {
    os << "# N=" << u.grid().dim() << " dilation_log=";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", u.dilation_log());
    os << buf << "\n";
    os << "r,value\n";
    for (std::size_t i = 0; i < u.grid().size(); ++i) {
        char line[96];
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", u.grid().r(i),
                      u.base_values()[i]);
        os << line;
    }
}

RadialProfile read_csv(std::istream& is) {
    std::string line;
    int dim = 0;
    double s = 0.0;
    if (!std::getline(is, line) || line.rfind("# N=", 0) != 0)
        throw DomainError("read_csv: missing header comment");
    if (std::sscanf(line.c_str(), "# N=%d dilation_log=%lf", &dim, &s) != 2)
        throw DomainError("read_csv: malformed header comment");
    std::getline(is, line);  // column header
    std::vector<double> r, v;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double ri = 0.0, vi = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf", &ri, &vi) != 2)
            throw DomainError("read_csv: malformed row");
        r.push_back(ri);
        v.push_back(vi);
    }
    auto grid = RadialGrid::from_nodes(dim, std::move(r), GridSpacing::Graded);
    return RadialProfile(std::move(grid), std::move(v), s);
}

} // namespace critnls
