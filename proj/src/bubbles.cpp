#include "bubbles.hpp"

#include "constants.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace critnls {

namespace {

constexpr double kQuadTol = 1e-12;

double smooth_step(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double smooth_step_derivative(double t) {
    return t > 0.0 ? std::exp(-1.0 / t) / (t * t) : 0.0;
}

// Least squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

double bubble_value(int dim, double eps, double r) {
    return std::pow(eps / (eps * eps + r * r), 0.5 * (dim - 2));
}

double bubble_derivative(int dim, double eps, double r) {
    const double m = 0.5 * (dim - 2);
    return -2.0 * m * r * std::pow(eps, m) * std::pow(eps * eps + r * r, -m - 1.0);
}

RadialProfile bubble_profile(std::shared_ptr<const RadialGrid> grid, double eps) {
    if (!(eps > 0.0)) throw DomainError("bubble_profile: eps must be positive");
    const int dim = grid->dim();
    return RadialProfile::sample(std::move(grid),
                                 [dim, eps](double r) { return bubble_value(dim, eps, r); });
}

double cutoff(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    const double a = smooth_step(2.0 - r);
    const double b = smooth_step(r - 1.0);
    return a / (a + b);
}

double cutoff_derivative(double r) {
    if (r <= 1.0 || r >= 2.0) return 0.0;
    const double a = smooth_step(2.0 - r);
    const double b = smooth_step(r - 1.0);
    const double da = -smooth_step_derivative(2.0 - r);
    const double db = smooth_step_derivative(r - 1.0);
    return (da * b - a * db) / ((a + b) * (a + b));
}

std::pair<RadialProfile, RadialProfile> test_function(int dim, double eps, double a) {
    if (!(eps > 0.0) || eps > 1.0) throw DomainError("test_function: eps must lie in (0, 1]");
    if (!(a > 0.0)) throw DomainError("test_function: a must be positive");
    // Core-resolving grid: spacing ~eps/40 near the origin, support ends at 2.
    const double stretch = std::log(2.5 / (eps / 40.0));
    auto grid = RadialGrid::graded(dim, 2.5, 4097, std::max(4.0, stretch));
    RadialProfile u_eps = RadialProfile::sample(
        grid, [dim, eps](double r) { return cutoff(r) * bubble_value(dim, eps, r); });
    RadialProfile v_eps = normalize_mass(u_eps, a);
    return {std::move(u_eps), std::move(v_eps)};
}

TruncatedBubbleNorms truncated_bubble_norms(int dim, double q, double eps) {
    const auto u = [dim, eps](double r) { return cutoff(r) * bubble_value(dim, eps, r); };
    const auto du = [dim, eps](double r) {
        return cutoff_derivative(r) * bubble_value(dim, eps, r) +
               cutoff(r) * bubble_derivative(dim, eps, r);
    };
    const double nm1 = dim - 1;
    const double ts = critical_exponent(dim);
    const auto weighted = [&](const std::function<double(double)>& f) {
        // Split at the core scale so the adaptive rule sees the peak.
        const double mid = std::min(1.0, 8.0 * eps);
        return unit_sphere_area(dim) *
               (integrate_adaptive(f, 0.0, mid, 0.5 * kQuadTol) +
                integrate_adaptive(f, mid, 2.0, 0.5 * kQuadTol));
    };
    TruncatedBubbleNorms n;
    n.grad_sq = weighted([&](double r) { return std::pow(r, nm1) * du(r) * du(r); });
    n.crit_pow = weighted([&](double r) { return std::pow(r, nm1) * std::pow(u(r), ts); });
    n.mass_sq = weighted([&](double r) { return std::pow(r, nm1) * u(r) * u(r); });
    n.lq_pow = weighted([&](double r) { return std::pow(r, nm1) * std::pow(u(r), q); });
    return n;
}

BubbleReport appendix_asymptotics(int dim, double q, const std::vector<double>& eps_list) {
    if (eps_list.size() < 4)
        throw DomainError("appendix_asymptotics: need at least 4 eps values");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] > 0.0) || eps_list[i] > 0.5)
            throw DomainError("appendix_asymptotics: eps values must lie in (0, 0.5]");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw DomainError("appendix_asymptotics: eps values must decrease");
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    BubbleReport rep;
    rep.dim = dim;
    rep.q = q;
    rep.K1 = bubble_k1(dim);
    rep.K2 = bubble_k2(dim);
    rep.K3 = dim >= 5 ? bubble_k3(dim) : nan;
    rep.K4 = q > static_cast<double>(dim) / (dim - 2.0) ? bubble_k4(dim, q) : nan;
    rep.mp_bound = nan;
    rep.mp_best_eps = nan;

    const double ts = critical_exponent(dim);
    for (const double eps : eps_list) {
        const TruncatedBubbleNorms n = truncated_bubble_norms(dim, q, eps);
        BubbleRow row;
        row.eps = eps;
        row.grad_sq = n.grad_sq;
        row.mass_sq = n.mass_sq;
        row.lq_pow = n.lq_pow;
        row.crit_norm_sq = std::pow(n.crit_pow, 2.0 / ts);
        row.fiber_max = nan;
        rep.rows.push_back(row);
    }

    // Slope fits on the asymptotic part (largest eps dropped).
    std::vector<double> xs, dev_grad, lqs, masses;
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        xs.push_back(rep.rows[i].eps);
        dev_grad.push_back(std::abs(rep.rows[i].grad_sq - rep.K1));
        lqs.push_back(rep.rows[i].lq_pow);
        masses.push_back(rep.rows[i].mass_sq);
    }
    rep.slope_grad_deviation = loglog_slope(xs, dev_grad);
    rep.slope_lq = loglog_slope(xs, lqs);
    rep.slope_mass = dim == 4 ? nan : loglog_slope(xs, masses);

    rep.n3_mass_constant = nan;
    rep.n4_ratio_spread = nan;
    if (dim == 3) {
        double acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) acc += masses[i] / xs[i];
        rep.n3_mass_constant = acc / xs.size();
    } else if (dim == 4) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& row : rep.rows) {
            const double ratio =
                row.mass_sq / (row.eps * row.eps * std::abs(std::log(row.eps)));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        rep.n4_ratio_spread = hi / lo - 1.0;
    }
    return rep;
}

MountainPassBound mountain_pass_bound(const ProblemParams& params,
                                      const std::vector<double>& eps_list) {
    validate(params);
    if (eps_list.empty()) throw DomainError("mountain_pass_bound: empty eps list");
    if (params.mu < 0.0)
        throw DomainError("mountain_pass_bound: defined for mu >= 0");
    if (params.mu > 0.0) {
        if (params.regime() == Regime::Subcritical)
            throw DomainError("mountain_pass_bound: critical/supercritical regimes only");
        if (!admissible(params))
            throw DomainError("mountain_pass_bound: parameters not admissible");
    }

    const int dim = params.dim;
    const double ts = params.two_star();
    MountainPassBound out;
    out.level_cap = std::pow(sobolev_constant(dim), 0.5 * dim) / dim;
    out.bound = std::numeric_limits<double>::infinity();

    for (const double eps : eps_list) {
        const TruncatedBubbleNorms n = truncated_bubble_norms(dim, params.q, eps);
        // v_eps = (a/|u_eps|_2) u_eps; norms scale by powers of that factor.
        const double k = params.mass / std::sqrt(n.mass_sq);
        const NormTriple v{n.grad_sq * k * k, n.lq_pow * std::pow(k, params.q),
                           n.crit_pow * std::pow(k, ts)};
        const FiberReport fr = fiber_critical_points(v, params);
        const double sup = fr.global_max().level;
        out.per_eps.push_back(sup);
        if (sup < out.bound) {
            out.bound = sup;
            out.best_eps = eps;
        }
    }
    out.certified = out.bound < out.level_cap;
    return out;
}

std::string BubbleReport::to_json() const {
    nlohmann::ordered_json j;
    j["N"] = dim;
    j["q"] = q;
    j["K1"] = K1;
    j["K2"] = K2;
    j["K1_over_K2"] = K1 / K2;
    if (std::isfinite(K3)) j["K3"] = K3;
    if (std::isfinite(K4)) j["K4"] = K4;
    j["slope_grad_deviation"] = slope_grad_deviation;
    j["slope_lq"] = slope_lq;
    if (std::isfinite(slope_mass)) j["slope_mass"] = slope_mass;
    if (std::isfinite(n3_mass_constant)) j["n3_mass_constant"] = n3_mass_constant;
    if (std::isfinite(n4_ratio_spread)) j["n4_ratio_spread"] = n4_ratio_spread;
    if (std::isfinite(mp_bound)) {
        j["mp_bound"] = mp_bound;
        j["mp_best_eps"] = mp_best_eps;
        j["bound_certified"] = bound_certified;
    }
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json e;
        e["eps"] = r.eps;
        e["grad_sq"] = r.grad_sq;
        e["mass_sq"] = r.mass_sq;
        e["lq"] = r.lq_pow;
        e["l2star"] = r.crit_norm_sq;
        if (std::isfinite(r.fiber_max)) e["fiber_max"] = r.fiber_max;
        j["rows"].push_back(e);
    }
    return j.dump(2);
}

std::string BubbleReport::to_csv() const {
    std::string out = "eps,grad_sq,mass_sq,lq,l2star,fiber_max\n";
    char line[160];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.eps, r.grad_sq, r.mass_sq, r.lq_pow, r.crit_norm_sq,
                      r.fiber_max);
        out += line;
    }
    return out;
}

} // namespace critnls
