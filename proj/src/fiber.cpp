#include "fiber.hpp"

#include "constants.hpp"
#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace critnls {

namespace {

constexpr double kSClamp = 500.0;
constexpr double kRootTol = 1e-10;       // bisection |ds|
constexpr double kMembershipTol = 1e-6;  // |P| <= tol |grad u|^2
constexpr double kZeroBand = 1e-8;       // |Psi''| < band |grad u|^2 -> Pzero

double clamp_s(double s) { return std::clamp(s, -kSClamp, kSClamp); }

// Generic bisection on a bracketed sign change.
template <typename F>
double bisect(const F& f, double lo, double hi, double f_lo, double tol) {
    for (int i = 0; i < 200 && (hi - lo) > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

const char* pohozaev_class_name(PohozaevClass c) {
    switch (c) {
        case PohozaevClass::Pplus: return "P+";
        case PohozaevClass::Pzero: return "P0";
        case PohozaevClass::Pminus: return "P-";
        case PohozaevClass::NotOnP: return "off-manifold";
    }
    return "?";
}

NormTriple norms_of(const RadialProfile& u, const ProblemParams& params) {
    return NormTriple{u.grad_norm_sq(), u.lp_norm_pow(params.q),
                      u.lp_norm_pow(params.two_star())};
}

double energy(const NormTriple& n, const ProblemParams& params) {
    return 0.5 * n.grad_sq - n.crit_pow / params.two_star() -
           params.mu / params.q * n.lq_pow;
}

double energy(const RadialProfile& u, const ProblemParams& params) {
    return energy(norms_of(u, params), params);
}

double pohozaev(const NormTriple& n, const ProblemParams& params) {
    return n.grad_sq - n.crit_pow - params.mu * params.gamma_q() * n.lq_pow;
}

double pohozaev(const RadialProfile& u, const ProblemParams& params) {
    return pohozaev(norms_of(u, params), params);
}

double fiber_value(const NormTriple& n, const ProblemParams& params, double s) {
    s = clamp_s(s);
    const double ts = params.two_star();
    const double gq = params.gamma_q() * params.q;
    return 0.5 * std::exp(2.0 * s) * n.grad_sq -
           std::exp(ts * s) / ts * n.crit_pow -
           params.mu / params.q * std::exp(gq * s) * n.lq_pow;
}

double fiber_deriv(const NormTriple& n, const ProblemParams& params, double s) {
    s = clamp_s(s);
    const double ts = params.two_star();
    const double g = params.gamma_q();
    const double gq = g * params.q;
    return std::exp(2.0 * s) * n.grad_sq - std::exp(ts * s) * n.crit_pow -
           params.mu * g * std::exp(gq * s) * n.lq_pow;
}

double fiber_second(const NormTriple& n, const ProblemParams& params, double s) {
    s = clamp_s(s);
    const double ts = params.two_star();
    const double g = params.gamma_q();
    const double gq = g * params.q;
    return 2.0 * std::exp(2.0 * s) * n.grad_sq -
           ts * std::exp(ts * s) * n.crit_pow -
           params.mu * gq * g * std::exp(gq * s) * n.lq_pow;
}

double fiber_value(const RadialProfile& u, const ProblemParams& params, double s) {
    return fiber_value(norms_of(u, params), params, s);
}
double fiber_deriv(const RadialProfile& u, const ProblemParams& params, double s) {
    return fiber_deriv(norms_of(u, params), params, s);
}
double fiber_second(const RadialProfile& u, const ProblemParams& params, double s) {
    return fiber_second(norms_of(u, params), params, s);
}

PohozaevClass classify_pohozaev(const NormTriple& n, const ProblemParams& params) {
    const double p = pohozaev(n, params);
    if (std::abs(p) > kMembershipTol * n.grad_sq) return PohozaevClass::NotOnP;
    const double psi2 = fiber_second(n, params, 0.0);
    if (std::abs(psi2) < kZeroBand * n.grad_sq) return PohozaevClass::Pzero;
    return psi2 > 0.0 ? PohozaevClass::Pplus : PohozaevClass::Pminus;
}

PohozaevClass classify_pohozaev(const RadialProfile& u, const ProblemParams& params) {
    return classify_pohozaev(norms_of(u, params), params);
}

const FiberCriticalPoint& FiberReport::global_max() const {
    for (const auto& cp : critical_points)
        if (cp.kind == CriticalPointKind::GlobalMax) return cp;
    throw StructuralError("FiberReport: no global maximum recorded");
}

const FiberCriticalPoint& FiberReport::local_min() const {
    for (const auto& cp : critical_points)
        if (cp.kind == CriticalPointKind::LocalMin) return cp;
    throw StructuralError("FiberReport: no local minimum recorded");
}

namespace {

FiberCriticalPoint make_point(const NormTriple& n, const ProblemParams& params,
                              double s, CriticalPointKind kind) {
    // Classify the dilated profile: scale the triple to s and look at the
    // membership/second-derivative tests there.
    const double ts = params.two_star();
    const double gq = params.gamma_q() * params.q;
    NormTriple at{n.grad_sq * std::exp(2.0 * s), n.lq_pow * std::exp(gq * s),
                  n.crit_pow * std::exp(ts * s)};
    return FiberCriticalPoint{s, kind, fiber_value(n, params, s),
                              classify_pohozaev(at, params)};
}

// Unique root of mu gamma_q |u|_q^q e^{(gq-2)s} + |u|_{2*}^{2*} e^{(2*-2)s}
// = |grad u|_2^2: the left side is positive, continuous and monotone
// increasing in s, so a sign-change bracket plus bisection suffices.
double solve_unique_max(const NormTriple& n, const ProblemParams& params) {
    const double ts = params.two_star();
    const double g = params.gamma_q();
    const double gq = g * params.q;
    const auto lhs_minus_rhs = [&](double s) {
        return params.mu * g * n.lq_pow * std::exp((gq - 2.0) * clamp_s(s)) +
               n.crit_pow * std::exp((ts - 2.0) * clamp_s(s)) - n.grad_sq;
    };
    double hi = 0.0;
    int guard = 0;
    while (lhs_minus_rhs(hi) <= 0.0) {
        hi = hi == 0.0 ? 1.0 : hi * 2.0;
        if (++guard > 64)
            throw StructuralError("fiber_critical_points: no upper bracket for the maximum");
    }
    double lo = std::min(0.0, hi) - 1.0;
    guard = 0;
    while (lhs_minus_rhs(lo) >= 0.0) {
        lo *= 2.0;
        if (++guard > 64)
            throw StructuralError(
                "fiber_critical_points: Psi' has no sign change; gradient term "
                "dominated (inadmissible data?)");
    }
    return bisect(lhs_minus_rhs, lo, hi, lhs_minus_rhs(lo), kRootTol);
}

} // namespace

FiberReport fiber_critical_points(const NormTriple& n, const ProblemParams& params) {
    validate(params);
    if (!(n.grad_sq > 0.0) || !(n.crit_pow > 0.0))
        throw DomainError("fiber_critical_points: profile must be nonzero");
    if (params.mu < 0.0)
        throw DomainError("fiber_critical_points: mu < 0 geometry not covered");

    FiberReport report;
    report.regime = params.regime();
    report.homogeneous = params.mu == 0.0;

    if (report.homogeneous || report.regime != Regime::Subcritical) {
        if (!report.homogeneous && report.regime == Regime::Critical &&
            !admissible(params))
            throw DomainError("fiber_critical_points: inadmissible critical parameters");
        const double t_u = solve_unique_max(n, params);
        const auto cp = make_point(n, params, t_u, CriticalPointKind::GlobalMax);
        if (!(cp.level > 0.0))
            throw StructuralError("fiber_critical_points: maximum level not positive");
        if (cp.pclass != PohozaevClass::Pminus)
            throw StructuralError("fiber_critical_points: maximum not in P-");
        report.critical_points.push_back(cp);
        return report;
    }

    // Subcritical, mu > 0: requires admissibility, then Psi' changes sign
    // exactly twice (- + -) on a wide geometrically refined s-grid.
    if (!admissible(params))
        throw DomainError("fiber_critical_points: inadmissible subcritical parameters");

    const auto dpsi = [&](double s) { return fiber_deriv(n, params, s); };
    constexpr int kSamples = 2048;
    constexpr double kRange = 40.0;
    constexpr double kShape = 5.0;
    std::vector<double> roots;
    double s_prev = -kRange;
    double f_prev = dpsi(s_prev);
    for (int k = 1; k < kSamples; ++k) {
        const double t = -1.0 + 2.0 * static_cast<double>(k) / (kSamples - 1);
        const double s = kRange * std::sinh(kShape * t) / std::sinh(kShape);
        const double f = dpsi(s);
        if ((f > 0.0) != (f_prev > 0.0))
            roots.push_back(bisect(dpsi, s_prev, s, f_prev, kRootTol));
        s_prev = s;
        f_prev = f;
    }
    if (roots.size() != 2)
        throw StructuralError("fiber_critical_points: expected 2 critical points, found " +
                              std::to_string(roots.size()));

    const auto s_pt = make_point(n, params, roots[0], CriticalPointKind::LocalMin);
    const auto t_pt = make_point(n, params, roots[1], CriticalPointKind::GlobalMax);
    if (!(s_pt.level < 0.0) || !(t_pt.level > 0.0))
        throw StructuralError("fiber_critical_points: level signs violate Psi(s_u)<0<Psi(t_u)");
    if (s_pt.pclass != PohozaevClass::Pplus || t_pt.pclass != PohozaevClass::Pminus)
        throw StructuralError("fiber_critical_points: P+/P- classification mismatch");

    // Interleaved zeros: c_u in (s_u, t_u), d_u beyond t_u.
    const auto psi = [&](double s) { return fiber_value(n, params, s); };
    const double c_u = bisect(psi, s_pt.s, t_pt.s, psi(s_pt.s), kRootTol);
    double hi = t_pt.s + 1.0;
    int guard = 0;
    while (psi(hi) >= 0.0) {
        hi += 2.0;
        if (++guard > 64)
            throw StructuralError("fiber_critical_points: no zero beyond the maximum");
    }
    const double d_u = bisect(psi, t_pt.s, hi, psi(t_pt.s), kRootTol);
    if (!(s_pt.s < c_u && c_u < t_pt.s && t_pt.s < d_u))
        throw StructuralError("fiber_critical_points: ordering s_u < c_u < t_u < d_u failed");

    report.critical_points = {s_pt, t_pt};
    report.zeros = {c_u, d_u};
    return report;
}

FiberReport fiber_critical_points(const RadialProfile& u, const ProblemParams& params) {
    // norms_of folds the lazy dilation in, so s is relative to the
    // represented profile, not the stored base samples.
    return fiber_critical_points(norms_of(u, params), params);
}

std::string FiberReport::to_json() const {
    nlohmann::ordered_json j;
    j["regime"] = regime_name(regime);
    j["homogeneous"] = homogeneous;
    j["critical_points"] = nlohmann::ordered_json::array();
    for (const auto& cp : critical_points) {
        nlohmann::ordered_json e;
        e["s"] = cp.s;
        e["kind"] = cp.kind == CriticalPointKind::LocalMin ? "local_min" : "global_max";
        e["level"] = cp.level;
        e["pohozaev_class"] = pohozaev_class_name(cp.pclass);
        j["critical_points"].push_back(e);
    }
    j["zeros"] = zeros;
    return j.dump(2);
}

double h_envelope(const ProblemParams& params, double t) {
    const double g = params.gamma_q();
    const double gq = g * params.q;
    const double ts = params.two_star();
    const double S = sobolev_constant(params.dim);
    const double Cq = std::pow(gn_constant(params.dim, params.q), params.q);
    const double coef = params.mu * Cq / params.q *
                        std::pow(params.mass, (1.0 - g) * params.q);
    return 0.5 * t * t - coef * std::pow(t, gq) -
           std::pow(t, ts) / (ts * std::pow(S, 0.5 * ts));
}

GeometryReport h_geometry(const ProblemParams& params) {
    validate(params);
    if (params.regime() != Regime::Subcritical)
        throw DomainError("h_geometry: subcritical regime only");
    if (!admissible(params)) throw DomainError("h_geometry: parameters not admissible");

    const double g = params.gamma_q();
    const double gq = g * params.q;
    const double ts = params.two_star();
    const double S = sobolev_constant(params.dim);
    const double Cq = std::pow(gn_constant(params.dim, params.q), params.q);
    const double coef = params.mu * Cq / params.q *
                        std::pow(params.mass, (1.0 - g) * params.q);
    const auto h = [&](double t) { return h_envelope(params, t); };
    const auto dh = [&](double t) {
        return t - coef * gq * std::pow(t, gq - 1.0) -
               std::pow(t, ts - 1.0) / std::pow(S, 0.5 * ts);
    };

    // h' changes sign exactly twice on (0, inf): scan log-spaced t.
    std::vector<double> crit;
    const double t_lo = 1e-10, t_hi_scan = 1e6;
    const int n_scan = 4096;
    double prev_t = t_lo, prev_f = dh(t_lo);
    for (int k = 1; k < n_scan; ++k) {
        const double t = t_lo * std::pow(t_hi_scan / t_lo, static_cast<double>(k) / (n_scan - 1));
        const double f = dh(t);
        if ((f > 0.0) != (prev_f > 0.0))
            crit.push_back(bisect(dh, prev_t, t, prev_f, 1e-13 * t));
        prev_t = t;
        prev_f = f;
    }
    if (crit.size() != 2)
        throw StructuralError("h_geometry: expected local min + global max, found " +
                              std::to_string(crit.size()) + " critical points");
    const double t_min = crit[0], t_max = crit[1];
    const double h_min = h(t_min), h_max = h(t_max);
    if (!(h_min < 0.0 && h_max > 0.0))
        throw StructuralError("h_geometry: critical levels violate h(min)<0<h(max)");

    const double R0 = bisect(h, t_min, t_max, h_min, 1e-13 * t_max);
    double hi = 2.0 * t_max;
    int guard = 0;
    while (h(hi) >= 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw StructuralError("h_geometry: no zero beyond the maximum");
    }
    const double R1 = bisect(h, t_max, hi, h_max, 1e-13 * hi);

    GeometryReport rep{R0, R1, t_min, t_max, h_min, h_max};
    if (!(0.0 < rep.R0 && rep.R0 < rep.R1))
        throw StructuralError("h_geometry: zero ordering failed");
    return rep;
}

std::string GeometryReport::to_json() const {
    nlohmann::ordered_json j;
    j["R0"] = R0;
    j["R1"] = R1;
    j["t_local_min"] = t_local_min;
    j["t_global_max"] = t_global_max;
    j["h_min_level"] = h_min_level;
    j["h_max_level"] = h_max_level;
    return j.dump(2);
}

} // namespace critnls
