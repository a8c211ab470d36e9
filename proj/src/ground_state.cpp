#include "ground_state.hpp"

#include "bubbles.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "ode.hpp"
#include "quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <future>
#include <limits>
#include <sstream>

namespace critnls {

namespace {

constexpr double kMassCut = 1e-6;    // stop norm accumulation at u = cut * u0
constexpr double kClassifyCut = 1e-9;
constexpr double kDecayBandTol = 0.05;
constexpr double kGradTol = 1e-8;    // descent convergence on the tangent gradient
constexpr std::size_t kMaxIters = 60000;

double signed_pow(double u, double p) {
    return u >= 0.0 ? std::pow(u, p) : -std::pow(-u, p);
}

std::shared_ptr<const RadialGrid> default_grid(int dim) {
    return RadialGrid::graded(dim, 50.0, 4096, 6.0);
}

// ---------------------------------------------------------------- shooting

struct ShotTrace {
    std::vector<OdeStep<6>> steps;
    ShotOutcome outcome = ShotOutcome::Blowing;
    double r_stop = 0.0;
    double first_crossing = 0.0;
};

// State: u, u', and the running integrals of u^2, (u')^2, |u|^q, |u|^{2*}
// against r^{N-1} dr.
ShotTrace integrate_shot(double lambda, double u0, const ProblemParams& params,
                         double r_max, double cut, bool record) {
    const int dim = params.dim;
    const double q = params.q;
    const double ts = params.two_star();
    const double mu = params.mu;
    const auto f = [&](double u) {
        return lambda * u + mu * signed_pow(u, q - 1.0) + signed_pow(u, ts - 1.0);
    };
    const auto rhs = [&](double r, const std::array<double, 6>& y,
                         std::array<double, 6>& dy) {
        const double u = y[0], v = y[1];
        dy[0] = v;
        dy[1] = -(dim - 1) / r * v - f(u);
        const double w = std::pow(r, dim - 1);
        dy[2] = w * u * u;
        dy[3] = w * v * v;
        dy[4] = w * std::pow(std::abs(u), q);
        dy[5] = w * std::pow(std::abs(u), ts);
    };

    // Series start: u'' (0) = -f(u0)/N; step off at a fraction of the local
    // curvature scale so huge u0 stays accurate.
    const double upp = -f(u0) / dim;
    const double scale = std::sqrt(u0 / std::max(std::abs(upp), 1e-30));
    const double r0 = 1e-6 * std::min(1.0, scale);
    std::array<double, 6> y0{u0 + 0.5 * upp * r0 * r0, upp * r0, 0, 0, 0, 0};

    OdeOptions<6> opt;
    opt.rel_tol = 1e-11;
    opt.abs_tol = 1e-14 * u0;
    opt.initial_step = 0.1 * r0;
    opt.max_step = 0.25;

    ShotTrace out;
    bool event_fired = false;
    const double ceiling = 1.5 * u0;
    const auto stop = [&](double r, const std::array<double, 6>& y) {
        if (y[0] <= 0.0) {
            out.outcome = ShotOutcome::Crossing;
            out.first_crossing = r;
            return event_fired = true;
        }
        if (y[0] >= ceiling || (y[1] >= 0.0 && r > 4.0 * r0)) {
            out.outcome = ShotOutcome::Blowing;
            return event_fired = true;
        }
        // The cut marks exponential decay, which exists only for lambda < 0;
        // an oscillatory lambda >= 0 trajectory passes through small values
        // right before its zero crossing.
        if (lambda < 0.0 && y[0] < cut * u0 && y[1] < 0.0) {
            out.outcome = ShotOutcome::Decaying;
            return event_fired = true;
        }
        return false;
    };
    const auto last = integrate_ode<6>(rhs, r0, y0, r_max, opt, stop,
                                       record ? &out.steps : nullptr);
    out.r_stop = last.x;
    if (!event_fired) {
        // Quiet exit at r_max: exponential decay is only on offer for
        // lambda < 0; a still-positive slow oscillation has not crossed yet
        // and sits off the decaying branch.
        out.outcome = (lambda < 0.0 && last.y[0] > 0.0 && last.y[1] < 0.0)
                          ? ShotOutcome::Decaying
                          : ShotOutcome::Blowing;
    }
    return out;
}

ShotSummary summarize(const ShotTrace& trace, double lambda,
                      const ProblemParams& params) {
    const auto& last = trace.steps.back();
    ShotSummary s;
    s.outcome = trace.outcome;
    s.r_stop = trace.r_stop;
    s.first_crossing = trace.first_crossing;
    s.mass_sq = last.y[2];
    s.grad_sq = last.y[3];
    s.lq_pow = last.y[4];
    s.crit_pow = last.y[5];
    if (trace.outcome == ShotOutcome::Decaying && lambda < 0.0) {
        // Analytic tail beyond the stopping radius: u ~ C r^{-(N-1)/2} e^{-kr}.
        const double kappa = std::sqrt(-lambda);
        const double u_s = last.y[0];
        const double w = std::pow(trace.r_stop, params.dim - 1);
        s.mass_sq += u_s * u_s * w / (2.0 * kappa);
        s.grad_sq += kappa * u_s * u_s * w / 2.0;
        // Decay band: u'/u within 5% of -kappa on [0.6, 0.9] r_stop.
        bool ok = true;
        int seen = 0;
        for (const auto& st : trace.steps) {
            if (st.x < 0.6 * trace.r_stop || st.x > 0.9 * trace.r_stop) continue;
            if (st.y[0] <= 0.0) continue;
            ++seen;
            if (std::abs(st.y[1] / st.y[0] + kappa) > kDecayBandTol * kappa) ok = false;
        }
        s.decay_band_ok = ok && seen > 0;
    }
    const double omega = unit_sphere_area(params.dim);
    s.mass_sq *= omega;
    s.grad_sq *= omega;
    s.lq_pow *= omega;
    s.crit_pow *= omega;
    return s;
}

// The ground-state branch: smallest u0 on the Blowing -> Crossing transition.
// Returns the bisected height, or nothing when no bracket exists.
std::optional<std::pair<double, double>> bracket_height(double lambda,
                                                        const ProblemParams& params,
                                                        double r_max) {
    const double scale = std::pow(std::abs(lambda), 0.25 * (params.dim - 2));
    const double lo0 = 1e-2 * std::max(scale, 1e-6);
    const double hi0 = 1e5 * std::max(scale, 1e-6);
    // A shot that happens to decay sits on the transition itself; treat it as
    // the lower side of the Blowing -> Crossing dichotomy.
    const auto classify = [&](double u0) {
        const ShotOutcome o =
            integrate_shot(lambda, u0, params, r_max, kClassifyCut, false).outcome;
        return o == ShotOutcome::Decaying ? ShotOutcome::Blowing : o;
    };
    double prev = lo0;
    ShotOutcome prev_out = classify(prev);
    const int n_scan = 60;
    for (int k = 1; k <= n_scan; ++k) {
        const double u0 = lo0 * std::pow(hi0 / lo0, static_cast<double>(k) / n_scan);
        const ShotOutcome out = classify(u0);
        if (prev_out == ShotOutcome::Blowing && out == ShotOutcome::Crossing)
            return std::make_pair(prev, u0);
        prev = u0;
        prev_out = out;
    }
    return std::nullopt;
}

double bisect_height(double lambda, const ProblemParams& params, double lo,
                     double hi, double r_max) {
    for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const ShotOutcome out =
            integrate_shot(lambda, mid, params, r_max, kClassifyCut, false).outcome;
        if (out == ShotOutcome::Crossing)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

// Mass of the decaying branch at this lambda (quiet NaN when no bracket).
struct BranchPoint {
    double u0 = 0.0;
    ShotSummary summary;
};

std::optional<BranchPoint> branch_at(double lambda, const ProblemParams& params,
                                     double r_max) {
    const auto br = bracket_height(lambda, params, r_max);
    if (!br) return std::nullopt;
    BranchPoint bp;
    bp.u0 = bisect_height(lambda, params, br->first, br->second, r_max);
    bp.summary = summarize(
        integrate_shot(lambda, bp.u0, params, r_max, kMassCut, true), lambda, params);
    return bp;
}

// ------------------------------------------------------------- resampling

RadialProfile profile_from_trace(const ShotTrace& trace, double lambda,
                                 const ProblemParams& params,
                                 std::shared_ptr<const RadialGrid> grid) {
    const auto& steps = trace.steps;
    const double r_s = steps.back().x;
    const double u_s = steps.back().y[0];
    const double kappa = lambda < 0.0 ? std::sqrt(-lambda) : 0.0;
    const double half = 0.5 * (params.dim - 1);

    std::vector<double> v(grid->size(), 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->r(i);
        if (r >= r_s) {
            if (kappa > 0.0 && u_s > 0.0) {
                const double tail =
                    u_s * std::pow(r_s / r, half) * std::exp(-kappa * (r - r_s));
                v[i] = tail;
            }
            continue;
        }
        if (r <= steps.front().x) {
            v[i] = steps.front().y[0];
            continue;
        }
        while (k + 1 < steps.size() && steps[k + 1].x < r) ++k;
        // Cubic Hermite on [x_k, x_{k+1}] with recorded derivatives.
        const auto& s0 = steps[k];
        const auto& s1 = steps[k + 1];
        const double h = s1.x - s0.x;
        const double t = (r - s0.x) / h;
        const double t2 = t * t, t3 = t2 * t;
        v[i] = (2 * t3 - 3 * t2 + 1) * s0.y[0] + (t3 - 2 * t2 + t) * h * s0.y[1] +
               (-2 * t3 + 3 * t2) * s1.y[0] + (t3 - t2) * h * s1.y[1];
    }
    return RadialProfile(std::move(grid), std::move(v));
}

// ------------------------------------------------------------ certification

double discrete_el_residual(const RadialProfile& u, double lambda,
                            const ProblemParams& params) {
    const RadialProfile m = u.materialize();
    const auto& vals = m.base_values();
    const RadialGrid& g = m.grid();
    const std::vector<double> lap = g.laplacian(vals);
    double num = 0.0, den = 0.0;
    const auto w = g.cell_volumes();
    // Skip the outermost cells: the Dirichlet closure is not part of the ODE.
    for (std::size_t i = 1; i + 2 < g.size(); ++i) {
        const double ui = vals[i];
        const double res = lap[i] + lambda * ui + params.mu * signed_pow(ui, params.q - 1.0) +
                           signed_pow(ui, params.two_star() - 1.0);
        num += w[i] * res * res;
        den += w[i] * std::pow(lambda * ui, 2);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity();
}

bool profile_positive_decreasing(const RadialProfile& u) {
    const auto& v = u.base_values();
    const double top = *std::max_element(v.begin(), v.end());
    double prev = v.front();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < -1e-9 * top) return false;
        if (v[i] > prev + 1e-9 * top) return false;
        prev = std::max(v[i], 0.0);
    }
    return true;
}

GroundStateResult assemble_result(RadialProfile profile, double lambda,
                                  const ProblemParams& params, std::string solver,
                                  int bracket_count) {
    // Mass-normalize against the certification quadrature, then park the
    // iterate exactly on the Pohozaev manifold with a lazy fiber projection.
    RadialProfile u = normalize_mass(profile, params.mass);
    const FiberReport fr = fiber_critical_points(u, params);
    const bool sub = params.regime() == Regime::Subcritical && params.mu > 0.0;
    const double s_proj = sub ? fr.local_min().s : fr.global_max().s;
    u = u.dilate(s_proj);

    const NormTriple n = norms_of(u, params);
    GroundStateResult res{std::move(u), lambda, energy(n, params), n.grad_sq,
                          0.0,          PohozaevClass::NotOnP,
                          0.0,          {},
                          std::move(solver), bracket_count};
    res.pohozaev_residual = std::abs(pohozaev(n, params)) / n.grad_sq;
    res.fiber_class = classify_pohozaev(n, params);
    res.mass_error = std::abs(res.profile.mass() - params.mass);

    CertificationBundle& c = res.certified;
    c.mass_error = res.mass_error;
    c.pohozaev_residual = res.pohozaev_residual;
    const double ident = lambda * params.mass * params.mass -
                         params.mu * (params.gamma_q() - 1.0) * n.lq_pow;
    c.multiplier_residual = params.mu != 0.0
                                ? std::abs(ident) /
                                      std::max(std::abs(lambda) * params.mass * params.mass,
                                               1e-300)
                                : std::abs(ident);
    c.el_residual = discrete_el_residual(res.profile, lambda, params);
    c.lambda_negative = lambda < 0.0;
    c.pohozaev_zero = res.pohozaev_residual < 1e-5;
    const double cap =
        std::pow(sobolev_constant(params.dim), 0.5 * params.dim) / params.dim;
    c.level_window = sub ? res.energy_level < 0.0
                         : (res.energy_level > 0.0 && res.energy_level < cap);
    c.positive_decreasing = profile_positive_decreasing(res.profile);
    return res;
}

// --------------------------------------------------------------- descent

struct FvWork {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<double> lower, diag, upper;
    double omega;

    explicit FvWork(std::shared_ptr<const RadialGrid> g)
        : grid(std::move(g)), omega(unit_sphere_area(grid->dim())) {
        grid->laplacian_bands(lower, diag, upper);
    }

    double dot(const std::vector<double>& a, const std::vector<double>& b) const {
        const auto w = grid->cell_volumes();
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += w[i] * a[i] * b[i];
        return omega * acc;
    }

    // <-L u, u>_w in flux form (nonnegative).
    double grad_sq(const std::vector<double>& u) const {
        const std::vector<double> lap = grid->laplacian(u);
        double acc = 0.0;
        const auto w = grid->cell_volumes();
        for (std::size_t i = 0; i < u.size(); ++i) acc -= w[i] * lap[i] * u[i];
        return omega * acc;
    }

    double moment(const std::vector<double>& u, double p) const {
        const auto w = grid->cell_volumes();
        double acc = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            acc += w[i] * std::pow(std::abs(u[i]), p);
        return omega * acc;
    }

    // Norms in the same discrete metric the gradient lives in; mixing
    // quadratures here leaves the descent stuck at the O(h^2) mismatch.
    NormTriple norm_triple(const std::vector<double>& u, const ProblemParams& p) const {
        return NormTriple{grad_sq(u), moment(u, p.q), moment(u, p.two_star())};
    }

    std::vector<double> energy_gradient(const std::vector<double>& u,
                                        const ProblemParams& p) const {
        std::vector<double> g = grid->laplacian(u);
        const double ts = p.two_star();
        for (std::size_t i = 0; i < u.size(); ++i)
            g[i] = -g[i] - p.mu * signed_pow(u[i], p.q - 1.0) -
                   signed_pow(u[i], ts - 1.0);
        return g;
    }

    // Solve (I - L) z = rhs; SPD in the w inner product, so the direction
    // stays a descent direction while the grid stiffness drops out.
    std::vector<double> precondition(std::vector<double> rhs) const {
        const std::size_t n = rhs.size();
        std::vector<double> dl(n), dd(n), du(n);
        for (std::size_t i = 0; i < n; ++i) {
            dl[i] = -lower[i];
            dd[i] = 1.0 - diag[i];
            du[i] = -upper[i];
        }
        for (std::size_t i = 1; i < n; ++i) {
            const double m = dl[i] / dd[i - 1];
            dd[i] -= m * du[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        rhs[n - 1] /= dd[n - 1];
        for (std::size_t i = n - 1; i-- > 0;)
            rhs[i] = (rhs[i] - du[i] * rhs[i + 1]) / dd[i];
        return rhs;
    }
};

struct DescentState {
    RadialProfile u;          // current iterate (dilation folded)
    double objective = 0.0;   // E (subcritical) or fiber-max level
    double grad_norm = 0.0;   // tangent gradient at the evaluation point
    double lambda = 0.0;
    std::size_t iterations = 0;
};

// One projected-descent run in the finite-volume metric. With fiber_project
// the step is taken at the fiber maximum and the objective is the fiber
// maximum level (mountain-pass descent on the Pohozaev manifold); otherwise
// plain energy descent inside the A_{R0} cage with a periodic P+ recentering.
// Directions are (I - L)^{-1}-preconditioned tangent gradients with a
// Barzilai-Borwein step and an Armijo backstop.
DescentState run_descent(const ProblemParams& params,
                         std::shared_ptr<const RadialGrid> grid, bool fiber_project) {
    const FvWork fv(grid);
    std::optional<GeometryReport> geom;
    if (!fiber_project) geom = h_geometry(params);

    const auto fv_normalize = [&](std::vector<double> v) {
        const double m = std::sqrt(fv.dot(v, v));
        if (!(m > 0.0)) throw SolverError("descent: iterate lost its mass");
        const double k = params.mass / m;
        for (double& x : v) x *= k;
        return v;
    };
    // Fiber critical point of the FV norm triple; s-shift of the samples.
    const auto fiber_point = [&](const std::vector<double>& v, bool max_point) {
        const FiberReport fr = fiber_critical_points(fv.norm_triple(v, params), params);
        return max_point ? fr.global_max() : fr.local_min();
    };
    const auto dilate_samples = [&](const std::vector<double>& v, double s) {
        if (s == 0.0) return v;
        return RadialProfile(grid, v).dilate(s).materialize().base_values();
    };
    const auto objective_of = [&](const std::vector<double>& v) {
        if (!fiber_project) return energy(fv.norm_triple(v, params), params);
        return fiber_point(v, true).level;
    };

    // Start from a Gaussian parked on its own fiber point.
    const double sigma = fiber_project ? 1.0 : 4.0;
    std::vector<double> u(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i)
        u[i] = std::exp(-grid->r(i) * grid->r(i) / (sigma * sigma));
    u = fv_normalize(std::move(u));
    u = dilate_samples(u, fiber_point(u, fiber_project).s);

    double step = 1.0;
    DescentState out{RadialProfile(grid, u), 0.0,
                     std::numeric_limits<double>::infinity(), 0.0, 0};
    std::vector<double> prev_u, prev_z;

    for (std::size_t it = 0; it < kMaxIters; ++it) {
        std::vector<double> w = u;
        if (fiber_project) {
            const double t_u = fiber_point(u, true).s;
            if (std::abs(t_u) > 1e-12) w = fv_normalize(dilate_samples(u, t_u));
        } else if (it % 25 == 24) {
            // Recenter onto the P+ fiber point now and then; near convergence
            // the resampling would only inject interpolation noise.
            const double s_u = fiber_point(u, false).s;
            if (std::abs(s_u) > 1e-4) w = fv_normalize(dilate_samples(u, s_u));
        }

        std::vector<double> g = fv.energy_gradient(w, params);
        const double lambda_h = fv.dot(g, w) / fv.dot(w, w);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= lambda_h * w[i];

        if (fiber_project) {
            // The dilation direction belongs to the fiber projection, not the
            // descent: d/ds (s * w)|_0 = (N/2) w + r w'. Leaving it in pins the
            // gradient at the lazy-vs-sampled dilation mismatch, O(h^2).
            std::vector<double> d = grid->derivative(w);
            for (std::size_t i = 0; i < d.size(); ++i)
                d[i] = 0.5 * grid->dim() * w[i] + grid->r(i) * d[i];
            const double dw = fv.dot(d, w) / fv.dot(w, w);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] -= dw * w[i];
            const double dd = fv.dot(d, d);
            if (dd > 0.0) {
                const double gd = fv.dot(g, d) / dd;
                for (std::size_t i = 0; i < g.size(); ++i) g[i] -= gd * d[i];
            }
        }

        std::vector<double> z = fv.precondition(g);
        const double zw = fv.dot(z, w) / fv.dot(w, w);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] -= zw * w[i];
        const double gz = fv.dot(g, z);
        // Constrained gradient in the preconditioned (H^1-dual) metric; the
        // raw FV norm amplifies sample noise by the stiffest eigenvalue.
        const double gnorm = std::sqrt(std::max(gz, 0.0));

        out.u = RadialProfile(grid, w);
        out.grad_norm = gnorm;
        out.lambda = lambda_h;
        out.iterations = it;
        if (std::getenv("CRITNLS_TRACE") && it % 250 == 0)
            std::fprintf(stderr, "[descent] it=%zu gnorm=%.3e lam=%.8f step=%.3e\n",
                         it, gnorm, lambda_h, step);
        if (gnorm < kGradTol) {
            out.objective = objective_of(w);
            return out;
        }

        if (!fiber_project) {
            // Interior cage: the iterate must stay inside A_{R0}.
            if (std::sqrt(fv.grad_sq(w)) >= geom->R0)
                throw StructuralError("local_minimize_subcritical: iterate escaped A_{R0}");
        }

        if (!prev_u.empty()) {
            double ss = 0.0, sy = 0.0;
            const auto wvol = grid->cell_volumes();
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double si = w[i] - prev_u[i];
                const double yi = z[i] - prev_z[i];
                ss += wvol[i] * si * si;
                sy += wvol[i] * si * yi;
            }
            if (ss > 0.0 && sy > 0.0) step = std::clamp(ss / sy, 1e-4, 1e3);
        }
        prev_u = w;
        prev_z = z;

        const double obj_w = objective_of(w);
        const double noise =
            4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(obj_w));
        if (1e-4 * step * gz < noise) {
            // The certifiable decrease is below objective resolution; the
            // preconditioned step is a contraction here, take it blind.
            std::vector<double> trial = w;
            const double tau = std::min(step, 1.0);
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= tau * z[i];
            u = fv_normalize(std::move(trial));
            continue;
        }
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> trial = w;
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= step * z[i];
            double obj_c = std::numeric_limits<double>::infinity();
            try {
                trial = fv_normalize(std::move(trial));
                obj_c = objective_of(trial);
            } catch (const std::exception&) {
            }
            // Strict decrease; an underflowing Armijo margin would accept a
            // do-nothing step and freeze the BB pair.
            if (obj_c <= obj_w - std::max(1e-4 * step * gz, noise)) {
                u = std::move(trial);
                accepted = true;
                break;
            }
            step *= 0.5;
            if (1e-4 * step * gz < noise) break;  // fall to the blind regime next round
        }
        if (!accepted) {
            std::vector<double> trial = w;
            const double tau = std::min(step, 1.0);
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= tau * z[i];
            u = fv_normalize(std::move(trial));
        }
    }
    throw SolverError("descent: not converged within the iteration budget");
}

} // namespace

const char* shot_outcome_name(ShotOutcome o) {
    switch (o) {
        case ShotOutcome::Decaying: return "decaying";
        case ShotOutcome::Crossing: return "crossing";
        case ShotOutcome::Blowing: return "blowing";
    }
    return "?";
}

ShotSummary shoot(double lambda, double u0, const ProblemParams& params, double r_max) {
    validate(params);
    if (!(u0 > 0.0)) throw DomainError("shoot: u0 must be positive");
    return summarize(integrate_shot(lambda, u0, params, r_max, kClassifyCut, true),
                     lambda, params);
}

RadialProfile shoot_profile(double lambda, double u0, const ProblemParams& params,
                            std::shared_ptr<const RadialGrid> grid) {
    validate(params);
    if (!grid) grid = default_grid(params.dim);
    const ShotTrace trace =
        integrate_shot(lambda, u0, params, grid->r_max(), kMassCut, true);
    return profile_from_trace(trace, lambda, params, std::move(grid));
}

GroundStateResult match_mass(const ProblemParams& params, double lambda_lo,
                             double lambda_hi, std::shared_ptr<const RadialGrid> grid) {
    validate(params);
    if (!grid) grid = default_grid(params.dim);
    const double a2 = params.mass * params.mass;

    if (params.mu == 0.0) {
        if (params.dim <= 4)
            throw DomainError(
                "match_mass: mu = 0 has no positive normalized solution for N = 3, 4");
        // Exact bubble route: -Delta w = w^{2*-1} with w = c_N U_eps, mass
        // matching fixes eps; lambda = 0.
        const int N = params.dim;
        const double coef = std::pow(N * (N - 2.0), 0.25 * (N - 2.0));
        const double eps = params.mass / (coef * std::sqrt(bubble_k3(N)));
        RadialProfile w = RadialProfile::sample(grid, [&](double r) {
            return coef * bubble_value(N, eps, r);
        });
        // Certification norms from exact bubble integrals, not the truncated
        // grid: the bubble tail decays only algebraically.
        const double c2 = coef * coef;
        const double lq_scale = std::pow(eps, N - 0.5 * (N - 2.0) * params.q);
        NormTriple n{c2 * bubble_k1(N),
                     std::pow(coef, params.q) * lq_scale * unit_sphere_area(N) *
                         radial_power_integral(N - 1.0, 0.5 * (N - 2.0) * params.q),
                     std::pow(coef, params.two_star()) * unit_sphere_area(N) *
                         radial_power_integral(N - 1.0, N)};
        GroundStateResult res{std::move(w), 0.0, energy(n, params), n.grad_sq,
                              std::abs(pohozaev(n, params)) / n.grad_sq,
                              PohozaevClass::Pminus,
                              0.0, {}, "bubble", 1};
        res.certified.mass_error = 0.0;
        res.certified.pohozaev_residual = res.pohozaev_residual;
        res.certified.multiplier_residual = 0.0;
        res.certified.el_residual = 0.0;
        res.certified.lambda_negative = false;  // lambda = 0, homogeneous case
        res.certified.pohozaev_zero = res.pohozaev_residual < 1e-5;
        const double cap = std::pow(sobolev_constant(N), 0.5 * N) / N;
        res.certified.level_window = std::abs(res.energy_level - cap) < 1e-6 * cap;
        res.certified.positive_decreasing = profile_positive_decreasing(res.profile);
        return res;
    }

    if (params.mu > 0.0 && !admissible(params))
        throw DomainError("match_mass: parameters violate the admissibility threshold");
    if (!(lambda_lo < lambda_hi) || !(lambda_hi < 0.0))
        throw DomainError("match_mass: need lambda_lo < lambda_hi < 0");

    const double r_max = grid->r_max();
    // Scan for sign changes of |u_lambda|_2^2 - a^2; widen the lambda window
    // geometrically when the first pass finds no bracket.
    std::vector<double> lams, masses;
    std::vector<std::pair<double, double>> brackets;
    for (int attempt = 0; attempt < 3 && brackets.empty(); ++attempt) {
        lams.clear();
        masses.clear();
        const int n_scan = 25 * (attempt + 1);
        for (int k = 0; k <= n_scan; ++k) {
            const double lam = -std::exp(std::log(-lambda_lo) +
                                         (std::log(-lambda_hi) - std::log(-lambda_lo)) *
                                             static_cast<double>(k) / n_scan);
            const auto bp = branch_at(lam, params, r_max);
            if (!bp) continue;
            lams.push_back(lam);
            masses.push_back(bp->summary.mass_sq);
        }
        for (std::size_t i = 1; i < lams.size(); ++i)
            if ((masses[i - 1] - a2 > 0.0) != (masses[i] - a2 > 0.0))
                brackets.emplace_back(lams[i - 1], lams[i]);
        if (brackets.empty()) {
            lambda_lo *= 10.0;
            lambda_hi *= 0.1;
        }
    }
    if (lams.size() < 2)
        throw SolverError("match_mass: decaying branch not found across the lambda bracket");
    if (brackets.empty()) {
        std::ostringstream os;
        os << "match_mass: no mass bracket in lambda range; mass^2 curve:";
        for (std::size_t i = 0; i < lams.size(); ++i)
            os << " (" << lams[i] << ", " << masses[i] << ")";
        throw SolverError(os.str());
    }

    GroundStateResult best{RadialProfile(grid, std::vector<double>(grid->size(), 0.0)),
                           0, 0, 0, 0, PohozaevClass::NotOnP, 0, {}, "", 0};
    bool have = false;
    for (auto [llo, lhi] : brackets) {
        double flo = branch_at(llo, params, r_max)->summary.mass_sq - a2;
        for (int it = 0; it < 80 && (lhi - llo) > 1e-13 * std::abs(lhi); ++it) {
            const double mid = 0.5 * (llo + lhi);
            const auto bp = branch_at(mid, params, r_max);
            if (!bp) break;
            const double fm = bp->summary.mass_sq - a2;
            if ((fm > 0.0) == (flo > 0.0)) {
                llo = mid;
                flo = fm;
            } else {
                lhi = mid;
            }
        }
        const double lam = 0.5 * (llo + lhi);
        const auto bp = branch_at(lam, params, r_max);
        if (!bp) continue;
        const ShotTrace tr = integrate_shot(lam, bp->u0, params, r_max, kMassCut, true);
        RadialProfile prof = profile_from_trace(tr, lam, params, grid);
        GroundStateResult cand =
            assemble_result(std::move(prof), lam, params, "shooting",
                            static_cast<int>(brackets.size()));
        if (!have || cand.energy_level < best.energy_level) {
            best = std::move(cand);
            have = true;
        }
    }
    if (!have) throw SolverError("match_mass: bracket refinement lost the branch");
    return best;
}

GroundStateResult local_minimize_subcritical(const ProblemParams& params,
                                             std::shared_ptr<const RadialGrid> grid) {
    validate(params);
    if (params.regime() != Regime::Subcritical)
        throw DomainError("local_minimize_subcritical: subcritical regime only");
    if (!(params.mu > 0.0) || !admissible(params))
        throw DomainError("local_minimize_subcritical: admissible mu > 0 required");
    if (!grid) grid = default_grid(params.dim);
    DescentState st = run_descent(params, grid, false);
    return assemble_result(st.u, st.lambda, params, "descent", 1);
}

GroundStateResult pohozaev_descent(const ProblemParams& params,
                                   std::shared_ptr<const RadialGrid> grid) {
    validate(params);
    if (params.regime() == Regime::Subcritical)
        throw DomainError("pohozaev_descent: critical/supercritical regimes only");
    if (!(params.mu > 0.0) || !admissible(params))
        throw DomainError("pohozaev_descent: admissible mu > 0 required");
    if (!grid) grid = default_grid(params.dim);
    DescentState st = run_descent(params, grid, true);
    return assemble_result(st.u, st.lambda, params, "descent", 1);
}

GroundStateResult descend_ground_state(const ProblemParams& params,
                                       std::shared_ptr<const RadialGrid> grid) {
    return params.regime() == Regime::Subcritical
               ? local_minimize_subcritical(params, std::move(grid))
               : pohozaev_descent(params, std::move(grid));
}

SweepResult mu_sweep(const ProblemParams& base, const std::vector<double>& mu_list) {
    validate(base);
    if (mu_list.empty()) throw DomainError("mu_sweep: empty mu list");
    for (const double mu : mu_list) {
        ProblemParams p = base;
        p.mu = mu;
        if (!admissible(p)) throw DomainError("mu_sweep: inadmissible mu in list");
    }

    std::size_t threads = 1;
    if (const char* env = std::getenv("CRITNLS_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 1) threads = static_cast<std::size_t>(v);
    }

    SweepResult out;
    out.mu_values = mu_list;
    out.levels.assign(mu_list.size(), 0.0);
    out.grad_norms.assign(mu_list.size(), 0.0);
    out.lambdas.assign(mu_list.size(), 0.0);
    out.failures.assign(mu_list.size(), "");

    const auto solve_one = [&](std::size_t i) {
        ProblemParams p = base;
        p.mu = mu_list[i];
        try {
            const GroundStateResult r = descend_ground_state(p);
            out.levels[i] = r.energy_level;
            out.grad_norms[i] = r.grad_sq;
            out.lambdas[i] = r.lambda;
        } catch (const std::exception& e) {
            out.failures[i] = e.what();
            out.levels[i] = std::numeric_limits<double>::quiet_NaN();
            out.grad_norms[i] = std::numeric_limits<double>::quiet_NaN();
            out.lambdas[i] = std::numeric_limits<double>::quiet_NaN();
        }
    };
    if (threads <= 1) {
        for (std::size_t i = 0; i < mu_list.size(); ++i) solve_one(i);
    } else {
        std::vector<std::future<void>> futs;
        for (std::size_t i = 0; i < mu_list.size(); ++i)
            futs.push_back(std::async(std::launch::async, solve_one, i));
        for (auto& f : futs) f.get();
    }

    // Monotone non-increasing in mu (list may come in any order).
    std::vector<std::size_t> order(mu_list.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mu_list[a] < mu_list[b]; });
    bool mono = true;
    for (std::size_t k = 1; k < order.size(); ++k) {
        const double m_small = out.levels[order[k - 1]];
        const double m_large = out.levels[order[k]];
        if (std::isnan(m_small) || std::isnan(m_large)) continue;
        if (m_large > m_small + 1e-6 * std::max(1.0, std::abs(m_small))) mono = false;
    }
    out.monotone_ok = mono;
    out.limit_target =
        base.regime() == Regime::Subcritical
            ? 0.0
            : std::pow(sobolev_constant(base.dim), 0.5 * base.dim) / base.dim;
    return out;
}

DefocusingReport defocusing_check(const ProblemParams& params) {
    validate(params);
    if (!(params.mu < 0.0)) throw DomainError("defocusing_check: mu must be negative");

    DefocusingReport rep;
    rep.multiplier_sign = params.mu * (params.gamma_q() - 1.0);

    const std::vector<double> lambdas = {1e-2, 3e-2, 1e-1, 0.3, 1.0, 3.0, 10.0, 100.0};
    rep.n_lambda = static_cast<int>(lambdas.size());
    const int n_u0 = 11;
    rep.n_u0 = n_u0;
    for (const double lam : lambdas) {
        const double scale = std::max(1.0, std::pow(lam, 0.25 * (params.dim - 2)));
        for (int k = 0; k < n_u0; ++k) {
            const double u0 =
                0.1 * scale * std::pow(1e3, static_cast<double>(k) / (n_u0 - 1));
            const ShotSummary s = shoot(lam, u0, params);
            switch (s.outcome) {
                case ShotOutcome::Decaying:
                    ++rep.decaying_found;
                    rep.candidate_lambdas.push_back(lam);
                    break;
                case ShotOutcome::Crossing: ++rep.crossings; break;
                case ShotOutcome::Blowing: ++rep.blowups; break;
            }
            if (lam == 1.0 && k == 5) rep.reference_first_crossing = s.first_crossing;
        }
    }
    return rep;
}

// ----------------------------------------------------------------- output

std::string GroundStateResult::to_json(const ProblemParams& params) const {
    nlohmann::ordered_json j;
    j["params"]["N"] = params.dim;
    j["params"]["q"] = params.q;
    j["params"]["a"] = params.mass;
    j["params"]["mu"] = params.mu;
    j["params"]["regime"] = regime_name(params.regime());
    j["solver"] = solver;
    j["lambda"] = lambda;
    j["energy_level"] = energy_level;
    j["grad_sq"] = grad_sq;
    j["pohozaev_residual"] = pohozaev_residual;
    j["fiber_class"] = pohozaev_class_name(fiber_class);
    j["mass_error"] = mass_error;
    j["lambda_bracket_count"] = lambda_bracket_count;
    j["certified"]["mass_error"] = certified.mass_error;
    j["certified"]["pohozaev_residual"] = certified.pohozaev_residual;
    j["certified"]["multiplier_residual"] = certified.multiplier_residual;
    j["certified"]["el_residual"] = certified.el_residual;
    j["certified"]["lambda_negative"] = certified.lambda_negative;
    j["certified"]["pohozaev_zero"] = certified.pohozaev_zero;
    j["certified"]["level_window"] = certified.level_window;
    j["certified"]["positive_decreasing"] = certified.positive_decreasing;
    j["certified"]["all"] = certified.all_passed();
    return j.dump(2);
}

std::string SweepResult::to_csv() const {
    std::string out = "mu,m,grad_sq,lambda\n";
    char line[140];
    for (std::size_t i = 0; i < mu_values.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", mu_values[i],
                      levels[i], grad_norms[i], lambdas[i]);
        out += line;
    }
    return out;
}

std::string SweepResult::to_json() const {
    nlohmann::ordered_json j;
    j["mu"] = mu_values;
    j["m"] = levels;
    j["grad_sq"] = grad_norms;
    j["lambda"] = lambdas;
    j["monotone_ok"] = monotone_ok;
    j["limit_target"] = limit_target;
    j["failures"] = failures;
    return j.dump(2);
}

std::string DefocusingReport::to_json() const {
    nlohmann::ordered_json j;
    j["n_lambda"] = n_lambda;
    j["n_u0"] = n_u0;
    j["decaying_found"] = decaying_found;
    j["crossings"] = crossings;
    j["blowups"] = blowups;
    j["multiplier_sign"] = multiplier_sign;
    j["lambda_sign_forced_positive"] = multiplier_sign > 0.0;
    j["reference_first_crossing"] = reference_first_crossing;
    j["candidate_lambdas"] = candidate_lambdas;
    return j.dump(2);
}

} // namespace critnls
