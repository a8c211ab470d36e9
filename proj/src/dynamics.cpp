#include "dynamics.hpp"

#include "constants.hpp"
#include "errors.hpp"
#include "fiber.hpp"
#include "ground_state.hpp"
#include "quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace critnls {

namespace {

using cdouble = std::complex<double>;

// Tridiagonal Thomas solve, complex in place.
void solve_tridiag(const std::vector<cdouble>& lower, std::vector<cdouble> diag,
                   const std::vector<cdouble>& upper, std::vector<cdouble>& rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t i = 1; i < n; ++i) {
        const cdouble m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

struct Stepper {
    const RadialGrid& grid;
    const ProblemParams& params;
    double omega;
    std::vector<double> l_lower, l_diag, l_upper;

    Stepper(const RadialGrid& g, const ProblemParams& p)
        : grid(g), params(p), omega(unit_sphere_area(g.dim())) {
        g.laplacian_bands(l_lower, l_diag, l_upper);
    }

    // One Crank-Nicolson substep of size tau: (I - i tau/2 L) psi1 = (I + i tau/2 L) psi.
    void linear_substep(std::vector<cdouble>& psi, double tau) const {
        const std::size_t n = psi.size();
        const cdouble ih(0.0, 0.5 * tau);
        std::vector<cdouble> rhs(n), lo(n), di(n), up(n);
        for (std::size_t i = 0; i < n; ++i) {
            cdouble acc = psi[i] * (1.0 + ih * l_diag[i]);
            if (i > 0) acc += ih * l_lower[i] * psi[i - 1];
            if (i + 1 < n) acc += ih * l_upper[i] * psi[i + 1];
            rhs[i] = acc;
            lo[i] = i > 0 ? -ih * l_lower[i] : cdouble(0.0);
            di[i] = 1.0 - ih * l_diag[i];
            up[i] = i + 1 < n ? -ih * l_upper[i] : cdouble(0.0);
        }
        solve_tridiag(lo, std::move(di), up, rhs);
        psi = std::move(rhs);
    }

    void nonlinear_rotation(std::vector<cdouble>& psi, double dt) const {
        const double q = params.q;
        const double ts = params.two_star();
        const double mu = params.mu;
        for (auto& z : psi) {
            const double amp = std::abs(z);
            if (amp == 0.0) continue;
            const double phase =
                dt * (mu * std::pow(amp, q - 2.0) + std::pow(amp, ts - 2.0));
            z *= cdouble(std::cos(phase), std::sin(phase));
        }
    }

    void strang_step(std::vector<cdouble>& psi, double dt, bool linear_only) const {
        linear_substep(psi, 0.5 * dt);
        if (!linear_only) nonlinear_rotation(psi, dt);
        linear_substep(psi, 0.5 * dt);
    }

    double grad_sq(const std::vector<cdouble>& psi) const {
        // <-L psi, psi>_w: flux form, real by symmetry.
        const std::size_t n = psi.size();
        const auto w = grid.cell_volumes();
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cdouble lp = l_diag[i] * psi[i];
            if (i > 0) lp += l_lower[i] * psi[i - 1];
            if (i + 1 < n) lp += l_upper[i] * psi[i + 1];
            acc -= w[i] * std::real(std::conj(psi[i]) * lp);
        }
        return omega * acc;
    }

    double moment(const std::vector<cdouble>& psi, double p) const {
        const auto w = grid.cell_volumes();
        double acc = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i)
            acc += w[i] * std::pow(std::abs(psi[i]), p);
        return omega * acc;
    }

    double virial(const std::vector<cdouble>& psi) const {
        const auto w = grid.cell_volumes();
        double acc = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double r = grid.r(i);
            acc += w[i] * r * r * std::norm(psi[i]);
        }
        return omega * acc;
    }
};

} // namespace

WaveState WaveState::from_profile(const RadialProfile& u) {
    const RadialProfile m = u.materialize();
    WaveState st;
    st.grid = m.grid_ptr();
    st.psi.reserve(m.base_values().size());
    for (const double v : m.base_values()) st.psi.emplace_back(v, 0.0);
    st.time = 0.0;
    return st;
}

WaveDiagnostics diagnose(const WaveState& state, const ProblemParams& params) {
    const Stepper s(*state.grid, params);
    WaveDiagnostics d;
    d.t = state.time;
    d.mass = s.moment(state.psi, 2.0);
    const double g = s.grad_sq(state.psi);
    const double lq = s.moment(state.psi, params.q);
    const double lts = s.moment(state.psi, params.two_star());
    d.grad_norm = std::sqrt(g);
    d.energy = 0.5 * g - lts / params.two_star() - params.mu / params.q * lq;
    d.virial = s.virial(state.psi);
    d.pohozaev = g - lts - params.mu * params.gamma_q() * lq;
    return d;
}

Trajectory propagate(const WaveState& psi0, double dt, double t_end,
                     const ProblemParams& params, PropagateOptions opts) {
    validate(params);
    if (!(dt > 0.0)) throw DomainError("propagate: dt must be positive");
    if (!(t_end > 0.0)) throw DomainError("propagate: t_end must be positive");

    const Stepper stepper(*psi0.grid, params);
    Trajectory out{{}, psi0, false, ""};
    out.final_state.time = psi0.time;

    WaveDiagnostics d0 = diagnose(out.final_state, params);
    out.series.push_back(d0);
    const double grad0 = d0.grad_norm;
    const double dt_min = dt / std::pow(2.0, opts.max_dt_halvings);
    double last_record = d0.t;

    double h = dt;
    double prev_grad = grad0;
    while (out.final_state.time < psi0.time + t_end - 1e-12) {
        std::vector<cdouble> trial = out.final_state.psi;
        stepper.strang_step(trial, h, opts.linear_only);

        double g = std::sqrt(std::max(stepper.grad_sq(trial), 0.0));
        const bool bad = !std::isfinite(g) ||
                         (g > prev_grad * (1.0 + opts.growth_trigger) && !opts.linear_only);
        if (bad && h > dt_min) {
            h *= 0.5;  // too fast for this step size; retry finer
            continue;
        }
        if (!std::isfinite(g)) {
            out.halted = true;
            out.halt_reason = "instability: non-finite gradient at dt floor";
            break;
        }
        out.final_state.psi = std::move(trial);
        out.final_state.time += h;
        prev_grad = g;

        if (opts.record_dt <= 0.0 ||
            out.final_state.time - last_record >= opts.record_dt - 1e-12) {
            out.series.push_back(diagnose(out.final_state, params));
            last_record = out.final_state.time;
        }
        if (g > opts.grad_ceiling * grad0) {
            out.halted = true;
            out.halt_reason = "gradient ceiling reached";
            break;
        }
        if (bad && h <= dt_min) {
            out.halted = true;
            out.halt_reason = "dt refinement exhausted";
            break;
        }
    }
    if (out.series.back().t != out.final_state.time)
        out.series.push_back(diagnose(out.final_state, params));
    return out;
}

std::string Trajectory::to_csv() const {
    std::string out = "t,mass,energy,grad_norm,virial,pohozaev\n";
    char line[200];
    for (const auto& d : series) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      d.t, d.mass, d.energy, d.grad_norm, d.virial, d.pohozaev);
        out += line;
    }
    return out;
}

BlowupProbeReport blowup_probe(const RadialProfile& u, const ProblemParams& params,
                               ProbeMode mode, double dilation_s, double level_m,
                               double t_horizon, PropagateOptions opts) {
    validate(params);
    BlowupProbeReport rep;
    rep.mode = mode;

    if (std::isnan(level_m)) {
        const GroundStateResult gs = descend_ground_state(params);
        level_m = gs.energy_level;
    }
    rep.level_m = level_m;

    RadialProfile initial = u;
    if (mode == ProbeMode::Scaled) {
        rep.dilation_s = dilation_s;
        initial = u.dilate(dilation_s);
        const FiberReport fr = fiber_critical_points(initial, params);
        rep.fiber_max_location = fr.global_max().s;
        rep.initial_energy = energy(initial, params);
        if (!(rep.fiber_max_location < 0.0))
            throw DomainError("blowup_probe: scaled state has t_{u,mu} >= 0");
        // The blow-up criterion gates on E < inf_{P-} E; below the mass-critical
        // exponent that infimum is nonnegative while m(a,mu) itself is
        // negative, so gate on 0 there and on m otherwise.
        const double gate = params.regime() == Regime::Subcritical
                                ? std::min(0.0, level_m)
                                : level_m;
        if (!(rep.initial_energy < gate))
            throw DomainError("blowup_probe: scaled state not below the mountain-pass gate");
    } else {
        rep.dilation_s = 0.0;
        rep.initial_energy = energy(initial, params);
        if (!(rep.initial_energy < level_m))
            throw DomainError("blowup_probe: E(u) < m(a,mu) violated");
        if (params.regime() != Regime::Subcritical && !(pohozaev(initial, params) < 0.0))
            throw DomainError("blowup_probe: P_mu(u) < 0 violated");
        const FiberReport fr = fiber_critical_points(initial, params);
        rep.fiber_max_location = fr.global_max().s;
    }

    const WaveState psi0 = WaveState::from_profile(initial);
    opts.record_dt = 0.0;  // trend checks want every accepted step
    const Trajectory tr = propagate(psi0, opts.dt, t_horizon, params, opts);
    rep.series = tr.series;
    rep.halted = tr.halted;
    rep.halt_reason = tr.halt_reason;

    const auto& s = tr.series;
    rep.grad_growth = s.back().grad_norm / s.front().grad_norm;
    bool p_negative = true;
    for (const auto& d : s)
        if (d.pohozaev >= 0.0) p_negative = false;
    rep.pohozaev_stayed_negative = p_negative;

    // Trend statistics on a three-point split of the halted window; per-step
    // second differences drown in the adaptive-dt noise.
    if (s.size() >= 5) {
        const double t0 = s.front().t;
        const double t_end = s.back().t;
        const auto nearest = [&](double t) -> const WaveDiagnostics& {
            std::size_t best = 0;
            for (std::size_t i = 1; i < s.size(); ++i)
                if (std::abs(s[i].t - t) < std::abs(s[best].t - t)) best = i;
            return s[best];
        };
        const WaveDiagnostics& mid = nearest(0.5 * (t0 + t_end));
        if (mid.t > t0 && mid.t < t_end) {
            const double rate1 =
                std::log(mid.grad_norm / s.front().grad_norm) / (mid.t - t0);
            const double rate2 =
                std::log(s.back().grad_norm / mid.grad_norm) / (t_end - mid.t);
            rep.accelerating = rate2 > rate1;
            rep.virial_concave =
                s.front().virial + s.back().virial - 2.0 * mid.virial < 0.0;
        }
    }
    rep.verdict_blowup = rep.grad_growth >= 10.0 && rep.accelerating;
    return rep;
}

std::string BlowupProbeReport::to_json() const {
    nlohmann::ordered_json j;
    j["mode"] = mode == ProbeMode::Scaled ? "scaled" : "below-level";
    j["dilation_s"] = dilation_s;
    j["fiber_max_location"] = fiber_max_location;
    j["initial_energy"] = initial_energy;
    j["level_m"] = level_m;
    j["grad_growth"] = grad_growth;
    j["accelerating"] = accelerating;
    j["pohozaev_stayed_negative"] = pohozaev_stayed_negative;
    j["virial_concave"] = virial_concave;
    j["verdict_blowup"] = verdict_blowup;
    j["halted"] = halted;
    j["halt_reason"] = halt_reason;
    return j.dump(2);
}

} // namespace critnls
