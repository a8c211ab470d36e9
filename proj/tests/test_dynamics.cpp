#include "constants.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "fiber.hpp"
#include "ground_state.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace critnls;

namespace {

// Stable reference state for conservation runs: the subcritical local
// minimizer, computed once.
const GroundStateResult& stable_state() {
    static const GroundStateResult gs =
        descend_ground_state(ProblemParams(3, 2.5, 1.0, 5.0));
    return gs;
}

} // namespace

TEST_CASE("conservation and stationarity on the stable minimizer") {
    const ProblemParams p(3, 2.5, 1.0, 5.0);
    const GroundStateResult& gs = stable_state();
    const WaveState psi0 = WaveState::from_profile(gs.profile);
    PropagateOptions opts;
    opts.dt = 5e-4;
    opts.record_dt = 0.1;
    const Trajectory tr = propagate(psi0, opts.dt, 1.0, p, opts);
    REQUIRE_FALSE(tr.halted);
    const auto& f = tr.series.front();
    const auto& l = tr.series.back();

    SUBCASE("mass drift below 1e-8 per unit time") {
        CHECK(std::abs(l.mass - f.mass) / f.mass / l.t < 1e-8);
    }

    SUBCASE("energy drift below 1e-6 per unit time, and at dt/2 below 1e-7") {
        CHECK(std::abs(l.energy - f.energy) / std::abs(f.energy) / l.t < 1e-6);
        PropagateOptions half = opts;
        half.dt = 2.5e-4;
        const Trajectory tr2 = propagate(psi0, half.dt, 1.0, p, half);
        const auto& l2 = tr2.series.back();
        CHECK(std::abs(l2.energy - f.energy) / std::abs(f.energy) / l2.t < 1e-7);
    }

    SUBCASE("|psi| moves less than 1e-4 pointwise over unit time") {
        const RadialProfile mat = gs.profile.materialize();
        double sup = 0.0;
        for (std::size_t i = 0; i < tr.final_state.psi.size(); ++i)
            sup = std::max(sup, std::abs(std::abs(tr.final_state.psi[i]) -
                                         mat.base_values()[i]));
        CHECK(sup < 1e-4);
    }

    SUBCASE("no spurious gradient growth on the stationary orbit") {
        CHECK(l.grad_norm / f.grad_norm < 1.01);
    }
}

TEST_CASE("integrator order on a perturbed bound state") {
    const ProblemParams p(3, 2.5, 1.0, 5.0);
    const GroundStateResult& gs = stable_state();
    const RadialProfile mat = gs.profile.materialize();
    std::vector<double> v = mat.base_values();
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] *= 1.0 + 0.05 * std::exp(-mat.grid().r(i));
    const RadialProfile pert =
        normalize_mass(RadialProfile(mat.grid_ptr(), std::move(v)), p.mass);
    const WaveState psi0 = WaveState::from_profile(pert);

    const auto drift_at = [&](double dt) {
        PropagateOptions opts;
        opts.dt = dt;
        opts.record_dt = 0.25;
        const Trajectory tr = propagate(psi0, dt, 0.5, p, opts);
        return std::abs(tr.series.back().energy - tr.series.front().energy);
    };
    const double d1 = drift_at(8e-3);
    const double d2 = drift_at(4e-3);
    if (d1 > 1e-12) CHECK(d1 / d2 > 3.0);  // second-order splitting
}

TEST_CASE("free dispersion against the closed-form Gaussian") {
    auto grid = RadialGrid::uniform(3, 30.0, 6001);
    WaveState g0;
    g0.grid = grid;
    g0.time = 0.0;
    const double alpha = 1.0;
    for (std::size_t i = 0; i < grid->size(); ++i)
        g0.psi.emplace_back(std::exp(-alpha * grid->r(i) * grid->r(i)), 0.0);
    PropagateOptions opts;
    opts.dt = 2.5e-4;
    opts.linear_only = true;
    opts.record_dt = 0.1;
    const ProblemParams dummy(3, 4.0, 1.0, 0.0);
    const Trajectory tr = propagate(g0, opts.dt, 0.4, dummy, opts);
    const double t = tr.final_state.time;
    const std::complex<double> den(1.0, 4.0 * alpha * t);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid->size(); i += 10) {
        const double r = grid->r(i);
        const std::complex<double> exact =
            std::pow(den, -1.5) * std::exp(-alpha * r * r / den);
        worst = std::max(worst,
                         std::abs(std::abs(tr.final_state.psi[i]) - std::abs(exact)));
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("blow-up probes") {
    SUBCASE("scaled supercritical ground state: full trend verdict") {
        const ProblemParams p(3, 4.0, 1.0, 1.0);
        const GroundStateResult gs = descend_ground_state(p);
        PropagateOptions opts;
        opts.dt = 2e-5;
        opts.max_dt_halvings = 24;
        opts.growth_trigger = 0.35;
        const BlowupProbeReport rep =
            blowup_probe(gs.profile, p, ProbeMode::Scaled, 0.5, gs.energy_level,
                         1.0, opts);
        CHECK(rep.fiber_max_location < 0.0);
        CHECK(rep.initial_energy < rep.level_m);
        CHECK(rep.grad_growth >= 10.0);
        CHECK(rep.accelerating);
        CHECK(rep.pohozaev_stayed_negative);
        CHECK(rep.virial_concave);
        CHECK(rep.verdict_blowup);
        CHECK(rep.halted);
    }

    SUBCASE("s = 2 dilation: >= 10x growth, concave virial, negative P") {
        const ProblemParams p(3, 4.0, 1.0, 1.0);
        const GroundStateResult gs = descend_ground_state(p);
        PropagateOptions opts;
        opts.dt = 2e-5;
        opts.max_dt_halvings = 24;
        opts.growth_trigger = 0.35;
        const BlowupProbeReport rep =
            blowup_probe(gs.profile, p, ProbeMode::Scaled, 2.0, gs.energy_level,
                         1.0, opts);
        CHECK(rep.fiber_max_location == doctest::Approx(-2.0).epsilon(1e-6));
        CHECK(rep.grad_growth >= 10.0);
        CHECK(rep.pohozaev_stayed_negative);
        CHECK(rep.virial_concave);
    }

    SUBCASE("ground state itself stays quiet over the horizon") {
        const ProblemParams p(3, 2.5, 1.0, 5.0);
        const GroundStateResult& gs = stable_state();
        const WaveState psi0 = WaveState::from_profile(gs.profile);
        PropagateOptions opts;
        opts.dt = 5e-4;
        opts.record_dt = 0.2;
        const Trajectory tr = propagate(psi0, opts.dt, 1.0, p, opts);
        CHECK_FALSE(tr.halted);
        CHECK(tr.series.back().grad_norm < 10.0 * tr.series.front().grad_norm);
    }

    SUBCASE("below-level mode rejects P(u) > 0") {
        const ProblemParams p(3, 4.0, 1.0, 1.0);
        const GroundStateResult gs = descend_ground_state(p);
        // Far down the fiber toward -inf: gradient tiny, E -> 0+ < m, P > 0.
        const RadialProfile small = gs.profile.dilate(-6.0);
        REQUIRE(energy(small, p) < gs.energy_level);
        REQUIRE(pohozaev(small, p) > 0.0);
        CHECK_THROWS_AS(blowup_probe(small, p, ProbeMode::BelowLevel, 0.0,
                                     gs.energy_level, 0.2),
                        DomainError);
    }

    SUBCASE("below-level mode runs on a valid state") {
        const ProblemParams p(3, 2.5, 1.0, 5.0);
        const GroundStateResult& gs = stable_state();
        const FiberReport fr = fiber_critical_points(gs.profile, p);
        const double s = fr.global_max().s + 0.5;
        const RadialProfile u = gs.profile.dilate(s).materialize();
        REQUIRE(energy(u, p) < gs.energy_level);
        PropagateOptions opts;
        opts.dt = 2e-5;
        opts.max_dt_halvings = 24;
        opts.growth_trigger = 0.35;
        const BlowupProbeReport rep = blowup_probe(u, p, ProbeMode::BelowLevel, 0.0,
                                                   gs.energy_level, 1.0, opts);
        CHECK(rep.grad_growth >= 10.0);
        CHECK(rep.halted);
    }
}
