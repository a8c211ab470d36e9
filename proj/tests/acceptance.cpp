// Acceptance suite: one check per numbered criterion, each printing a
// PASS/FAIL line with the measured numbers. Exit status is the number of
// failed criteria.

#include "bubbles.hpp"
#include "constants.hpp"
#include "dynamics.hpp"
#include "fiber.hpp"
#include "ground_state.hpp"
#include "oracles.hpp"
#include "profile.hpp"
#include "errors.hpp"
#include "quadrature.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

using namespace critnls;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what, double seconds) {
    std::printf("[%s] criterion %2d: %s  (%.1fs)\n", pass ? "PASS" : "FAIL", id,
                what.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run(int id, const std::function<std::pair<bool, std::string>()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string what;
    try {
        auto [p, w] = check();
        pass = p;
        what = std::move(w);
    } catch (const std::exception& e) {
        what = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(id, pass, what, secs);
}

char buf[512];

std::shared_ptr<const RadialGrid> grid3() {
    static auto g = RadialGrid::graded(3, 50.0, 4096, 6.0);
    return g;
}

} // namespace

int main() {
    std::printf("acceptance: Sobolev-critical NLS normalized ground states\n");

    // 1. Sobolev-constant consistency against the 10x-resolution oracle.
    run(1, [] {
        double worst = 0.0;
        for (int N : {3, 4, 5}) {
            const double s = sobolev_constant(N);
            const double o = oracles::sobolev_oracle(N, 40000);
            worst = std::max(worst, std::abs(s - o) / o);
        }
        std::snprintf(buf, sizeof buf,
                      "K1/K2 vs Richardson oracle, N in {3,4,5}: worst rel %.2e < 1e-6",
                      worst);
        return std::make_pair(worst < 1e-6, std::string(buf));
    });

    // 2. Fiber identity Psi'(s) = P(s * u) over random profiles and shifts.
    run(2, [] {
        const ProblemParams p(3, 4.0, 1.0, 1.0);
        std::mt19937_64 rng(2101);
        std::uniform_real_distribution<double> shift(-3.0, 3.0);
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const RadialProfile u =
                normalize_mass(oracles::random_bump_profile(grid3(), rng), 1.0);
            const double s = shift(rng);
            const double lhs = fiber_deriv(norms_of(u, p), p, s);
            const double rhs = pohozaev(u.dilate(s), p);
            worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
        }
        std::snprintf(buf, sizeof buf,
                      "max |Psi'(s) - P(s*u)|/(1+|P|) over 100 draws: %.2e < 1e-8", worst);
        return std::make_pair(worst < 1e-8, std::string(buf));
    });

    // 3. Homogeneous closed form for the fiber maximum.
    run(3, [] {
        const ProblemParams hom(3, 4.0, 1.0, 0.0);
        std::mt19937_64 rng(2102);
        double worst_t = 0.0, worst_l = 0.0;
        for (int k = 0; k < 50; ++k) {
            const RadialProfile u =
                normalize_mass(oracles::random_bump_profile(grid3(), rng), 1.0);
            const NormTriple n = norms_of(u, hom);
            const FiberReport fr = fiber_critical_points(n, hom);
            const double t_closed =
                std::log(n.grad_sq / n.crit_pow) / (hom.two_star() - 2.0);
            worst_t = std::max(worst_t, std::abs(fr.global_max().s - t_closed));
            const double lvl =
                std::pow(n.grad_sq / std::pow(n.crit_pow, 2.0 / hom.two_star()), 1.5) /
                3.0;
            worst_l = std::max(worst_l,
                               std::abs(fr.global_max().level - lvl) / std::abs(lvl));
        }
        std::snprintf(buf, sizeof buf,
                      "t_u dev %.2e, level dev %.2e over 50 draws, both < 1e-8",
                      worst_t, worst_l);
        return std::make_pair(worst_t < 1e-8 && worst_l < 1e-8, std::string(buf));
    });

    // 4. Regime structure of the fiber critical points, random admissible draws.
    run(4, [] {
        std::mt19937_64 rng(2103);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        int checked = 0, wrong = 0, structural = 0;
        for (int k = 0; k < 210; ++k) {
            const int dim = 3 + k % 3;
            auto g = RadialGrid::graded(dim, 50.0, 2048, 6.0);
            const double ts = critical_exponent(dim);
            const double pbar = mass_critical_exponent(dim);
            double q = 0.0;
            std::size_t want = 1;
            switch (k % 3) {
                case 0: q = 2.0 + (pbar - 2.0) * (0.3 + 0.6 * unif(rng)); want = 2; break;
                case 1: q = pbar; want = 1; break;
                default: q = pbar + (ts - pbar) * (0.2 + 0.6 * unif(rng)); want = 1; break;
            }
            const double a = 0.5 + 1.5 * unif(rng);
            ProblemParams p(dim, q, a, 1.0);
            const double alpha = alpha_threshold(p);
            const double cap = std::isinf(alpha) ? 3.0 : alpha;
            p.mu = (0.05 + 0.7 * unif(rng)) * cap / std::pow(a, (1.0 - p.gamma_q()) * q);
            if (!admissible(p)) continue;
            const RadialProfile u =
                normalize_mass(oracles::random_bump_profile(g, rng), a);
            try {
                const FiberReport fr = fiber_critical_points(u, p);
                if (fr.critical_points.size() != want) ++wrong;
            } catch (const StructuralError&) {
                ++structural;
            }
            ++checked;
        }
        std::snprintf(buf, sizeof buf,
                      "%d admissible configs: %d wrong counts, %d structural errors",
                      checked, wrong, structural);
        return std::make_pair(checked >= 200 && wrong == 0 && structural == 0,
                              std::string(buf));
    });

    // 5. Appendix bubble laws: gradient-deviation slope and the N=4 mass law.
    run(5, [] {
        const std::vector<double> eps{0.2, 0.1, 0.05, 0.025, 0.0125};
        bool ok = true;
        std::string detail;
        for (int N : {3, 4, 5}) {
            const BubbleReport rep = appendix_asymptotics(N, N == 3 ? 4.0 : 3.0, eps);
            const double dev = std::abs(rep.slope_grad_deviation - (N - 2.0)) / (N - 2.0);
            ok = ok && dev < 0.10;
            std::snprintf(buf, sizeof buf, "N=%d slope %.3f (dev %.1f%%) ", N,
                          rep.slope_grad_deviation, 100.0 * dev);
            detail += buf;
            if (N == 4) {
                ok = ok && rep.n4_ratio_spread < 0.15;
                std::snprintf(buf, sizeof buf, "[N=4 ratio spread %.1f%%] ",
                              100.0 * rep.n4_ratio_spread);
                detail += buf;
            }
        }
        return std::make_pair(ok, detail);
    });

    // 6. Mountain-pass bound strictly below S^{N/2}/N, margin reported.
    run(6, [] {
        const std::vector<double> ladder{0.02, 0.01, 0.005, 0.0025, 0.00125, 0.000625};
        const MountainPassBound a =
            mountain_pass_bound(ProblemParams(3, 4.0, 1.0, 1.0), ladder);
        const MountainPassBound b =
            mountain_pass_bound(ProblemParams(3, 10.0 / 3.0, 1.0, 1.0), ladder);
        std::snprintf(buf, sizeof buf,
                      "q=4: bound %.6f vs cap %.6f (margin %.4f); q=10/3: bound %.6f "
                      "(margin %.4f)",
                      a.bound, a.level_cap, a.level_cap - a.bound, b.bound,
                      b.level_cap - b.bound);
        return std::make_pair(a.certified && b.certified, std::string(buf));
    });

    // 7. Ground-state certification at (3, 4, 1, 1), both solver families.
    run(7, [] {
        const ProblemParams p(3, 4.0, 1.0, 1.0);
        const GroundStateResult s = match_mass(p);
        const GroundStateResult d = pohozaev_descent(p);
        const double gap = std::abs(s.energy_level - d.energy_level) /
                           std::abs(s.energy_level);
        const double cap = std::pow(sobolev_constant(3), 1.5) / 3.0;
        const bool ok = gap < 1e-4 && s.lambda < 0.0 &&
                        s.certified.multiplier_residual < 1e-5 &&
                        s.energy_level > 0.0 && s.energy_level < cap &&
                        s.pohozaev_residual < 1e-5 && s.certified.all_passed();
        std::snprintf(buf, sizeof buf,
                      "m=%.8f (solver gap %.1e), lambda=%.5f, multiplier res %.1e, "
                      "P res %.1e",
                      s.energy_level, gap, s.lambda, s.certified.multiplier_residual,
                      s.pohozaev_residual);
        return std::make_pair(ok, std::string(buf));
    });

    // 8. Subcritical interior local minimizer at (3, 2.5, 1, 5).
    run(8, [] {
        const ProblemParams p(3, 2.5, 1.0, 5.0);
        const GroundStateResult d = local_minimize_subcritical(p);
        const GeometryReport geo = h_geometry(p);
        const bool ok = d.energy_level < 0.0 && d.fiber_class == PohozaevClass::Pplus &&
                        std::sqrt(d.grad_sq) < geo.R0 && d.certified.positive_decreasing;
        std::snprintf(buf, sizeof buf,
                      "m=%.8f < 0, class %s, |grad|=%.4f < R0=%.4f", d.energy_level,
                      pohozaev_class_name(d.fiber_class), std::sqrt(d.grad_sq), geo.R0);
        return std::make_pair(ok, std::string(buf));
    });

    // 9. mu-sweep limits in both regimes.
    run(9, [] {
        const SweepResult sup =
            mu_sweep(ProblemParams(3, 4.0, 1.0, 1.0), {1.5, 1.25, 1.0, 0.8, 0.65, 0.5});
        bool ok = sup.monotone_ok;
        for (const auto& f : sup.failures) ok = ok && f.empty();
        const double cap = sup.limit_target;
        for (std::size_t i = 1; i < sup.levels.size(); ++i)
            ok = ok && (cap - sup.levels[i]) < (cap - sup.levels[i - 1]);
        ok = ok && cap - sup.levels.back() > 0.0;

        const SweepResult sub =
            mu_sweep(ProblemParams(3, 2.5, 1.0, 5.0), {5.0, 4.5, 4.0, 3.5, 3.0, 2.5});
        ok = ok && sub.monotone_ok;
        for (std::size_t i = 0; i < sub.levels.size(); ++i) {
            ok = ok && sub.levels[i] < 0.0;
            if (i > 0) ok = ok && sub.levels[i] > sub.levels[i - 1];
        }
        std::snprintf(buf, sizeof buf,
                      "supercritical gap %.4f -> %.4f toward 0; subcritical m %.4f -> "
                      "%.4f toward 0-",
                      cap - sup.levels.front(), cap - sup.levels.back(),
                      sub.levels.front(), sub.levels.back());
        return std::make_pair(ok, std::string(buf));
    });

    // 10. Conservation and stationarity of the computed stable ground state.
    run(10, [] {
        const ProblemParams p(3, 2.5, 1.0, 5.0);
        const GroundStateResult gs = descend_ground_state(p);
        const WaveState psi0 = WaveState::from_profile(gs.profile);
        PropagateOptions opts;
        opts.dt = 5e-4;
        opts.record_dt = 0.25;
        const Trajectory tr = propagate(psi0, opts.dt, 1.0, p, opts);
        const auto& f0 = tr.series.front();
        const auto& l = tr.series.back();
        const double mass_drift = std::abs(l.mass - f0.mass) / f0.mass / l.t;
        const double energy_drift =
            std::abs(l.energy - f0.energy) / std::abs(f0.energy) / l.t;
        const RadialProfile mat = gs.profile.materialize();
        double sup = 0.0;
        for (std::size_t i = 0; i < tr.final_state.psi.size(); ++i)
            sup = std::max(sup, std::abs(std::abs(tr.final_state.psi[i]) -
                                         mat.base_values()[i]));
        const bool ok = !tr.halted && mass_drift < 1e-8 && energy_drift < 1e-6 &&
                        sup < 1e-4;
        std::snprintf(buf, sizeof buf,
                      "mass drift %.1e, energy drift %.1e, sup | |psi|-u | %.1e over t=1",
                      mass_drift, energy_drift, sup);
        return std::make_pair(ok, std::string(buf));
    });

    // 11. Blow-up probe: trend check on a scaled ground state.
    run(11, [] {
        const ProblemParams p(3, 4.0, 1.0, 1.0);
        const GroundStateResult gs = descend_ground_state(p);
        PropagateOptions opts;
        opts.dt = 2e-5;
        opts.max_dt_halvings = 24;
        opts.growth_trigger = 0.35;
        const BlowupProbeReport rep = blowup_probe(gs.profile, p, ProbeMode::Scaled,
                                                   0.5, gs.energy_level, 1.0, opts);
        const bool ok = rep.fiber_max_location < 0.0 && rep.grad_growth >= 10.0 &&
                        rep.accelerating && rep.pohozaev_stayed_negative;
        std::snprintf(buf, sizeof buf,
                      "t_{u,mu}=%.3f < 0, growth %.1fx, accelerating %d, P stayed "
                      "negative %d, halt: %s",
                      rep.fiber_max_location, rep.grad_growth, (int)rep.accelerating,
                      (int)rep.pohozaev_stayed_negative, rep.halt_reason.c_str());
        return std::make_pair(ok, std::string(buf));
    });

    // 12. Defocusing sign law and empty candidate set.
    run(12, [] {
        const ProblemParams p(3, 4.0, 1.0, -1.0);
        const DefocusingReport rep = defocusing_check(p);
        const bool ok = rep.decaying_found == 0 && rep.candidate_lambdas.empty() &&
                        rep.multiplier_sign > 0.0;
        std::snprintf(buf, sizeof buf,
                      "scan %dx%d: %d decaying candidates; mu(gamma_q - 1) = %.3f > 0 "
                      "forces lambda > 0",
                      rep.n_lambda, rep.n_u0, rep.decaying_found, rep.multiplier_sign);
        return std::make_pair(ok, std::string(buf));
    });

    std::printf("%d of 12 criteria passed\n", 12 - g_failures);
    return g_failures;
}
