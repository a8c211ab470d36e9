#pragma once

#include "grid.hpp"
#include "params.hpp"
#include "profile.hpp"

#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace critnls {

/// Complex radial wave function at one instant.
struct WaveState {
    std::shared_ptr<const RadialGrid> grid;
    std::vector<std::complex<double>> psi;
    double time = 0.0;

    static WaveState from_profile(const RadialProfile& u);
};

struct WaveDiagnostics {
    double t = 0.0;
    double mass = 0.0;       // |psi|_2^2
    double energy = 0.0;
    double grad_norm = 0.0;  // |grad psi|_2
    double virial = 0.0;     // \int |x|^2 |psi|^2
    double pohozaev = 0.0;   // P_mu(psi)
};

WaveDiagnostics diagnose(const WaveState& state, const ProblemParams& params);

struct PropagateOptions {
    double dt = 5e-4;
    double record_dt = 0.0;        // 0: records every accepted step
    double grad_ceiling = 30.0;    // halt when grad_norm exceeds ceiling * initial
    double growth_trigger = 0.2;   // per-step relative grad growth forcing dt refinement
    int max_dt_halvings = 14;
    bool linear_only = false;      // drop the nonlinear rotation (free dispersion)
};

struct Trajectory {
    std::vector<WaveDiagnostics> series;
    WaveState final_state;
    bool halted = false;
    std::string halt_reason;

    std::string to_csv() const;
};

/// Strang splitting: Crank-Nicolson radial linear half-steps around the exact
/// pointwise nonlinear phase rotation e^{i dt (mu |psi|^{q-2} + |psi|^{2*-2})}.
/// Mass is conserved to roundoff by construction; a step that inflates the
/// gradient norm too fast is retried at dt/2, and the run halts early at the
/// gradient ceiling or when refinement bottoms out.
Trajectory propagate(const WaveState& psi0, double dt, double t_end,
                     const ProblemParams& params, PropagateOptions opts = {});

enum class ProbeMode { Scaled, BelowLevel };

struct BlowupProbeReport {
    ProbeMode mode = ProbeMode::Scaled;
    double dilation_s = 0.0;        // Scaled mode
    double fiber_max_location = 0.0;  // t_{u,mu} of the initial state
    double initial_energy = 0.0;
    double level_m = 0.0;           // reference ground-state level
    double grad_growth = 0.0;       // final / initial gradient norm
    bool accelerating = false;      // log-slope of grad_norm increasing
    bool pohozaev_stayed_negative = false;
    bool virial_concave = false;    // second difference of V(t) negative
    bool verdict_blowup = false;    // growth >= 10x and accelerating
    bool halted = false;
    std::string halt_reason;
    std::vector<WaveDiagnostics> series;

    std::string to_json() const;
};

/// Scaled mode: propagates (s * u) after certifying t_{s*u,mu} < 0 and
/// E(s*u) < m. BelowLevel: requires E(u) < m and, in the critical and
/// supercritical regimes, P(u) < 0; violated preconditions raise DomainError
/// naming the condition. The verdict is a trend check, not a proof.
BlowupProbeReport blowup_probe(const RadialProfile& u, const ProblemParams& params,
                               ProbeMode mode, double dilation_s = 2.0,
                               double level_m = std::numeric_limits<double>::quiet_NaN(),
                               double t_horizon = 5.0, PropagateOptions opts = {});

} // namespace critnls
