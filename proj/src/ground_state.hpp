#pragma once

#include "fiber.hpp"
#include "params.hpp"
#include "profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace critnls {

enum class ShotOutcome {
    Decaying,  // stays positive and enters the exponential-decay band
    Crossing,  // hits zero with negative slope
    Blowing    // turns around (or exceeds the ceiling) while still positive
};

const char* shot_outcome_name(ShotOutcome o);

/// One radial shot of u'' + (N-1)/r u' + lambda u + mu u^{q-1} + u^{2*-1} = 0
/// from u(0) = u0, u'(0) = 0, classified by trajectory.
struct ShotSummary {
    ShotOutcome outcome = ShotOutcome::Blowing;
    double r_stop = 0.0;       // where the event fired (or r_max)
    double mass_sq = 0.0;      // |u|_2^2 including the analytic tail
    double grad_sq = 0.0;
    double lq_pow = 0.0;
    double crit_pow = 0.0;
    double first_crossing = 0.0;  // radius of the zero (Crossing only)
    bool decay_band_ok = false;   // u'/u within 5% of -sqrt(-lambda) in the window
};

ShotSummary shoot(double lambda, double u0, const ProblemParams& params,
                  double r_max = 50.0);

/// Full trajectory of a shot resampled onto a grid, exponential tail attached
/// beyond the last reliable radius.
RadialProfile shoot_profile(double lambda, double u0, const ProblemParams& params,
                            std::shared_ptr<const RadialGrid> grid);

struct CertificationBundle {
    double mass_error = 0.0;             // |a - |u|_2|
    double pohozaev_residual = 0.0;      // |P(u)| / |grad u|_2^2
    double multiplier_residual = 0.0;    // |lambda a^2 - mu (gamma_q - 1)|u|_q^q| / (|lambda| a^2)
    double el_residual = 0.0;            // weighted discrete Euler-Lagrange residual
    bool lambda_negative = false;
    bool pohozaev_zero = false;
    bool level_window = false;
    bool positive_decreasing = false;
    bool all_passed() const {
        return lambda_negative && pohozaev_zero && level_window && positive_decreasing;
    }
};

struct GroundStateResult {
    RadialProfile profile;
    double lambda = 0.0;
    double energy_level = 0.0;  // m(a, mu)
    double grad_sq = 0.0;
    double pohozaev_residual = 0.0;
    PohozaevClass fiber_class = PohozaevClass::NotOnP;
    double mass_error = 0.0;
    CertificationBundle certified;
    std::string solver;
    int lambda_bracket_count = 1;  // >1 flags multiple mass-matching multipliers

    std::string to_json(const ProblemParams& params) const;
};

/// Ground state by shooting + mass matching over a lambda bracket. For mu = 0
/// the homogeneous closed path is taken: exact bubble mass matching for
/// N >= 5, DomainError (no positive normalized solution) for N = 3, 4.
GroundStateResult match_mass(const ProblemParams& params,
                             double lambda_lo = -1e3, double lambda_hi = -1e-3,
                             std::shared_ptr<const RadialGrid> grid = nullptr);

/// Subcritical interior local minimizer on the mass sphere: projected
/// gradient descent inside the gradient ball A_{R0}, with periodic fiber
/// P+ projection. Escaping A_{R0} is a StructuralError.
GroundStateResult local_minimize_subcritical(const ProblemParams& params,
                                             std::shared_ptr<const RadialGrid> grid = nullptr);

/// Critical/supercritical mountain-pass descent: minimize the fiber maximum
/// level u -> max_s Psi_u(s) over the mass sphere (descent on the Pohozaev
/// manifold through the fiber projection).
GroundStateResult pohozaev_descent(const ProblemParams& params,
                                   std::shared_ptr<const RadialGrid> grid = nullptr);

/// Regime-appropriate descent solver.
GroundStateResult descend_ground_state(const ProblemParams& params,
                                       std::shared_ptr<const RadialGrid> grid = nullptr);

struct SweepResult {
    std::vector<double> mu_values;
    std::vector<double> levels;      // m(a, mu)
    std::vector<double> grad_norms;  // |grad u|_2^2
    std::vector<double> lambdas;
    std::vector<std::string> failures;  // empty string = solved
    bool monotone_ok = false;
    double limit_target = 0.0;  // 0 (subcritical) or S^{N/2}/N

    std::string to_csv() const;
    std::string to_json() const;
};

/// Solves every mu in the list (all must be admissible); checks monotonicity
/// of m(a, mu) and records the mu -> 0 limit target for the regime. A failed
/// solve is recorded, not fatal. CRITNLS_THREADS caps parallelism.
SweepResult mu_sweep(const ProblemParams& base, const std::vector<double>& mu_list);

struct DefocusingReport {
    int n_lambda = 0;
    int n_u0 = 0;
    int decaying_found = 0;
    int crossings = 0;
    int blowups = 0;
    double multiplier_sign = 0.0;       // sign of mu (gamma_q - 1): > 0 forces lambda > 0
    double reference_first_crossing = 0.0;  // diagnostics for continuity checks
    std::vector<double> candidate_lambdas;  // empty in the expected outcome

    std::string to_json() const;
};

/// mu < 0 scan over a (lambda > 0, u0) grid: looks for positive decaying
/// mass-a candidates (none are expected), and reports the multiplier sign
/// law. Report-producing, never throws on the expected empty outcome.
DefocusingReport defocusing_check(const ProblemParams& params);

} // namespace critnls
