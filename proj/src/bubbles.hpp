#pragma once

#include "fiber.hpp"
#include "params.hpp"
#include "profile.hpp"

#include <string>
#include <utility>
#include <vector>

namespace critnls {

/// U_eps(r) = (eps / (eps^2 + r^2))^{(N-2)/2}, the bubble with concentration
/// parameter eps centered at the origin (unit coefficient normalization).
double bubble_value(int dim, double eps, double r);
double bubble_derivative(int dim, double eps, double r);
RadialProfile bubble_profile(std::shared_ptr<const RadialGrid> grid, double eps);

/// Smooth radial cutoff: 1 on [0,1], 0 on [2,inf), decreasing exponential
/// partition-of-unity transition in between.
double cutoff(double r);
double cutoff_derivative(double r);

/// u_eps = cutoff * U_eps and its mass-a normalization v_eps, sampled on a
/// grid refined near the origin in proportion to eps.
std::pair<RadialProfile, RadialProfile> test_function(int dim, double eps, double a);

/// Exact-quadrature norms of u_eps (no sampling error).
struct TruncatedBubbleNorms {
    double grad_sq = 0.0;    // |grad u_eps|_2^2
    double crit_pow = 0.0;   // |u_eps|_{2*}^{2*}
    double mass_sq = 0.0;    // |u_eps|_2^2
    double lq_pow = 0.0;     // |u_eps|_q^q
};
TruncatedBubbleNorms truncated_bubble_norms(int dim, double q, double eps);

struct BubbleRow {
    double eps = 0.0;
    double grad_sq = 0.0;
    double mass_sq = 0.0;
    double lq_pow = 0.0;
    double crit_norm_sq = 0.0;  // |u_eps|_{2*}^2
    double fiber_max = 0.0;     // sup_s Psi of v_eps (NaN when not computed)
};

struct BubbleReport {
    int dim = 0;
    double q = 0.0;
    double K1 = 0.0, K2 = 0.0;
    double K3 = 0.0;  // NaN unless N >= 5
    double K4 = 0.0;  // NaN unless q > N/(N-2)
    std::vector<BubbleRow> rows;

    // Log-log least-squares exponents of the eps-laws (largest eps dropped).
    double slope_grad_deviation = 0.0;  // of |grad u_eps|^2 - K1 -> N-2
    double slope_lq = 0.0;              // of |u_eps|_q^q -> N - (N-2)q/2
    double slope_mass = 0.0;            // of |u_eps|_2^2 -> 2 (N>=5) / 1 (N=3); NaN for N=4
    double n3_mass_constant = 0.0;      // N=3: mean of |u_eps|_2^2/eps
    double n4_ratio_spread = 0.0;       // N=4: max/min of |u|_2^2/(eps^2|log eps|) - 1

    double mp_bound = 0.0;  // min over eps of sup_s Psi_{v_eps} (NaN if skipped)
    bool bound_certified = false;
    double mp_best_eps = 0.0;

    std::string to_json() const;
    std::string to_csv() const;
};

/// Per-eps tables of the four bubble quantities plus the Appendix-style
/// slope fits. Requires at least 4 decreasing eps values in (0, 0.5].
BubbleReport appendix_asymptotics(int dim, double q, const std::vector<double>& eps_list);

struct MountainPassBound {
    double bound = 0.0;
    double best_eps = 0.0;
    bool certified = false;          // bound < S^{N/2}/N
    double level_cap = 0.0;          // S^{N/2}/N
    std::vector<double> per_eps;
};

/// min over eps of sup_s Psi^mu_{v_eps}(s). For mu > 0 the regime must be
/// critical or supercritical and admissible; mu = 0 runs the homogeneous
/// fiber. Certification compares against S^{N/2}/N.
MountainPassBound mountain_pass_bound(const ProblemParams& params,
                                      const std::vector<double>& eps_list);

} // namespace critnls
