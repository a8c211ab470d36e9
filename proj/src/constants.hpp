#pragma once

#include "params.hpp"

#include <optional>
#include <string>

namespace critnls {

/// Explicit constants of the problem at fixed (N, q). alpha may be +infinity
/// (supercritical N = 3, 4); C' and C'' exist only in the subcritical regime.
struct ConstantsTable {
    int dim = 0;
    double q = 0.0;
    double gamma_q = 0.0;
    double two_star = 0.0;
    double bar_p = 0.0;
    double sobolev_S = 0.0;
    double gn_C = 0.0;
    double alpha = 0.0;
    std::optional<double> C_prime;
    std::optional<double> C_double_prime;
    double quadrature_tol = 0.0;
    double shooting_tol = 0.0;

    std::string to_json() const;
};

/// Bubble integrals of U_1(r) = (1 + r^2)^{-(N-2)/2}:
/// K1 = |grad U_1|_2^2, K2 = |U_1|_{2*}^2, K3 = |U_1|_2^2 (N >= 5 only),
/// K4 = |U_1|_q^q (q > N/(N-2) only). K1/K2 equals the Sobolev constant.
double bubble_k1(int dim);
double bubble_k2(int dim);
double bubble_k3(int dim);
double bubble_k4(int dim, double q);

/// Best Sobolev constant, computed as K1/K2 and cached per N.
double sobolev_constant(int dim);

/// Optimal Gagliardo-Nirenberg constant C_{N,q} for 2 < q < 2*: the quotient
/// |w|_q / (|grad w|_2^{gamma_q} |w|_2^{1-gamma_q}) evaluated on the positive
/// radial decaying ground state of  w'' + (N-1)/r w' - w + w^{q-1} = 0,
/// located by shooting on w(0). Cross-checked against a fixed validation
/// family (Gaussian, sech, truncated bubble) before being returned; cached.
double gn_constant(int dim, double q);

/// GN quotient of an explicit radial function given its three norms.
double gn_quotient(int dim, double q, double lq_norm, double grad_norm,
                   double l2_norm);

/// Admissibility threshold alpha(N, q): min{C', C''} below the mass-critical
/// exponent, bar_p/(2 C^{bar_p}) at it, and above it +infinity for N = 3, 4
/// or S^{(N/4)(1-gamma_q)q}/gamma_q for N >= 5.
double alpha_threshold(const ProblemParams& params);

double subcritical_c_prime(int dim, double q);
double subcritical_c_double_prime(int dim, double q);

/// mu a^{(1-gamma_q)q} < alpha(N, q), strictly. Defined for mu > 0 only.
bool admissible(const ProblemParams& params);

ConstantsTable constants_for(const ProblemParams& params);

} // namespace critnls
