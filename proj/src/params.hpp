#pragma once

#include <string>

namespace critnls {

/// Position of the perturbation exponent q relative to the mass-critical
/// exponent 2 + 4/N.
enum class Regime { Subcritical, Critical, Supercritical };

const char* regime_name(Regime r);

/// gamma_p = N (p - 2) / (2 p), defined for p in (2, 2N/(N-2)].
double gamma_exponent(int dim, double p);

/// Sobolev-critical exponent 2N/(N-2).
double critical_exponent(int dim);

/// Mass-critical exponent 2 + 4/N.
double mass_critical_exponent(int dim);

/// Problem data for -Delta u = lambda u + mu |u|^{q-2} u + |u|^{2*-2} u with
/// prescribed mass |u|_2 = a. The sign of mu is unrestricted.
struct ProblemParams {
    int dim = 3;
    double q = 4.0;
    double mass = 1.0;      // a, the L2-norm target
    double mu = 1.0;

    ProblemParams() = default;
    ProblemParams(int dim_, double q_, double mass_, double mu_);

    Regime regime() const;
    double gamma_q() const { return gamma_exponent(dim, q); }
    double two_star() const { return critical_exponent(dim); }
    double bar_p() const { return mass_critical_exponent(dim); }

    std::string describe() const;
};

/// Throws DomainError unless N >= 3, 2 < q < 2*, a > 0.
void validate(const ProblemParams& params);

} // namespace critnls
