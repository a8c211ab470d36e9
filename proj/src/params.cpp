#include "params.hpp"

#include "errors.hpp"

#include <cmath>
#include <sstream>

namespace critnls {

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Subcritical: return "subcritical";
        case Regime::Critical: return "critical";
        case Regime::Supercritical: return "supercritical";
    }
    return "?";
}

double gamma_exponent(int dim, double p) {
    if (dim < 3) throw DomainError("gamma_exponent: N must be >= 3");
    if (!(p > 2.0) || p > critical_exponent(dim) * (1.0 + 1e-14))
        throw DomainError("gamma_exponent: p outside (2, 2N/(N-2)]");
    return dim * (p - 2.0) / (2.0 * p);
}

double critical_exponent(int dim) {
    if (dim < 3) throw DomainError("critical_exponent: N must be >= 3");
    return 2.0 * dim / (dim - 2.0);
}

double mass_critical_exponent(int dim) {
    if (dim < 3) throw DomainError("mass_critical_exponent: N must be >= 3");
    return 2.0 + 4.0 / dim;
}

ProblemParams::ProblemParams(int dim_, double q_, double mass_, double mu_)
    : dim(dim_), q(q_), mass(mass_), mu(mu_) {
    validate(*this);
}

Regime ProblemParams::regime() const {
    const double pbar = mass_critical_exponent(dim);
    // q = 2 + 4/N is representable only approximately when entered by hand;
    // snap a tight neighbourhood onto the critical regime.
    if (std::abs(q - pbar) <= 1e-12 * pbar) return Regime::Critical;
    return q < pbar ? Regime::Subcritical : Regime::Supercritical;
}

std::string ProblemParams::describe() const {
    std::ostringstream os;
    os << "N=" << dim << " q=" << q << " a=" << mass << " mu=" << mu
       << " (" << regime_name(regime()) << ")";
    return os.str();
}

void validate(const ProblemParams& params) {
    if (params.dim < 3) throw DomainError("ProblemParams: N must be >= 3");
    if (!(params.q > 2.0) || !(params.q < critical_exponent(params.dim)))
        throw DomainError("ProblemParams: q must lie in (2, 2N/(N-2))");
    if (!(params.mass > 0.0)) throw DomainError("ProblemParams: a must be positive");
    if (!std::isfinite(params.mu)) throw DomainError("ProblemParams: mu must be finite");
}

} // namespace critnls
