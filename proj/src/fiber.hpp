#pragma once

#include "params.hpp"
#include "profile.hpp"

#include <string>
#include <vector>

namespace critnls {

/// Sign of (Psi_u)''(0) on the Pohozaev manifold, or off-manifold.
enum class PohozaevClass { Pplus, Pzero, Pminus, NotOnP };

const char* pohozaev_class_name(PohozaevClass c);

/// The three norms every fiber-map quantity is built from.
struct NormTriple {
    double grad_sq = 0.0;   // |grad u|_2^2
    double lq_pow = 0.0;    // |u|_q^q
    double crit_pow = 0.0;  // |u|_{2*}^{2*}
};

NormTriple norms_of(const RadialProfile& u, const ProblemParams& params);

double energy(const NormTriple& n, const ProblemParams& params);
double energy(const RadialProfile& u, const ProblemParams& params);

/// P_mu(u) = |grad u|_2^2 - |u|_{2*}^{2*} - mu gamma_q |u|_q^q.
double pohozaev(const NormTriple& n, const ProblemParams& params);
double pohozaev(const RadialProfile& u, const ProblemParams& params);

/// Psi_u(s), Psi_u'(s), Psi_u''(s) in closed form; exponents are clamped at
/// |s| = 500 to avoid overflow.
double fiber_value(const NormTriple& n, const ProblemParams& params, double s);
double fiber_deriv(const NormTriple& n, const ProblemParams& params, double s);
double fiber_second(const NormTriple& n, const ProblemParams& params, double s);
double fiber_value(const RadialProfile& u, const ProblemParams& params, double s);
double fiber_deriv(const RadialProfile& u, const ProblemParams& params, double s);
double fiber_second(const RadialProfile& u, const ProblemParams& params, double s);

/// Membership tolerance |P| <= 1e-6 |grad u|_2^2; Pzero band 1e-8 |grad u|_2^2.
PohozaevClass classify_pohozaev(const NormTriple& n, const ProblemParams& params);
PohozaevClass classify_pohozaev(const RadialProfile& u, const ProblemParams& params);

enum class CriticalPointKind { LocalMin, GlobalMax };

struct FiberCriticalPoint {
    double s = 0.0;
    CriticalPointKind kind = CriticalPointKind::GlobalMax;
    double level = 0.0;         // Psi_u at s
    PohozaevClass pclass = PohozaevClass::Pminus;
};

/// Critical-point structure of one fiber map. Subcritical (admissible, mu>0):
/// exactly a local min s_u and the global max t_u with the interleaved zeros
/// s_u < c_u < t_u < d_u and Psi(s_u) < 0 < Psi(t_u). Critical/supercritical
/// and mu = 0: a single global max at positive level, class Pminus. Any other
/// count is reported as a StructuralError, never repaired.
struct FiberReport {
    Regime regime = Regime::Supercritical;
    bool homogeneous = false;  // mu = 0 path
    std::vector<FiberCriticalPoint> critical_points;
    std::vector<double> zeros;  // c_u, d_u (subcritical only)

    const FiberCriticalPoint& global_max() const;
    const FiberCriticalPoint& local_min() const;
    std::string to_json() const;
};

FiberReport fiber_critical_points(const NormTriple& n, const ProblemParams& params);
FiberReport fiber_critical_points(const RadialProfile& u, const ProblemParams& params);

/// Zeros and critical points of
/// h(t) = t^2/2 - mu (C_{N,q}^q/q) a^{(1-gamma_q)q} t^{gamma_q q}
///        - t^{2*} / (2* S^{2*/2}),
/// the lower envelope of E on gradient spheres (subcritical, admissible).
struct GeometryReport {
    double R0 = 0.0;
    double R1 = 0.0;
    double t_local_min = 0.0;
    double t_global_max = 0.0;
    double h_min_level = 0.0;
    double h_max_level = 0.0;

    std::string to_json() const;
};

GeometryReport h_geometry(const ProblemParams& params);

/// h(t) itself, exposed for scanning tests.
double h_envelope(const ProblemParams& params, double t);

} // namespace critnls
