#include "critnls.h"

#include "bubbles.hpp"
#include "constants.hpp"
#include "errors.hpp"
#include "fiber.hpp"
#include "ground_state.hpp"
#include "profile.hpp"
#include "runner.hpp"
#include "version.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

using namespace critnls;

struct critnls_problem {
    ProblemParams params;
    std::size_t grid_nodes = 4096;
    double r_max = 50.0;
};

struct critnls_profile {
    RadialProfile profile;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

critnls_status status_of(const std::exception& e) {
    g_last_error = e.what();
    if (dynamic_cast<const StructuralError*>(&e)) return CRITNLS_ERR_STRUCTURAL;
    if (dynamic_cast<const DomainError*>(&e)) return CRITNLS_ERR_DOMAIN;
    if (dynamic_cast<const SolverError*>(&e)) return CRITNLS_ERR_SOLVER;
    return CRITNLS_ERR_NUMERIC;
}

template <typename F>
critnls_status guarded(F&& f) {
    try {
        f();
        return CRITNLS_OK;
    } catch (const std::exception& e) {
        return status_of(e);
    } catch (...) {
        g_last_error = "unknown error";
        return CRITNLS_ERR_NUMERIC;
    }
}

std::shared_ptr<const RadialGrid> grid_of(const critnls_problem* p) {
    return RadialGrid::graded(p->params.dim, p->r_max, p->grid_nodes, 6.0);
}

} // namespace

extern "C" {

const char* critnls_version(void) { return CRITNLS_VERSION; }

const char* critnls_status_message(critnls_status status) {
    switch (status) {
        case CRITNLS_OK: return "ok";
        case CRITNLS_ERR_NUMERIC: return "numeric error";
        case CRITNLS_ERR_STRUCTURAL: return "structural error (prediction violated)";
        case CRITNLS_ERR_SOLVER: return "solver error";
        case CRITNLS_ERR_DOMAIN: return "domain/usage error";
    }
    return "unknown status";
}

const char* critnls_last_error(void) { return g_last_error.c_str(); }

void critnls_free_string(char* text) { std::free(text); }

critnls_status critnls_problem_create(int dim, double q, double a, double mu,
                                      critnls_problem** out) {
    if (!out) return CRITNLS_ERR_DOMAIN;
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<critnls_problem>();
        handle->params = ProblemParams(dim, q, a, mu);
        *out = handle.release();
    });
}

critnls_status critnls_problem_set_grid(critnls_problem* problem, size_t nodes,
                                        double r_max) {
    if (!problem) return CRITNLS_ERR_DOMAIN;
    return guarded([&] {
        if (nodes < 64) throw DomainError("grid needs at least 64 nodes");
        if (!(r_max > 0.0)) throw DomainError("r_max must be positive");
        problem->grid_nodes = nodes;
        problem->r_max = r_max;
    });
}

void critnls_problem_free(critnls_problem* problem) { delete problem; }

critnls_status critnls_problem_gamma_q(const critnls_problem* p, double* out) {
    if (!p || !out) return CRITNLS_ERR_DOMAIN;
    return guarded([&] { *out = p->params.gamma_q(); });
}

const char* critnls_problem_regime(const critnls_problem* p) {
    return p ? regime_name(p->params.regime()) : "?";
}

critnls_status critnls_profile_create(int dim, const double* radii,
                                      const double* values, size_t nodes,
                                      critnls_profile** out) {
    if (!out || !radii || !values) return CRITNLS_ERR_DOMAIN;
    *out = nullptr;
    return guarded([&] {
        std::vector<double> r(radii, radii + nodes);
        std::vector<double> v(values, values + nodes);
        auto grid = RadialGrid::from_nodes(dim, std::move(r), GridSpacing::Graded);
        *out = new critnls_profile{RadialProfile(std::move(grid), std::move(v))};
    });
}

critnls_status critnls_profile_from_csv(const char* path, critnls_profile** out) {
    if (!out || !path) return CRITNLS_ERR_DOMAIN;
    *out = nullptr;
    return guarded([&] {
        std::ifstream is(path);
        if (!is) throw DomainError(std::string("cannot open ") + path);
        *out = new critnls_profile{read_csv(is)};
    });
}

void critnls_profile_free(critnls_profile* profile) { delete profile; }

critnls_status critnls_profile_lp_norm(const critnls_profile* u, double p, double* out) {
    if (!u || !out) return CRITNLS_ERR_DOMAIN;
    return guarded([&] { *out = u->profile.lp_norm(p); });
}

critnls_status critnls_profile_grad_norm_sq(const critnls_profile* u, double* out) {
    if (!u || !out) return CRITNLS_ERR_DOMAIN;
    return guarded([&] { *out = u->profile.grad_norm_sq(); });
}

critnls_status critnls_profile_dilate(const critnls_profile* u, double s,
                                      critnls_profile** out) {
    if (!u || !out) return CRITNLS_ERR_DOMAIN;
    *out = nullptr;
    return guarded([&] { *out = new critnls_profile{u->profile.dilate(s)}; });
}

critnls_status critnls_constants_json(const critnls_problem* p, char** json) {
    if (!p || !json) return CRITNLS_ERR_DOMAIN;
    *json = nullptr;
    return guarded([&] { *json = dup_string(constants_for(p->params).to_json()); });
}

critnls_status critnls_fiber_json(const critnls_problem* p, const critnls_profile* u,
                                  char** json) {
    if (!p || !u || !json) return CRITNLS_ERR_DOMAIN;
    *json = nullptr;
    return guarded([&] {
        *json = dup_string(fiber_critical_points(u->profile, p->params).to_json());
    });
}

critnls_status critnls_bubbles_json(const critnls_problem* p, const double* eps_list,
                                    size_t n_eps, char** json) {
    if (!p || !eps_list || !json) return CRITNLS_ERR_DOMAIN;
    *json = nullptr;
    return guarded([&] {
        std::vector<double> eps(eps_list, eps_list + n_eps);
        *json = dup_string(appendix_asymptotics(p->params.dim, p->params.q, eps).to_json());
    });
}

critnls_status critnls_ground_state_json(const critnls_problem* p, char** json) {
    if (!p || !json) return CRITNLS_ERR_DOMAIN;
    *json = nullptr;
    return guarded([&] {
        const GroundStateResult r =
            p->params.mu > 0.0 && p->params.regime() == Regime::Subcritical
                ? local_minimize_subcritical(p->params, grid_of(p))
                : match_mass(p->params, -1e3, -1e-3, grid_of(p));
        *json = dup_string(r.to_json(p->params));
    });
}

critnls_status critnls_defocusing_json(const critnls_problem* p, char** json) {
    if (!p || !json) return CRITNLS_ERR_DOMAIN;
    *json = nullptr;
    return guarded([&] { *json = dup_string(defocusing_check(p->params).to_json()); });
}

critnls_status critnls_energy(const critnls_problem* p, const critnls_profile* u,
                              double* out) {
    if (!p || !u || !out) return CRITNLS_ERR_DOMAIN;
    return guarded([&] { *out = energy(u->profile, p->params); });
}

critnls_status critnls_pohozaev(const critnls_problem* p, const critnls_profile* u,
                                double* out) {
    if (!p || !u || !out) return CRITNLS_ERR_DOMAIN;
    return guarded([&] { *out = pohozaev(u->profile, p->params); });
}

int critnls_run_json(const char* config_json, const char* out_dir,
                     char** manifest_json) {
    if (manifest_json) *manifest_json = nullptr;
    if (!config_json) {
        g_last_error = "null config";
        return 64;
    }
    try {
        RunConfig cfg = RunConfig::from_json(config_json);
        if (out_dir && *out_dir) cfg.out_dir = out_dir;
        std::string manifest;
        const int status = run(cfg, &manifest);
        if (manifest_json) *manifest_json = dup_string(manifest);
        return status;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return 64;
    }
}

} // extern "C"
