/* critnls: normalized ground states of the Sobolev-critical NLS with a
 * combined power nonlinearity,  -Delta u = lambda u + mu |u|^{q-2} u
 * + |u|^{2*-2} u  with |u|_2 = a, plus fiber-map geometry, bubble estimates,
 * and radial time propagation with blow-up probes.
 *
 * C API over the C++ core: opaque handles, integer status codes, and
 * JSON/CSV strings allocated by the library (free with critnls_free_string).
 */

#ifndef CRITNLS_H
#define CRITNLS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define CRITNLS_API __declspec(dllexport)
#elif defined(__GNUC__) || defined(__clang__)
#  define CRITNLS_API __attribute__((visibility("default")))
#else
#  define CRITNLS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum critnls_status {
    CRITNLS_OK = 0,
    CRITNLS_ERR_NUMERIC = 1,    /* quadrature/integrator trouble */
    CRITNLS_ERR_STRUCTURAL = 2, /* computed structure contradicts a prediction */
    CRITNLS_ERR_SOLVER = 3,     /* bracket/iteration failure */
    CRITNLS_ERR_DOMAIN = 64     /* invalid parameters or usage */
} critnls_status;

typedef struct critnls_problem critnls_problem;
typedef struct critnls_profile critnls_profile;

CRITNLS_API const char* critnls_version(void);
CRITNLS_API const char* critnls_status_message(critnls_status status);
/* Message of the most recent error on this thread (empty if none). */
CRITNLS_API const char* critnls_last_error(void);
CRITNLS_API void critnls_free_string(char* text);

/* ---- problem handles ------------------------------------------------- */

/* N >= 3, 2 < q < 2N/(N-2), a > 0; mu of either sign. */
CRITNLS_API critnls_status critnls_problem_create(int dim, double q, double a,
                                                  double mu, critnls_problem** out);
CRITNLS_API critnls_status critnls_problem_set_grid(critnls_problem* problem,
                                                    size_t nodes, double r_max);
CRITNLS_API void critnls_problem_free(critnls_problem* problem);

/* gamma_q, 2*, bar p, regime name for the handle's parameters. */
CRITNLS_API critnls_status critnls_problem_gamma_q(const critnls_problem* p, double* out);
CRITNLS_API const char* critnls_problem_regime(const critnls_problem* p);

/* ---- profiles -------------------------------------------------------- */

/* Sample values at `nodes` radii (first radius must be 0). Copies input. */
CRITNLS_API critnls_status critnls_profile_create(int dim, const double* radii,
                                                  const double* values, size_t nodes,
                                                  critnls_profile** out);
CRITNLS_API critnls_status critnls_profile_from_csv(const char* path,
                                                    critnls_profile** out);
CRITNLS_API void critnls_profile_free(critnls_profile* profile);
CRITNLS_API critnls_status critnls_profile_lp_norm(const critnls_profile* u, double p,
                                                   double* out);
CRITNLS_API critnls_status critnls_profile_grad_norm_sq(const critnls_profile* u,
                                                        double* out);
/* Mass-preserving dilation (s * u)(x) = e^{Ns/2} u(e^s x), lazily tracked. */
CRITNLS_API critnls_status critnls_profile_dilate(const critnls_profile* u, double s,
                                                  critnls_profile** out);

/* ---- computations (JSON results) ------------------------------------- */

CRITNLS_API critnls_status critnls_constants_json(const critnls_problem* p, char** json);
CRITNLS_API critnls_status critnls_fiber_json(const critnls_problem* p,
                                              const critnls_profile* u, char** json);
CRITNLS_API critnls_status critnls_bubbles_json(const critnls_problem* p,
                                                const double* eps_list, size_t n_eps,
                                                char** json);
CRITNLS_API critnls_status critnls_ground_state_json(const critnls_problem* p,
                                                     char** json);
CRITNLS_API critnls_status critnls_defocusing_json(const critnls_problem* p,
                                                   char** json);

/* Energy E_mu(u) and Pohozaev P_mu(u) of an explicit profile. */
CRITNLS_API critnls_status critnls_energy(const critnls_problem* p,
                                          const critnls_profile* u, double* out);
CRITNLS_API critnls_status critnls_pohozaev(const critnls_problem* p,
                                            const critnls_profile* u, double* out);

/* ---- batch runs ------------------------------------------------------ */

/* Executes one run described by a config JSON (see README for the schema),
 * writing artifacts + manifest.json under out_dir. Returns the run's exit
 * status (0 / 1 / 2 / 64) and, when requested, the manifest JSON. */
CRITNLS_API int critnls_run_json(const char* config_json, const char* out_dir,
                                 char** manifest_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CRITNLS_H */
