/* C interface to the idamp core. Functions return 0 on success or a positive
   error code (see idamp_error_name); the message of the last failure on the
   calling thread is available from idamp_last_error. */
#ifndef IDAMP_H
#define IDAMP_H

#include <stddef.h>

#if defined(IDAMP_BUILDING)
#define IDAMP_API __attribute__((visibility("default")))
#else
#define IDAMP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct idamp_profile idamp_profile;
typedef struct idamp_density idamp_density;

/* real and imaginary part of omega0_k(y) */
typedef void (*idamp_mode_fn)(double y, void* user, double* re, double* im);

IDAMP_API const char* idamp_version(void);
IDAMP_API const char* idamp_last_error(void);
IDAMP_API const char* idamp_error_name(int code);

/* "couette", "sine-perturbed(0.1)", "tanh-monotone(2)" or a JSON descriptor */
IDAMP_API int idamp_profile_create(const char* descriptor, idamp_profile** out);
IDAMP_API void idamp_profile_destroy(idamp_profile* p);
/* out[0..2] = b, b', b'' at y */
IDAMP_API int idamp_profile_eval(const idamp_profile* p, double y, double out[3]);
IDAMP_API int idamp_profile_theta(const idamp_profile* p, double* theta);

/* G_k(y, z) */
IDAMP_API int idamp_green(int k, double y, double z, double* g);

/* sup-norm stability margin of I - S at complex phase speed c */
IDAMP_API int idamp_sigma_min(const idamp_profile* p, int k, double c_re, double c_im, int n, double* sigma);
IDAMP_API int idamp_delta_hat(const idamp_profile* p, int k, double* delta);

/* Spectral density of mode k; NULL fn means omega0 = sin(pi y). */
IDAMP_API int idamp_density_create(const idamp_profile* p, int k, idamp_mode_fn fn, void* user, idamp_density** out);
IDAMP_API void idamp_density_destroy(idamp_density* d);
IDAMP_API int idamp_density_size(const idamp_density* d, size_t* n);
IDAMP_API int idamp_density_y(const idamp_density* d, double* y);
/* psi_k(t, y) on the density output points */
IDAMP_API int idamp_density_psi(const idamp_density* d, double t, double* re, double* im);

/* Direct integration of mode k to time t, sampled at ys[0..n). */
IDAMP_API int idamp_direct_psi(const idamp_profile* p, int k, idamp_mode_fn fn, void* user, double t, size_t n,
                               const double* ys, double* re, double* im);

/* Norm-lemma sweep as JSON. If cap is too small the call still succeeds and
   *needed holds the required size including the terminator. */
IDAMP_API int idamp_lemma_sweep(const idamp_profile* p, int samples, int k_max, char* buf, size_t cap, size_t* needed);

/* Runs a config file; tasks is NULL or a comma separated override.
   *exit_code gets 0, 2, 3 or 4. */
IDAMP_API int idamp_run(const char* config_path, const char* tasks, int* exit_code);
/* Verifies a run directory; text like idamp_lemma_sweep. */
IDAMP_API int idamp_report(const char* dir, char* buf, size_t cap, size_t* needed, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
