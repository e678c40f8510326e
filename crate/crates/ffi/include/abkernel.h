/* C ABI for the abkernel library.
 *
 * Conventions:
 *   - status codes: 0 ok, 2 invalid argument / domain error,
 *     3 numerical budget exceeded, 4 internal panic;
 *   - branch is +1 or -1 (limiting-absorption boundary value);
 *   - axis is 0 (real ray) or 1 (imaginary ray);
 *   - complex results are written through out-pointers;
 *   - abk_last_error_message() describes the most recent failure on the
 *     calling thread and stays valid until the next failing call.
 */

#ifndef ABKERNEL_H
#define ABKERNEL_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define ABK_OK 0
#define ABK_ERR_INVALID 2
#define ABK_ERR_NUMERICAL 3
#define ABK_ERR_PANIC 4

/* Opaque evaluation context: flux profile plus numerical configuration. */
typedef struct AbkContext AbkContext;

/* Create a context from flux JSON {"a0": 0.3, "harmonics": [[2, 0.1, 0.0]]}.
 * Returns NULL on error (see abk_last_error_message). */
AbkContext *abk_context_new(const char *flux_json);

/* Release a context. NULL is ignored. */
void abk_context_free(AbkContext *ctx);

/* Override the kernel tolerance (default 1e-6). */
int32_t abk_context_set_tol(AbkContext *ctx, double tol);

/* Most recent error message for this thread. */
const char *abk_last_error_message(void);

/* Bessel J0; total function. */
double abk_bessel_j0(double x);

/* Bessel Y0 (x > 0). */
int32_t abk_bessel_y0(double x, double *out);

/* Modified Bessel K0 (x > 0). */
int32_t abk_bessel_k0(double x, double *out);

/* Hankel H0^± on the real or imaginary ray. */
int32_t abk_hankel0(int32_t branch, int32_t axis, double rho, double *out_re,
                    double *out_im);

/* F^±(rho) = H0^±(rho) - H0^±(i rho). */
int32_t abk_f_pm(int32_t branch, double rho, double *out_re, double *out_im);

/* Resolvent kernel of order 2 or 4 at spectral parameter lambda, points in
 * polar coordinates. */
int32_t abk_resolvent(const AbkContext *ctx, int32_t order, int32_t branch,
                      double lambda, double rx, double theta_x, double ry,
                      double theta_y, double *out_re, double *out_im);

/* Propagator kernel e^{-itL}(x, y); out_trunc_err may be NULL. */
int32_t abk_kernel(const AbkContext *ctx, double t, double rx, double theta_x,
                   double ry, double theta_y, double *out_re, double *out_im,
                   double *out_trunc_err);

/* Free bilaplacian kernel at separation r >= 0. */
int32_t abk_free_kernel(double t, double r, double *out_re, double *out_im);

#ifdef __cplusplus
}
#endif

#endif /* ABKERNEL_H */
