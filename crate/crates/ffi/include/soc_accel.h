#ifndef SOC_ACCEL_H
#define SOC_ACCEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SaSequence {
  SA_SEQUENCE_UP = 0,
  SA_SEQUENCE_CP = 1,
} SaSequence;

typedef enum SaStatus {
  SA_STATUS_OK = 0,
  SA_STATUS_NULL_POINTER = 1,
  SA_STATUS_INVALID_PARAMETER = 2,
  SA_STATUS_INFEASIBLE = 3,
  SA_STATUS_NUMERICAL = 4,
  SA_STATUS_PANIC = 5,
} SaStatus;

/**
 * Opaque drive handle.
 */
typedef struct SaForce SaForce;

/**
 * Opaque trap handle.
 */
typedef struct SaTrap SaTrap;

typedef struct SaModes {
  double omega_plus;
  double omega_minus;
  double omega_tilde;
  double omega_c;
  double l_osc;
} SaModes;

typedef struct SaMeasurement {
  double signal;
  double coherence;
  double bloch_x;
  double bloch_y;
  double bloch_z;
  size_t branches;
} SaMeasurement;

typedef struct SaSensitivity {
  double v_mean;
  double r_t;
  double r_0;
  uint64_t n_layers;
  double gamma_coll;
  double n_c;
  double tau;
  double g_max;
  double s;
  double bandwidth;
} SaSensitivity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length
 * including the terminator, so a call with `len = 0` sizes the buffer.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t sa_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sa_version(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum SaStatus sa_trap_new(double mass, double omega0, double omega_c, struct SaTrap **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for a handle.
 */
enum SaStatus sa_trap_from_tilde_epsilon(double mass,
                                         double omega_tilde,
                                         double epsilon,
                                         struct SaTrap **out);

/**
 * # Safety
 * `trap` must be null or a handle from `sa_trap_*` not yet freed.
 */
void sa_trap_free(struct SaTrap *trap);

/**
 * # Safety
 * `trap` must be a live handle and `out` writable.
 */
enum SaStatus sa_trap_modes(const struct SaTrap *trap, struct SaModes *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SaStatus sa_force_zero(struct SaForce **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum SaStatus sa_force_constant(double gx, double gy, struct SaForce **out);

/**
 * `g(t) = (ax, ay)·cos(omega·t + phase)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum SaStatus sa_force_sinusoid(double ax,
                                double ay,
                                double omega,
                                double phase,
                                struct SaForce **out);

/**
 * Uniformly sampled drive, linearly interpolated.
 *
 * # Safety
 * `gx` and `gy` must be valid for `n` reads; `out` must be writable.
 */
enum SaStatus sa_force_tabulated(double t0,
                                 double dt,
                                 const double *gx,
                                 const double *gy,
                                 size_t n,
                                 struct SaForce **out);

/**
 * # Safety
 * `force` must be null or a live handle.
 */
void sa_force_free(struct SaForce *force);

/**
 * Ramsey response at `n` frequencies into `re`/`im`.
 *
 * # Safety
 * `trap` must be live; `omega`, `re`, `im` valid for `n` elements.
 */
enum SaStatus sa_response_up(const struct SaTrap *trap,
                             double r0,
                             double t,
                             const double *omega,
                             size_t n,
                             double *re,
                             double *im);

/**
 * Echo response at `n` frequencies into `re`/`im`.
 *
 * # Safety
 * As for [`sa_response_up`].
 */
enum SaStatus sa_response_cp(const struct SaTrap *trap,
                             double r0,
                             double t,
                             const double *omega,
                             size_t n,
                             double *re,
                             double *im);

/**
 * Runs a preset sequence from the spin-up ground state. `drive` may be
 * null for no drive.
 *
 * # Safety
 * `trap` must be live, `drive` null or live, `out` writable.
 */
enum SaStatus sa_run_preset(const struct SaTrap *trap,
                            enum SaSequence kind,
                            double r0x,
                            double r0y,
                            double t,
                            const struct SaForce *drive,
                            struct SaMeasurement *out);

/**
 * Sensitivity budget for Rb-87 with the given apparatus.
 *
 * # Safety
 * `out` must be writable.
 */
enum SaStatus sa_sensitivity_rb87(double temperature,
                                  double layer_spacing,
                                  double homogeneity_radius,
                                  double omega_tilde,
                                  double epsilon,
                                  double atoms_per_layer,
                                  struct SaSensitivity *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOC_ACCEL_H */
