#ifndef JQF_H
#define JQF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. `JQF_STATUS_OK` is zero.
 */
typedef enum JqfStatus {
  JQF_STATUS_OK = 0,
  JQF_STATUS_NULL_POINTER = 1,
  JQF_STATUS_INVALID_PARAMETER = 2,
  JQF_STATUS_DIVERGENT_LIFETIME = 3,
  JQF_STATUS_ZERO_COUPLING = 4,
  JQF_STATUS_RESONANT_CAVITY = 5,
  JQF_STATUS_BRANCH_MISMATCH = 6,
  JQF_STATUS_NOT_COLOCATED = 7,
  JQF_STATUS_STEP_TOO_LARGE = 8,
  JQF_STATUS_NON_FINITE = 9,
  JQF_STATUS_UNPHYSICAL = 10,
  JQF_STATUS_INVALID_TIMES = 11,
  JQF_STATUS_INVALID_DRIVE = 12,
  JQF_STATUS_BUFFER_TOO_SMALL = 13,
  JQF_STATUS_PANIC = 14,
} JqfStatus;

/**
 * Column selector for [`jqf_trajectory_copy`].
 */
typedef enum JqfColumn {
  JQF_COLUMN_TIME = 0,
  JQF_COLUMN_P1 = 1,
  JQF_COLUMN_P2 = 2,
  JQF_COLUMN_PURITY = 3,
} JqfColumn;

/**
 * Validated parameters together with their couplings referenced to the DQ
 * frequency. Opaque.
 */
typedef struct JqfSystem JqfSystem;

/**
 * Sampled populations. Opaque.
 */
typedef struct JqfTrajectory JqfTrajectory;

/**
 * System parameters in SI angular units (rad/s, m, m/s).
 */
typedef struct JqfParams {
  double omega1;
  double omega2;
  double l1;
  double l2;
  double gamma1;
  double gamma2;
  double gamma_i1;
  double gamma_i2;
  double velocity;
} JqfParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into this library on the same
 * thread.
 */
const char *jqf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *jqf_version(void);

/**
 * Reference parameters: 5 GHz qubits, λ = 20 mm, DQ at the end, JQF at λ/2.
 *
 * # Safety
 * `out` must be NULL or point to writable memory for one `JqfParams`.
 */
enum JqfStatus jqf_params_default(struct JqfParams *out);

/**
 * Validates `params` and derives the couplings.
 *
 * # Safety
 * `params` must point to a valid `JqfParams`; `out` to writable storage for
 * one pointer. Release the result with [`jqf_system_free`].
 */
enum JqfStatus jqf_system_new(const struct JqfParams *params, struct JqfSystem **out);

/**
 * # Safety
 * `sys` must be NULL or a pointer from [`jqf_system_new`] not yet freed.
 */
void jqf_system_free(struct JqfSystem *sys);

/**
 * Copies the parameters the system was built from.
 *
 * # Safety
 * `sys` must be a live system; `out` writable for one `JqfParams`.
 */
enum JqfStatus jqf_system_params(const struct JqfSystem *sys, struct JqfParams *out);

/**
 * ξ in row-major order as interleaved (re, im) pairs: 8 doubles.
 *
 * # Safety
 * `sys` must be a live system; `out` writable for 8 doubles.
 */
enum JqfStatus jqf_system_xi(const struct JqfSystem *sys, double *out);

/**
 * DQ drive coupling η = √(2γ₁) cos θ₁.
 *
 * # Safety
 * `sys` must be a live system; `out` writable for one double.
 */
enum JqfStatus jqf_system_eta(const struct JqfSystem *sys, double *out);

/**
 * Radiative lifetime of the protected DQ (seconds).
 *
 * # Safety
 * `sys` must be a live system; `out` writable for one double.
 */
enum JqfStatus jqf_system_lifetime(const struct JqfSystem *sys, double *out);

/**
 * Free decay of the excited DQ at `times` (seconds, non-decreasing).
 *
 * # Safety
 * `sys` must be a live system, `times` readable for `n` doubles, `out`
 * writable for one pointer.
 */
enum JqfStatus jqf_decay(const struct JqfSystem *sys,
                         const double *times,
                         size_t n,
                         struct JqfTrajectory **out);

/**
 * Retarded decay up to `t_end`. `step <= 0` picks the default step. The
 * largest deviation from the free-evolution model goes to `max_dev` when it
 * is not NULL.
 *
 * # Safety
 * `sys` must be a live system, `out` writable for one pointer, `max_dev`
 * NULL or writable for one double.
 */
enum JqfStatus jqf_dde(const struct JqfSystem *sys,
                       double t_end,
                       double step,
                       double *max_dev,
                       struct JqfTrajectory **out);

/**
 * Continuous resonant drive whose free-DQ Rabi frequency is `rabi` (rad/s).
 *
 * # Safety
 * As for [`jqf_decay`].
 */
enum JqfStatus jqf_rabi(const struct JqfSystem *sys,
                        double rabi,
                        const double *times,
                        size_t n,
                        struct JqfTrajectory **out);

/**
 * One square π-pulse of length `duration` starting at t = 0.
 *
 * # Safety
 * As for [`jqf_decay`].
 */
enum JqfStatus jqf_pi_pulse(const struct JqfSystem *sys,
                            double duration,
                            const double *times,
                            size_t n,
                            struct JqfTrajectory **out);

/**
 * `n_pulses` π-pulses of length `duration`, one every `period`.
 *
 * # Safety
 * As for [`jqf_decay`].
 */
enum JqfStatus jqf_pulse_train(const struct JqfSystem *sys,
                               double duration,
                               double period,
                               size_t n_pulses,
                               const double *times,
                               size_t n,
                               struct JqfTrajectory **out);

/**
 * Driven DQ on its own (no JQF): P₁ at `times` written to `p1_out`.
 *
 * # Safety
 * `times` readable and `p1_out` writable for `n` doubles.
 */
enum JqfStatus jqf_free_rabi(double gamma1,
                             double amplitude,
                             const double *times,
                             size_t n,
                             double *p1_out);

/**
 * Number of samples, 0 for NULL.
 *
 * # Safety
 * `traj` must be NULL or a live trajectory.
 */
size_t jqf_trajectory_len(const struct JqfTrajectory *traj);

/**
 * Copies one column into `buf`, which must hold at least
 * [`jqf_trajectory_len`] doubles.
 *
 * # Safety
 * `traj` must be a live trajectory; `buf` writable for `capacity` doubles.
 */
enum JqfStatus jqf_trajectory_copy(const struct JqfTrajectory *traj,
                                   enum JqfColumn column,
                                   double *buf,
                                   size_t capacity);

/**
 * # Safety
 * `traj` must be NULL or a trajectory from this library not yet freed.
 */
void jqf_trajectory_free(struct JqfTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JQF_H */
