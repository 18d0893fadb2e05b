/* C interface to the SOCO toolkit.
 *
 * All types are opaque handles created and destroyed through these functions.
 * Every fallible call returns a soco_status; on failure the thread-local
 * message from soco_last_error() describes what went wrong. Strings returned
 * by accessors stay owned by their handle and remain valid until it is freed.
 */
#ifndef SOCO_H
#define SOCO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SOCO_API __declspec(dllexport)
#else
#define SOCO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum soco_status {
  SOCO_OK = 0,
  SOCO_INVALID_ARGUMENT = 1,
  SOCO_OUT_OF_REGIME = 2,   /* bound requested outside beta > 4/m */
  SOCO_NO_CONVERGENCE = 3,  /* an iterative solve hit its cap */
  SOCO_IO_ERROR = 4,
  SOCO_INTERNAL_ERROR = 5,
} soco_status;

typedef struct soco_instance soco_instance;
typedef struct soco_trajectory soco_trajectory;
typedef struct soco_report soco_report;

SOCO_API const char *soco_status_name(soco_status status);
SOCO_API const char *soco_last_error(void);
SOCO_API void soco_version(int *major, int *minor, int *patch);

/* ---- instances ---------------------------------------------------------
 * Quadratic instance: horizon costs 0.5 (x - center_t)' P_t (x - center_t)
 * + offset_t. P is horizon blocks of dim*dim doubles, row-major; centers is
 * horizon blocks of dim doubles; offsets may be NULL (all zero).
 */
SOCO_API soco_status soco_instance_create_quadratic(
    int dim, int horizon, const double *x0, const double *P,
    const double *centers, const double *offsets, soco_instance **out);
SOCO_API void soco_instance_free(soco_instance *instance);

/* ---- solvers ----------------------------------------------------------- */

typedef struct soco_obd_options {
  double beta;           /* <= 0 selects 2 + 10/m for the instance */
  double level_tol;      /* balance tolerance, relative */
  double projection_tol; /* sublevel-projection tolerance, relative */
  int max_bisection_iters;
  int balance_mode;      /* 0 = zero-shifted (default), 1 = absolute level */
} soco_obd_options;

SOCO_API void soco_obd_options_init(soco_obd_options *options);

SOCO_API soco_status soco_obd_run(const soco_instance *instance,
                                  const soco_obd_options *options,
                                  soco_trajectory **out);
SOCO_API soco_status soco_offline_solve(const soco_instance *instance,
                                        double tol, soco_trajectory **out);

SOCO_API int soco_trajectory_length(const soco_trajectory *trajectory);
SOCO_API double soco_trajectory_total_cost(const soco_trajectory *trajectory);
SOCO_API double soco_trajectory_total_hitting(const soco_trajectory *t);
SOCO_API double soco_trajectory_total_movement(const soco_trajectory *t);
/* point t in [1, horizon]; writes dim doubles */
SOCO_API soco_status soco_trajectory_point(const soco_trajectory *trajectory,
                                           int t, double *out);
SOCO_API soco_status soco_trajectory_step(const soco_trajectory *trajectory,
                                          int t, double *hitting,
                                          double *movement, double *level,
                                          double *balance_residual);
SOCO_API void soco_trajectory_free(soco_trajectory *trajectory);

/* ---- bound calculators -------------------------------------------------- */

SOCO_API soco_status soco_cr_bound(double m, double beta, double *out);
SOCO_API soco_status soco_accuracy_bound(double m, double beta, double epsilon,
                                         double *alpha, double *tracking,
                                         double *smoothness);
SOCO_API soco_status soco_regret_bound(double G, double m, double beta,
                                       double epsilon, int64_t horizon,
                                       double *out);

/* ---- experiment harness -------------------------------------------------
 * config_json is the scenario description (see README for the schema).
 * seed_override, when non-NULL, replaces the config seed. Runs write their
 * per-round CSV and summary JSON to the configured paths (default directory:
 * $SOCO_OUTPUT_DIR, falling back to the working directory).
 */
SOCO_API soco_status soco_experiment_run(const char *config_json,
                                         const uint64_t *seed_override,
                                         soco_report **out);
SOCO_API soco_status soco_experiment_sweep(const char *config_json,
                                           const char *param,
                                           const double *values, size_t count,
                                           const uint64_t *seed_override,
                                           soco_report **out);
SOCO_API soco_status soco_lqr_simulate(const char *config_json,
                                       const uint64_t *seed_override,
                                       soco_report **out);
/* suites == NULL or count == 0 runs every suite */
SOCO_API soco_status soco_verify_suites(const char *const *suites,
                                        size_t count, soco_report **out);

SOCO_API int soco_report_passed(const soco_report *report);
SOCO_API const char *soco_report_text(const soco_report *report);
SOCO_API const char *soco_report_summary_json(const soco_report *report);
SOCO_API const char *soco_report_csv(const soco_report *report);
SOCO_API void soco_report_free(soco_report *report);

#ifdef __cplusplus
}
#endif

#endif /* SOCO_H */
