#ifndef ADMITUNE_ADMITUNE_H
#define ADMITUNE_ADMITUNE_H

#include <stddef.h>
#include <stdint.h>

#if defined(ADMITUNE_BUILDING_LIBRARY)
#define ADMITUNE_API __attribute__((visibility("default")))
#else
#define ADMITUNE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum admitune_status {
  ADMITUNE_OK = 0,
  ADMITUNE_ERR_INVALID_ARGUMENT = 1,
  ADMITUNE_ERR_NOT_FOUND = 2,
  ADMITUNE_ERR_SCENARIO_CONFIG = 3,
  ADMITUNE_ERR_GIMBAL_LOCK = 4,
  ADMITUNE_ERR_COVARIANCE = 5,
  ADMITUNE_ERR_SINGULAR_INNOVATION = 6,
  ADMITUNE_ERR_LOG_MISMATCH = 7,
  ADMITUNE_ERR_IO = 8,
  ADMITUNE_ERR_BUFFER_TOO_SMALL = 9,
  ADMITUNE_ERR_INTERNAL = 10
} admitune_status;

typedef struct admitune_scenario admitune_scenario;
typedef struct admitune_runlog admitune_runlog;

/* Message for the most recent failure on the calling thread ("" if none). */
ADMITUNE_API const char* admitune_last_error(void);
ADMITUNE_API const char* admitune_status_string(admitune_status status);
ADMITUNE_API const char* admitune_version(void);

/* Scenarios */
ADMITUNE_API admitune_status admitune_scenario_load(const char* path, admitune_scenario** out);
/* base_dir resolves relative reference files; may be NULL. */
ADMITUNE_API admitune_status admitune_scenario_parse(const char* yaml, const char* base_dir,
                                                     admitune_scenario** out);
ADMITUNE_API admitune_status admitune_scenario_clone(const admitune_scenario* scenario, admitune_scenario** out);
ADMITUNE_API void admitune_scenario_free(admitune_scenario* scenario);

ADMITUNE_API admitune_status admitune_scenario_set_seed(admitune_scenario* scenario, uint64_t seed);
ADMITUNE_API admitune_status admitune_scenario_set_autotune(admitune_scenario* scenario, int enabled);
ADMITUNE_API admitune_status admitune_scenario_set_duration(admitune_scenario* scenario, double seconds);
/* Multiplies the tuner's process covariance by `scale` (>= 0). */
ADMITUNE_API admitune_status admitune_scenario_scale_process_noise(admitune_scenario* scenario, double scale);
ADMITUNE_API admitune_status admitune_scenario_name(const admitune_scenario* scenario, const char** name);

/* Runs */
ADMITUNE_API admitune_status admitune_run(const admitune_scenario* scenario, admitune_runlog** out);
ADMITUNE_API admitune_status admitune_runlog_write(const admitune_runlog* log, const char* path);
ADMITUNE_API admitune_status admitune_runlog_load(const char* path, admitune_runlog** out);
ADMITUNE_API void admitune_runlog_free(admitune_runlog* log);
ADMITUNE_API size_t admitune_runlog_size(const admitune_runlog* log);

typedef struct admitune_record {
  double t;
  double h2;
  double ref_norm;
  double grasp_ref;
  double grasp_meas;
  double ref[7];
  double meas[7];
  double theta[24];
  int slip;
} admitune_record;

ADMITUNE_API admitune_status admitune_runlog_record(const admitune_runlog* log, size_t index,
                                                    admitune_record* out);

typedef struct admitune_summary {
  size_t steps;
  double dt;
  double duration;
  double final_h2;
  double mean_h2;
  double peak_h2;
  double convergence_time; /* valid when converged != 0 */
  int converged;
  size_t slip_violations;
  double theta[24];
} admitune_summary;

/* band: fraction of the reference magnitude (0.05 = 5%). */
ADMITUNE_API admitune_status admitune_runlog_summary(const admitune_runlog* log, double band,
                                                     admitune_summary* out);

typedef struct admitune_comparison {
  double fraction_a_below_b; /* ties count 1/2 */
  double mean_delta_h2;
  size_t compared_steps;
  double convergence_a;
  double convergence_b;
  int converged_a;
  int converged_b;
} admitune_comparison;

/* Compares steps with t >= after. Fails with ADMITUNE_ERR_LOG_MISMATCH when
   dt or duration differ. */
ADMITUNE_API admitune_status admitune_compare(const admitune_runlog* a, const admitune_runlog* b, double after,
                                              admitune_comparison* out);

/* Text renderings. Writes at most `capacity` bytes including the terminator
   and reports the full size in *needed; ADMITUNE_ERR_BUFFER_TOO_SMALL if it
   did not fit. */
ADMITUNE_API admitune_status admitune_runlog_summary_text(const admitune_runlog* log, double band, char* buffer,
                                                          size_t capacity, size_t* needed);
ADMITUNE_API admitune_status admitune_compare_text(const admitune_runlog* a, const admitune_runlog* b,
                                                   double after, double window, char* buffer, size_t capacity,
                                                   size_t* needed);

/* Wrench estimation: solves A u = b for the given fingertip positions. */
ADMITUNE_API admitune_status admitune_estimate_fingertip_wrench(const double b[7], const double p1[3],
                                                                const double p2[3], double u[7]);

#ifdef __cplusplus
}
#endif

#endif
