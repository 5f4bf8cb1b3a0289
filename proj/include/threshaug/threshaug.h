#ifndef THRESHAUG_H
#define THRESHAUG_H

/* C interface to the threshaug library. Every function returns a status
 * code; on failure threshaug_last_error() describes the problem for the
 * calling thread. Handles are opaque and freed with their _free function;
 * passing NULL to a _free function is a no-op. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define THRESHAUG_API __declspec(dllexport)
#elif defined(__GNUC__)
#define THRESHAUG_API __attribute__((visibility("default")))
#else
#define THRESHAUG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum threshaug_status {
  THRESHAUG_OK = 0,
  THRESHAUG_ERR_INVALID_ARGUMENT = 1,
  THRESHAUG_ERR_DIMENSION = 2,
  THRESHAUG_ERR_IO = 3,
  THRESHAUG_ERR_PARSE = 4,
  THRESHAUG_ERR_DATASET = 5,
  THRESHAUG_ERR_DEGENERATE = 6,
  THRESHAUG_ERR_NON_INVERTIBLE = 7,
  THRESHAUG_ERR_CONFIG = 8,
  THRESHAUG_ERR_NOT_FOUND = 9,
  THRESHAUG_ERR_RUNTIME = 10,
  THRESHAUG_ERR_BUFFER_TOO_SMALL = 11
} threshaug_status;

typedef struct threshaug_config threshaug_config;
typedef struct threshaug_result threshaug_result;
typedef struct threshaug_dataset threshaug_dataset;
typedef struct threshaug_augmenter threshaug_augmenter;

/* Message for the last failing call on this thread; "" when none. Valid
 * until the next call into the library from the same thread. */
THRESHAUG_API const char* threshaug_last_error(void);
THRESHAUG_API const char* threshaug_status_name(threshaug_status status);
THRESHAUG_API const char* threshaug_version(void);

/* Copies a NUL-terminated string into buf. When buf is too small (or NULL)
 * nothing is written, *needed receives the size including the terminator and
 * THRESHAUG_ERR_BUFFER_TOO_SMALL is returned. */

/* ---- configuration ---- */
THRESHAUG_API threshaug_status threshaug_config_load(const char* path, threshaug_config** out);
THRESHAUG_API threshaug_status threshaug_config_parse(const char* json_text, const char* base_dir,
                                                      threshaug_config** out);
THRESHAUG_API void threshaug_config_free(threshaug_config* cfg);
THRESHAUG_API threshaug_status threshaug_config_set_seed(threshaug_config* cfg, uint64_t seed);
THRESHAUG_API threshaug_status threshaug_config_set_jobs(threshaug_config* cfg, unsigned jobs);
THRESHAUG_API threshaug_status threshaug_config_set_output_dir(threshaug_config* cfg, const char* dir);
THRESHAUG_API threshaug_status threshaug_config_set_s_values(threshaug_config* cfg, const size_t* s,
                                                             size_t count);
THRESHAUG_API threshaug_status threshaug_config_output_dir(const threshaug_config* cfg, char* buf,
                                                           size_t size, size_t* needed);

/* ---- experiment results ---- */
typedef void (*threshaug_log_fn)(const char* line, void* user);

/* Runs the full protocol. `log` may be NULL; it is called serially. */
THRESHAUG_API threshaug_status threshaug_run(const threshaug_config* cfg, threshaug_log_fn log,
                                             void* user, threshaug_result** out);
THRESHAUG_API threshaug_status threshaug_result_load(const char* records_path, threshaug_result** out);
/* Concatenates `count` results; duplicate records are an error. */
THRESHAUG_API threshaug_status threshaug_result_merge(const threshaug_result* const* parts, size_t count,
                                                      threshaug_result** out);
THRESHAUG_API void threshaug_result_free(threshaug_result* r);
THRESHAUG_API size_t threshaug_result_count(const threshaug_result* r);
THRESHAUG_API size_t threshaug_result_error_count(const threshaug_result* r);
THRESHAUG_API threshaug_status threshaug_result_write_records(const threshaug_result* r, const char* path);
THRESHAUG_API threshaug_status threshaug_result_write_timings(const threshaug_result* r, const char* path);

/* ---- reports ---- */
THRESHAUG_API threshaug_status threshaug_report_summary(const threshaug_result* r, size_t s,
                                                        const char* path);
THRESHAUG_API threshaug_status threshaug_report_s_curve(const threshaug_result* r, const char* regressor,
                                                        const char* dataset, const char* path);
THRESHAUG_API threshaug_status threshaug_report_critical_diagram(const threshaug_result* r, size_t s,
                                                                 const char* path);
/* Writes records, timings and every default report into dir, creating it.
 * `count` (may be NULL) receives the number of files written. */
THRESHAUG_API threshaug_status threshaug_report_default(const threshaug_result* r, const char* dir,
                                                        size_t* count);
/* Conventional file names inside an output directory. */
THRESHAUG_API threshaug_status threshaug_report_summary_name(size_t s, char* buf, size_t size,
                                                             size_t* needed);
THRESHAUG_API threshaug_status threshaug_report_s_curve_name(const char* regressor, const char* dataset,
                                                             char* buf, size_t size, size_t* needed);
/* Largest s in the result; NOT_FOUND when it has no augmented records. */
THRESHAUG_API threshaug_status threshaug_result_max_s(const threshaug_result* r, size_t* s);
/* Number of distinct datasets / regressors in the result, and the i-th name. */
THRESHAUG_API size_t threshaug_result_dataset_count(const threshaug_result* r);
THRESHAUG_API size_t threshaug_result_regressor_count(const threshaug_result* r);
THRESHAUG_API threshaug_status threshaug_result_dataset_name(const threshaug_result* r, size_t i, char* buf,
                                                             size_t size, size_t* needed);
THRESHAUG_API threshaug_status threshaug_result_regressor_name(const threshaug_result* r, size_t i,
                                                               char* buf, size_t size, size_t* needed);

/* ---- datasets ---- */
/* Loads, drops incomplete rows and preprocesses (one-hot coding, dropping
 * dates, identifiers, constants and collinear columns). delimiter 0 means ','. */
THRESHAUG_API threshaug_status threshaug_dataset_load(const char* path, const char* target, char delimiter,
                                                      threshaug_dataset** out);
THRESHAUG_API void threshaug_dataset_free(threshaug_dataset* ds);
THRESHAUG_API size_t threshaug_dataset_rows(const threshaug_dataset* ds);
THRESHAUG_API size_t threshaug_dataset_features(const threshaug_dataset* ds);
THRESHAUG_API size_t threshaug_dataset_dropped_rows(const threshaug_dataset* ds);
THRESHAUG_API threshaug_status threshaug_dataset_feature_name(const threshaug_dataset* ds, size_t j,
                                                              char* buf, size_t size, size_t* needed);
/* Row-major copy of the feature matrix (rows * features doubles). */
THRESHAUG_API threshaug_status threshaug_dataset_copy_features(const threshaug_dataset* ds, double* out,
                                                               size_t count);
THRESHAUG_API threshaug_status threshaug_dataset_copy_target(const threshaug_dataset* ds, double* out,
                                                             size_t count);

/* ---- augmenter ---- */
typedef struct threshaug_forest_params {
  size_t n_trees;   /* default 100 */
  int max_depth;    /* < 0: unlimited */
  size_t min_leaf;  /* default 1 */
  unsigned jobs;    /* threads for the S classifier fits; never changes results */
} threshaug_forest_params;

THRESHAUG_API threshaug_forest_params threshaug_forest_params_default(void);

/* x is row-major n x d; y holds already-transformed targets. */
THRESHAUG_API threshaug_status threshaug_augmenter_fit(const double* x, size_t n, size_t d, const double* y,
                                                       size_t s, const threshaug_forest_params* params,
                                                       uint64_t seed, threshaug_augmenter** out);
THRESHAUG_API void threshaug_augmenter_free(threshaug_augmenter* a);
THRESHAUG_API size_t threshaug_augmenter_effective_s(const threshaug_augmenter* a);
THRESHAUG_API threshaug_status threshaug_augmenter_thresholds(const threshaug_augmenter* a, double* out,
                                                              size_t count);
/* Writes n x effective_s class-1 probabilities (X') row-major into out. */
THRESHAUG_API threshaug_status threshaug_augmenter_transform(const threshaug_augmenter* a, const double* x,
                                                             size_t n, size_t d, double* out, size_t count);

/* ---- target transform ---- */
typedef struct threshaug_target_transform {
  double mean;
  double std;
  double shift;
  double lambda;
} threshaug_target_transform;

THRESHAUG_API threshaug_status threshaug_target_transform_fit(const double* y, size_t n,
                                                              threshaug_target_transform* out);
/* inverse != 0 applies the inverse map. */
THRESHAUG_API threshaug_status threshaug_target_transform_apply(const threshaug_target_transform* t,
                                                                const double* y, size_t n, int inverse,
                                                                double* out);

#ifdef __cplusplus
}
#endif

#endif /* THRESHAUG_H */
