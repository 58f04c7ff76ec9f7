#ifndef CTRBOOST_C_API_H
#define CTRBOOST_C_API_H

/*
 * Stable C surface of the ctrboost engine.
 *
 * Every function returns a status code (CTB_OK on success). On failure the
 * message is available from ctb_last_error() on the same thread until the
 * next failing call. Output handles are written only on success.
 *
 * Handles are opaque and owned by the engine from creation until the
 * matching *_free call. Freeing a handle twice, or passing a freed handle,
 * returns CTB_ERR_INVALID_HANDLE. A single handle must not be used from two
 * threads at once; distinct handles are independent.
 *
 * Input buffers are copied before the call returns; the engine never keeps
 * caller memory.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CTRBOOST_BUILDING_LIBRARY)
#    define CTB_API __declspec(dllexport)
#  else
#    define CTB_API __declspec(dllimport)
#  endif
#else
#  define CTB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define CTB_API_VERSION 1

/* Status codes. Values are stable across releases. */
#define CTB_OK 0
#define CTB_ERR_INVALID_ARGUMENT 1
#define CTB_ERR_IO 2
#define CTB_ERR_PARSE 3
#define CTB_ERR_SCHEMA 4
#define CTB_ERR_VERSION 5
#define CTB_ERR_CHECKSUM 6
#define CTB_ERR_TRUNCATED 7
#define CTB_ERR_INVALID_HANDLE 8
#define CTB_ERR_UNDEFINED_METRIC 9
#define CTB_ERR_BUFFER_TOO_SMALL 10
#define CTB_ERR_INTERNAL 99

typedef struct ctb_dataset ctb_dataset;
typedef struct ctb_model ctb_model;
typedef struct ctb_spec ctb_spec;
typedef struct ctb_report ctb_report;

#define CTB_COLUMN_NUMERICAL 0
#define CTB_COLUMN_CATEGORICAL 1

/* One column-major input column. */
typedef struct ctb_column {
    const char* name;
    int kind;                       /* CTB_COLUMN_* */
    const double* values;           /* numerical: n_rows values, NaN = missing */
    const int32_t* codes;           /* categorical: n_rows indices into categories, -1 = missing */
    const char* const* categories;  /* categorical: distinct category strings */
    size_t n_categories;
} ctb_column;

/* ---- library ---- */
CTB_API int ctb_api_version(void);
CTB_API const char* ctb_version_string(void);
CTB_API const char* ctb_last_error(void);
CTB_API const char* ctb_status_name(int status);

/* ---- datasets ---- */
/* target may be NULL (scoring input); target_name may be NULL ("target"). */
CTB_API int ctb_dataset_from_columns(const ctb_column* columns, size_t n_columns, size_t n_rows,
                                     const uint8_t* target, const char* target_name,
                                     ctb_dataset** out);
/* schema_path, target and delimiter are optional (NULL / NULL / 0 = ','). */
CTB_API int ctb_dataset_load_csv(const char* path, const char* schema_path, const char* target,
                                 char delimiter, ctb_dataset** out);
CTB_API int ctb_dataset_num_rows(const ctb_dataset* ds, size_t* out);
CTB_API int ctb_dataset_num_features(const ctb_dataset* ds, size_t* out);
/* Copies the 0/1 target into out[0..n_rows); fails without a target. */
CTB_API int ctb_dataset_target(const ctb_dataset* ds, uint8_t* out, size_t capacity);
/* Numerical column values; fails for categorical columns. */
CTB_API int ctb_dataset_numeric_column(const ctb_dataset* ds, size_t index, double* out,
                                       size_t capacity);
CTB_API int ctb_dataset_free(ctb_dataset* ds);

/* ---- encoders ---- */
/* Fits the encoder described by keys/values (encoder, smoothing, k_folds,
 * n_permutations, prior, seed) on ds and returns the encoded training data. */
CTB_API int ctb_encode(const ctb_dataset* ds, const char* const* keys, const char* const* values,
                       size_t n_pairs, ctb_dataset** out);

/* ---- training and models ---- */
/*
 * Config keys: n_trees, learning_rate, max_depth, lambda, gamma,
 * min_child_weight, max_bins, early_stopping_rounds, cat_mode, seed,
 * n_threads, encoder, smoothing, k_folds, n_permutations, prior. Unknown or
 * repeated keys are rejected. Missing keys take engine defaults, except that
 * early_stopping_rounds defaults to 0 when valid is NULL. cat_mode follows
 * the encoder when not given. seed seeds both learner and encoder.
 */
CTB_API int ctb_train(const ctb_dataset* train, const ctb_dataset* valid, const char* const* keys,
                      const char* const* values, size_t n_pairs, ctb_model** out);
/* Trains with the learner and encoder settings of an experiment spec. */
CTB_API int ctb_train_with_spec(const ctb_dataset* train, const ctb_dataset* valid,
                                const ctb_spec* spec, ctb_model** out);
/* Writes n_rows probabilities; capacity must be at least n_rows. */
CTB_API int ctb_predict(const ctb_model* model, const ctb_dataset* ds, double* out, size_t capacity);
CTB_API int ctb_model_save(const ctb_model* model, const char* path);
CTB_API int ctb_model_load(const char* path, ctb_model** out);
CTB_API int ctb_model_num_trees(const ctb_model* model, size_t* out);
CTB_API int ctb_model_free(ctb_model* model);

/* ---- metrics ---- */
CTB_API int ctb_logloss(const uint8_t* y, const double* p, size_t n, double* out);
CTB_API int ctb_auroc(const uint8_t* y, const double* scores, size_t n, double* out);
/* auroc_defined is set to 0 for single-class inputs (auroc untouched). */
CTB_API int ctb_evaluate(const ctb_dataset* ds, const double* p, size_t n, double* logloss,
                         double* auroc, int* auroc_defined);

/* ---- experiment specs ---- */
CTB_API int ctb_spec_default(ctb_spec** out);
CTB_API int ctb_spec_load(const char* path, ctb_spec** out);
CTB_API int ctb_spec_set(ctb_spec* spec, const char* key, const char* value);
/* Writes the experiment spec file text. *needed receives the size including the
 * terminator; CTB_ERR_BUFFER_TOO_SMALL when capacity is short. */
CTB_API int ctb_spec_render(const ctb_spec* spec, char* buffer, size_t capacity, size_t* needed);
CTB_API int ctb_spec_free(ctb_spec* spec);

/* ---- benchmark runs ---- */
CTB_API int ctb_run_experiment(const ctb_spec* spec, ctb_report** out);
/* modes: encoder mode names (label, target, kfold_target, ordered_ts, native). */
CTB_API int ctb_run_ablation(const ctb_spec* spec, const char* const* modes, size_t n_modes,
                             ctb_report** out);
CTB_API int ctb_track_cost_curve(const ctb_spec* spec, ctb_report** out);
CTB_API int ctb_simulate_staleness(const ctb_spec* spec, ctb_report** out);

/* ---- reports ---- */
CTB_API int ctb_report_load(const char* path, ctb_report** out);
CTB_API int ctb_report_rerun(const ctb_report* report, ctb_report** out);
/* format: "json" or "csv". */
CTB_API int ctb_report_write(const ctb_report* report, const char* format, const char* path);
CTB_API int ctb_report_render(const ctb_report* report, const char* format, char* buffer,
                              size_t capacity, size_t* needed);
/* *same = 1 when both reports hold identical metrics (timings ignored). */
CTB_API int ctb_report_same_metrics(const ctb_report* a, const ctb_report* b, int* same);
CTB_API int ctb_report_free(ctb_report* report);

/* ---- external prediction files (CSV row_id,probability) ---- */
CTB_API int ctb_write_predictions(const double* p, size_t n, const char* path);
/* *n_rows receives the row count; CTB_ERR_BUFFER_TOO_SMALL when capacity is
 * short (out may be NULL to query the size). */
CTB_API int ctb_read_predictions(const char* path, double* out, size_t capacity, size_t* n_rows);

#ifdef __cplusplus
}
#endif

#endif
