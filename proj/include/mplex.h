#ifndef MPLEX_H
#define MPLEX_H

/* C interface to the multiplex-network model library.
 *
 * All functions return MPLEX_OK on success. On failure they return an error
 * code, leave out-parameters untouched (or NULL), and record a message
 * retrievable with mplex_last_error() on the calling thread. */

#ifdef __cplusplus
extern "C" {
#endif

#define MPLEX_OK 0
#define MPLEX_ERR_NUMERIC 1 /* numerical abort (NaN/Inf guard, failed sampler) */
#define MPLEX_ERR_USAGE 2   /* bad arguments, bad config, file/format problems */

typedef struct mplex_dataset mplex_dataset;
typedef struct mplex_mask mplex_mask;
typedef struct mplex_trace mplex_trace;

const char* mplex_version(void);

/* message for the most recent failure on this thread ("" if none) */
const char* mplex_last_error(void);

/* release a string returned through a char** out-parameter */
void mplex_string_free(char* s);

/* ---- datasets: N symmetric binary adjacency samples on p_K nodes ---- */
int mplex_dataset_load(const char* path, mplex_dataset** out);
int mplex_dataset_save(const mplex_dataset* d, const char* path);
int mplex_dataset_dims(const mplex_dataset* d, int* nodes, int* samples);
void mplex_dataset_free(mplex_dataset* d);

/* ---- masks: held-out observed-layer entries ---- */
int mplex_mask_load(const char* path, mplex_mask** out);
int mplex_mask_save(const mplex_mask* m, const char* path);
int mplex_mask_dims(const mplex_mask* m, int* nodes, int* samples, int* entries);
void mplex_mask_free(mplex_mask* m);

/* ---- posterior chain traces ---- */
int mplex_trace_load(const char* path, mplex_trace** out);
int mplex_trace_save(const mplex_trace* t, const char* path);
int mplex_trace_dims(const mplex_trace* t, int* layers, int* samples, int* records);
void mplex_trace_free(mplex_trace* t);

/* ---- pipelines ----
 * config_json: UTF-8 JSON object (flat keys; unknown keys rejected).
 * Each call runs one full pipeline, writes the files named in the config,
 * and hands back a result/summary JSON object including the resolved
 * config. *result_json must be released with mplex_string_free(). */
int mplex_simulate(const char* config_json, char** result_json);
int mplex_fit(const char* config_json, char** result_json);
int mplex_select(const char* config_json, char** result_json);
int mplex_identify(const char* config_json, char** result_json);
int mplex_predict(const char* config_json, char** result_json);

#ifdef __cplusplus
}
#endif

#endif /* MPLEX_H */
