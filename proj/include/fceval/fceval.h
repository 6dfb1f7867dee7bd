/* C interface to the fceval forecast-evaluation library. */
#ifndef FCEVAL_FCEVAL_H
#define FCEVAL_FCEVAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FCEVAL_BUILDING)
#define FCE_API __declspec(dllexport)
#else
#define FCE_API __declspec(dllimport)
#endif
#else
#define FCE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fce_status {
    FCE_OK = 0,
    FCE_INVALID_ARGUMENT = 1,
    FCE_CONFIG = 2,
    FCE_VALIDATION = 3,
    FCE_DOMAIN = 4,
    FCE_INSUFFICIENT_DATA = 5,
    FCE_UNDEFINED = 6,
    FCE_IO = 7,
    FCE_INTERNAL = 8
} fce_status;

typedef enum fce_policy {
    FCE_POLICY_DEFAULT = -1, /* use the suite's own setting */
    FCE_POLICY_PROPAGATE = 0,
    FCE_POLICY_SKIP = 1,
    FCE_POLICY_ERROR = 2
} fce_policy;

typedef struct fce_dataset fce_dataset;
typedef struct fce_frame fce_frame;
typedef struct fce_report fce_report;

/* Message of the last failed call on this thread; "" after a success. */
FCE_API const char* fce_last_error(void);
FCE_API const char* fce_status_name(fce_status status);
FCE_API const char* fce_version(void);
/* Seed used when neither a flag nor FCEVAL_SEED provides one. */
FCE_API uint64_t fce_default_seed(void);

/* Datasets: long-form series CSV text (series_id,timestamp,value[,frequency]). */
FCE_API fce_status fce_dataset_from_csv(const char* csv_text, fce_dataset** out);
FCE_API void fce_dataset_free(fce_dataset* dataset);
FCE_API size_t fce_dataset_series_count(const fce_dataset* dataset);
FCE_API fce_status fce_dataset_series_length(const fce_dataset* dataset, const char* series_id, size_t* out);

/* Frames: forecasts CSV text (series_id,origin,step,model,forecast) joined to a dataset. */
FCE_API fce_status fce_frame_build(const fce_dataset* dataset, const char* forecasts_csv, fce_frame** out);
FCE_API void fce_frame_free(fce_frame* frame);
FCE_API size_t fce_frame_model_count(const fce_frame* frame);
FCE_API const char* fce_frame_model_name(const fce_frame* frame, size_t index);

/* One measure for one model. `benchmark` names a frame model or one of
   "naive", "seasonal-naive", "mean"; NULL means naive. `*defined` is 0 when
   the value is undefined under the policy. */
FCE_API fce_status fce_frame_measure(const fce_frame* frame, const char* measure, const char* model,
                                     const char* benchmark, fce_policy policy, double* value, int* defined);

/* Batch runs; each returns a report handle carrying the primary JSON and
   named artifacts. */
FCE_API fce_status fce_run_evaluate(const char* series_csv, const char* forecasts_csv, const char* suite_json,
                                    fce_policy policy, fce_report** out);
FCE_API fce_status fce_run_backtest(const char* series_csv, const char* split_json, const char* const* benchmarks,
                                    size_t n_benchmarks, uint64_t seed, fce_report** out);
FCE_API fce_status fce_run_compare(const char* const* report_jsons, size_t n_reports, const char* test_json,
                                   const double* alpha_override, fce_report** out);
FCE_API fce_status fce_run_advise(const char* profile_json, fce_report** out);
FCE_API fce_status fce_run_simulate(const char* dgp_json, uint64_t seed, fce_report** out);
FCE_API fce_status fce_run_pitfalls(const char* const* names, size_t n_names, uint64_t seed, int with_plots,
                                    fce_report** out);

FCE_API const char* fce_report_json(const fce_report* report);
FCE_API int fce_report_passed(const fce_report* report);
FCE_API size_t fce_report_artifact_count(const fce_report* report);
FCE_API const char* fce_report_artifact_name(const fce_report* report, size_t index);
FCE_API const char* fce_report_artifact_content(const fce_report* report, size_t index);
FCE_API void fce_report_free(fce_report* report);

/* Manifest text for a run. Arrays have n_inputs entries each. The result is
   owned by the returned report. */
FCE_API fce_status fce_manifest(const char* command, const char* const* roles, const char* const* paths,
                                const char* const* contents, size_t n_inputs, const char* config_text, uint64_t seed,
                                const char* policy, fce_report** out);

/* Scenario catalogue as JSON owned by the returned report. */
FCE_API fce_status fce_list_scenarios(fce_report** out);

/* Lower-case hex SHA-256 of a buffer into a 65-byte destination. */
FCE_API fce_status fce_sha256_hex(const void* data, size_t size, char out[65]);

#ifdef __cplusplus
}
#endif

#endif
