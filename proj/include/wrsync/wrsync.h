/* C interface to the wrsync library. All functions are thread-safe with
 * respect to distinct handles. On failure a function returns a non-zero
 * wrs_status and wrs_last_error() describes the problem for the calling
 * thread. */
#ifndef WRSYNC_H
#define WRSYNC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WRS_API __declspec(dllexport)
#else
#define WRS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wrs_status {
  WRS_OK = 0,
  WRS_ERR_INVALID_ARGUMENT = 1,
  WRS_ERR_VALIDATION = 2,
  WRS_ERR_LINK = 3,
  WRS_ERR_PARSE = 4,
  WRS_ERR_PAIRING = 5,
  WRS_ERR_IO = 6,
  WRS_ERR_INTERNAL = 7
} wrs_status;

typedef struct wrs_series wrs_series;
typedef struct wrs_tags wrs_tags;
typedef struct wrs_stability wrs_stability;
typedef struct wrs_scenario wrs_scenario;

typedef enum wrs_estimator { WRS_TDEV = 0, WRS_ADEV = 1, WRS_MDEV = 2 } wrs_estimator;

typedef struct wrs_stability_point {
  double tau_s;
  int64_t m;
  double value;
  double ci_low;
  double ci_high;
  int64_t n_used;
  int noise_alpha;
  double edf;
  int reliable;
} wrs_stability_point;

typedef struct wrs_run_options {
  const char* out_dir;
  int has_seed;
  uint64_t seed;
  int64_t decimate;
  unsigned threads;
} wrs_run_options;

WRS_API const char* wrs_version(void);
WRS_API const char* wrs_last_error(void);
WRS_API const char* wrs_status_name(wrs_status status);
WRS_API void wrs_string_free(char* s);

/* Phase series */
WRS_API wrs_status wrs_series_create(double tau0_s, const double* samples_ps, size_t n, wrs_series** out);
WRS_API wrs_status wrs_series_read_csv(const char* path, wrs_series** out);
WRS_API wrs_status wrs_series_write_csv(const wrs_series* series, const char* path);
WRS_API void wrs_series_free(wrs_series* series);
WRS_API size_t wrs_series_size(const wrs_series* series);
WRS_API double wrs_series_tau0(const wrs_series* series);
WRS_API const double* wrs_series_data(const wrs_series* series);

/* Stability. factors may be NULL (n_factors 0) for the default set. With
 * with_confidence non-zero, TDEV and MDEV results carry 1-sigma bounds. */
WRS_API wrs_status wrs_stability_compute(const wrs_series* series, wrs_estimator estimator, const int64_t* factors,
                                         size_t n_factors, int with_confidence, wrs_stability** out);
WRS_API size_t wrs_stability_size(const wrs_stability* result);
WRS_API wrs_status wrs_stability_point_at(const wrs_stability* result, size_t index, wrs_stability_point* out);
WRS_API wrs_status wrs_stability_write_csv(const wrs_stability* result, const char* path);
WRS_API void wrs_stability_free(wrs_stability* result);
WRS_API wrs_status wrs_adjacent_jitter(const wrs_series* series, double* first_difference_ps, double* tdev_tau0_ps);

/* Tag captures (CSV or binary) */
WRS_API wrs_status wrs_tags_read(const char* path, wrs_tags** out);
WRS_API void wrs_tags_free(wrs_tags* tags);
WRS_API size_t wrs_tags_channel_count(const wrs_tags* tags);
WRS_API uint32_t wrs_tags_channel_id(const wrs_tags* tags, size_t index);
WRS_API size_t wrs_tags_event_count(const wrs_tags* tags, size_t index);
/* Rates are exact decimals or "num/den" strings in hertz. */
WRS_API wrs_status wrs_analyze_tags(const wrs_tags* tags, uint32_t channel_a, uint32_t channel_b, const char* rate_a,
                                    const char* rate_b, const int64_t* factors, size_t n_factors,
                                    wrs_stability** out);

/* Scenarios */
WRS_API size_t wrs_builtin_count(void);
WRS_API const char* wrs_builtin_name(size_t index);
WRS_API wrs_status wrs_scenario_builtin(const char* name, wrs_scenario** out);
WRS_API wrs_status wrs_scenario_parse(const char* json_text, wrs_scenario** out);
/* A built-in name or a path to a JSON document. */
WRS_API wrs_status wrs_scenario_load(const char* name_or_path, wrs_scenario** out);
WRS_API wrs_status wrs_scenario_to_json(const wrs_scenario* scenario, char** out);
WRS_API wrs_status wrs_scenario_run(const wrs_scenario* scenario, const wrs_run_options* options,
                                    char** manifest_path);
WRS_API void wrs_scenario_free(wrs_scenario* scenario);

/* Two-photon indistinguishability */
WRS_API wrs_status wrs_indistinguishability(double delta_t_ps, double sigma_ps, double* out);
WRS_API wrs_status wrs_sigma_from_fwhm(double fwhm_ps, double* out);
WRS_API wrs_status wrs_fwhm_from_sigma(double sigma_ps, double* out);
WRS_API wrs_status wrs_required_jitter(double target_i, double sigma_ps, double* out);
/* Writes overlap.csv and visibility.csv into dir. */
WRS_API wrs_status wrs_write_hom_curves(double delta_t_ps, double sigma_ps, const char* dir);

#ifdef __cplusplus
}
#endif

#endif
