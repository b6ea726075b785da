/* C interface to the moment_ensemble library.
 *
 * Every function returns an me_status. On failure the message is available from
 * me_last_error() on the same thread until the next call into the library.
 * Objects are opaque and owned by the caller; release them with the matching
 * *_free function. Strings returned through char** are released with me_string_free.
 */
#ifndef MOMENT_ENSEMBLE_H
#define MOMENT_ENSEMBLE_H

#include <stddef.h>

#if defined(MOMENT_ENSEMBLE_BUILDING_LIBRARY)
#define ME_API __attribute__((visibility("default")))
#else
#define ME_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum me_status {
    ME_OK = 0,
    ME_ERR_INVALID_ARGUMENT = 1,
    ME_ERR_NUMERICAL = 2,
    ME_ERR_IO = 3,
    ME_ERR_PARSE = 4,
    ME_ERR_INTERNAL = 5
} me_status;

typedef enum me_norm { ME_NORM_L1 = 1, ME_NORM_L2 = 2 } me_norm;

typedef struct me_moments me_moments;
typedef struct me_profile me_profile;
typedef struct me_config me_config;
typedef struct me_result me_result;

ME_API const char* me_version(void);
ME_API const char* me_last_error(void);
ME_API const char* me_status_name(me_status status);
ME_API void me_string_free(char* text);

/* Moment sequences */
ME_API me_status me_moments_create(size_t index_dim, size_t state_dim, unsigned max_order, me_moments** out);
ME_API me_status me_moments_load_csv(const char* path, me_moments** out);
ME_API me_status me_moments_parse_csv(const char* text, me_moments** out);
ME_API me_status me_moments_save_csv(const me_moments* m, const char* path);
ME_API me_status me_moments_to_csv(const me_moments* m, char** text);
ME_API me_status me_moments_shape(const me_moments* m, size_t* index_dim, size_t* state_dim, unsigned* max_order,
                                  size_t* index_count);
/* k has index_dim entries; component is 0-based. */
ME_API me_status me_moments_get(const me_moments* m, const unsigned* k, size_t component, double* value);
ME_API me_status me_moments_set(me_moments* m, const unsigned* k, size_t component, double value);
ME_API void me_moments_free(me_moments* m);

/* Ensemble profiles on a parameter grid */
/* Uniform midpoint grid with points[j] nodes on [lower[j], upper[j]]; states is row-major
 * nodes x state_dim and may be NULL for a zero profile. */
ME_API me_status me_profile_create_uniform(size_t dim, const double* lower, const double* upper, const size_t* points,
                                           size_t state_dim, const double* states, me_profile** out);
ME_API me_status me_profile_load_csv(const char* path, me_profile** out);
ME_API me_status me_profile_to_csv(const me_profile* profile, char** text);
ME_API me_status me_profile_shape(const me_profile* profile, size_t* dim, size_t* nodes, size_t* state_dim);
ME_API me_status me_profile_node(const me_profile* profile, size_t node, double* beta);
ME_API me_status me_profile_state(const me_profile* profile, size_t node, double* x);
ME_API void me_profile_free(me_profile* profile);

/* Moment operations */
/* output_moments != 0 selects sum_p w_p prod_i x_i^{k_i} instead of sum_p w_p beta_p^k x(beta_p). */
ME_API me_status me_compute_moments(const me_profile* profile, unsigned order, int output_moments, me_moments** out);
/* max_value receives the empirical constant; report (may be NULL) one line per (n, component). */
ME_API me_status me_check_hausdorff(const me_moments* m, unsigned up_to, me_norm norm, double* max_value,
                                    char** report);
ME_API me_status me_invert_moments(const me_moments* m, unsigned n_grid, me_profile** out);
/* a and b have index_dim entries each. */
ME_API me_status me_rescale_moments(const me_moments* unit, const double* a, const double* b, me_moments** out);
ME_API me_status me_radical_distance(const me_moments* m, const me_moments* n, double* distance);

/* Scenario configuration */
ME_API me_status me_preset_names(char** names); /* newline separated */
ME_API me_status me_config_from_preset(const char* name, me_config** out);
ME_API me_status me_config_load_file(const char* path, me_config** out);
/* Preset name if it matches one, otherwise a config file path. */
ME_API me_status me_config_resolve(const char* preset_or_path, me_config** out);
/* Dotted key, e.g. "controller.gain"; value is JSON text or a bare string. */
ME_API me_status me_config_set(me_config* cfg, const char* key, const char* value);
/* String values are returned verbatim, everything else as JSON text. */
ME_API me_status me_config_get(const me_config* cfg, const char* key, char** value);
ME_API me_status me_config_to_json(const me_config* cfg, char** json);
ME_API void me_config_free(me_config* cfg);

/* Scenario runs */
ME_API me_status me_run(const me_config* cfg, me_result** out);
ME_API me_status me_result_metric(const me_result* r, const char* key, double* value);
ME_API me_status me_result_metric_names(const me_result* r, char** names); /* newline separated */
ME_API me_status me_result_report(const me_result* r, char** text);
ME_API me_status me_result_sample_count(const me_result* r, size_t* count);
/* Writes every artifact into dir; paths (may be NULL) receives the written files, newline separated. */
ME_API me_status me_result_write(const me_result* r, const char* dir, char** paths);
ME_API void me_result_free(me_result* r);

#ifdef __cplusplus
}
#endif

#endif
