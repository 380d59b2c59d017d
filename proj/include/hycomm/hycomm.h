#ifndef HYCOMM_HYCOMM_H
#define HYCOMM_HYCOMM_H

/* C interface to the hycomm collaboration simulator. Handles are opaque;
 * every entry point returns a status code and leaves a human-readable
 * message in hyc_last_error() on failure. Strings returned through out
 * parameters are heap-allocated and must be released with hyc_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HYCOMM_API __declspec(dllexport)
#else
#define HYCOMM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hyc_status {
  HYC_OK = 0,
  HYC_ERROR_CONFIG = 1,  /* parse or validation failure */
  HYC_ERROR_RUNTIME = 2, /* infeasible placement, I/O, internal failure */
  HYC_ERROR_INVALID_ARGUMENT = 3
} hyc_status;

typedef struct hyc_experiment hyc_experiment;

HYCOMM_API const char* hyc_version(void);

/* Message for the most recent failure on this thread; never NULL. */
HYCOMM_API const char* hyc_last_error(void);

HYCOMM_API void hyc_string_free(char* s);

/* The built-in defaults as a JSON document. */
HYCOMM_API hyc_status hyc_default_config_json(char** out_json);

/* Parses and validates a config document into an experiment handle. */
HYCOMM_API hyc_status hyc_experiment_create(const char* config_json, hyc_experiment** out);
HYCOMM_API void hyc_experiment_free(hyc_experiment* exp);

HYCOMM_API hyc_status hyc_experiment_set_master_seed(hyc_experiment* exp, uint64_t seed);
HYCOMM_API hyc_status hyc_experiment_set_jobs(hyc_experiment* exp, int jobs);

/* Generates the experiment's world snapshot as a JSON document. */
HYCOMM_API hyc_status hyc_generate_scenario_json(const hyc_experiment* exp, char** out_json);

/* Runs the full strategy x budget sweep. out_svg may be NULL when no plot is
 * wanted; when non-NULL it receives the SVG markup. */
HYCOMM_API hyc_status hyc_run_sweep(const hyc_experiment* exp, char** out_csv,
                                    char** out_svg);

/* Replays one (strategy, budget) cell on a scenario fixture and returns the
 * per-trial dump. When use_scenario_seed is nonzero the fixture's stored
 * seed drives the run and `seed` is ignored. */
HYCOMM_API hyc_status hyc_run_replay(const hyc_experiment* exp, const char* scenario_json,
                                     const char* strategy, uint64_t budget_floats,
                                     uint64_t seed, int use_scenario_seed, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* HYCOMM_HYCOMM_H */
