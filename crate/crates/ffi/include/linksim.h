/* C interface for the linksim PDCCH REG-bundling simulator. */

#ifndef LINKSIM_H
#define LINKSIM_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum LinksimStatus {
  LINKSIM_STATUS_OK = 0,
  /**
   * Failure while running a sweep or writing results.
   */
  LINKSIM_STATUS_RUNTIME_ERROR = 1,
  /**
   * Invalid configuration, unknown key, or missing input file.
   */
  LINKSIM_STATUS_CONFIG_ERROR = 2,
  /**
   * A required pointer argument was null.
   */
  LINKSIM_STATUS_NULL_POINTER = 3,
  /**
   * A string argument was not valid UTF-8.
   */
  LINKSIM_STATUS_INVALID_UTF8 = 4,
  /**
   * A row index was out of range.
   */
  LINKSIM_STATUS_INDEX_OUT_OF_RANGE = 5,
  /**
   * Filesystem error.
   */
  LINKSIM_STATUS_IO_ERROR = 6,
} LinksimStatus;

/**
 * Opaque sweep results handle.
 */
typedef struct LinksimResults LinksimResults;

/**
 * Opaque sweep configuration handle.
 */
typedef struct LinksimScenario LinksimScenario;

/**
 * One aggregated sweep row. The scenario name is available separately via
 * `linksim_results_scenario_name`.
 */
typedef struct LinksimRow {
  uint32_t al;
  uint32_t regb_size;
  double snr_db;
  double mean_eesm_db;
  double linear_mean_eesm_db;
  double stderr_db;
  uint64_t n_trials;
  uint64_t master_seed;
} LinksimRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *linksim_version(void);

/**
 * Message describing the most recent error on this thread. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *linksim_last_error(void);

/**
 * Create a scenario with default parameters (no PDP file set).
 *
 * # Safety
 * `out` must be a valid pointer to a `LinksimScenario*`.
 */
enum LinksimStatus linksim_scenario_default(struct LinksimScenario **out);

/**
 * Parse a `key = value` config file into a new scenario.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a valid pointer.
 */
enum LinksimStatus linksim_scenario_load(const char *path, struct LinksimScenario **out);

/**
 * Apply one `key = value` assignment to a scenario.
 *
 * # Safety
 * `scenario` must come from a constructor of this library and not be
 * freed; `key` and `value` must be NUL-terminated strings.
 */
enum LinksimStatus linksim_scenario_set(struct LinksimScenario *scenario,
                                        const char *key,
                                        const char *value);

/**
 * Validate the scenario without running it.
 *
 * # Safety
 * `scenario` must come from a constructor of this library.
 */
enum LinksimStatus linksim_scenario_validate(const struct LinksimScenario *scenario);

/**
 * Free a scenario handle. Null is ignored.
 *
 * # Safety
 * `scenario` must come from a constructor of this library and must not be
 * used afterwards.
 */
void linksim_scenario_free(struct LinksimScenario *scenario);

/**
 * Run the sweep on `workers` threads (0 = all cores) and hand back a
 * results handle.
 *
 * # Safety
 * `scenario` must come from a constructor of this library; `out` must be
 * a valid pointer to a `LinksimResults*`.
 */
enum LinksimStatus linksim_run_sweep(const struct LinksimScenario *scenario,
                                     uintptr_t workers,
                                     struct LinksimResults **out);

/**
 * Number of aggregated rows.
 *
 * # Safety
 * `results` must come from `linksim_run_sweep`. Null yields 0.
 */
uintptr_t linksim_results_len(const struct LinksimResults *results);

/**
 * Copy row `index` into `row`.
 *
 * # Safety
 * `results` must come from `linksim_run_sweep`; `row` must be a valid
 * pointer to a `LinksimRow`.
 */
enum LinksimStatus linksim_results_row(const struct LinksimResults *results,
                                       uintptr_t index,
                                       struct LinksimRow *row);

/**
 * Scenario name of row `index`; owned by the results handle and valid
 * while it lives. Null on a bad index.
 *
 * # Safety
 * `results` must come from `linksim_run_sweep`.
 */
const char *linksim_results_scenario_name(const struct LinksimResults *results, uintptr_t index);

/**
 * Serialize all rows to CSV. Free the returned string with
 * `linksim_string_free`. Null on error.
 *
 * # Safety
 * `results` must come from `linksim_run_sweep`.
 */
char *linksim_results_to_csv(const struct LinksimResults *results);

/**
 * Write all rows to a CSV file.
 *
 * # Safety
 * `results` must come from `linksim_run_sweep`; `path` must be a
 * NUL-terminated string.
 */
enum LinksimStatus linksim_results_write_csv(const struct LinksimResults *results,
                                             const char *path);

/**
 * Free a results handle. Null is ignored.
 *
 * # Safety
 * `results` must come from `linksim_run_sweep` and must not be used
 * afterwards.
 */
void linksim_results_free(struct LinksimResults *results);

/**
 * Free a string returned by `linksim_results_to_csv`. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void linksim_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LINKSIM_H */
