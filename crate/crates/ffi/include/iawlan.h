#ifndef IAWLAN_H
#define IAWLAN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible function.
typedef enum IawStatus {
  IAW_STATUS_OK = 0,
  // A required pointer argument was null.
  IAW_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8.
  IAW_STATUS_INVALID_UTF8 = 2,
  // The configuration was rejected.
  IAW_STATUS_CONFIG_ERROR = 3,
  // The simulation failed.
  IAW_STATUS_RUNTIME_ERROR = 4,
  // An index was out of range.
  IAW_STATUS_OUT_OF_RANGE = 5,
  // A Rust panic was caught at the boundary.
  IAW_STATUS_PANIC = 6,
} IawStatus;

// Opaque experiment handle.
typedef struct IawExperiment IawExperiment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *iaw_version(void);

// Message of the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *iaw_last_error_message(void);

// Creates an experiment with the default configuration.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum IawStatus iaw_experiment_new_default(struct IawExperiment **out);

// Creates an experiment from a TOML configuration; missing fields take
// their defaults.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` a valid pointer.
enum IawStatus iaw_experiment_new_from_toml(const char *toml, struct IawExperiment **out);

// Releases an experiment handle. Null is ignored.
//
// # Safety
// `exp` must come from an `iaw_experiment_new_*` call and not be used again.
void iaw_experiment_free(struct IawExperiment *exp);

// Number of configured trials.
//
// # Safety
// `exp` must be a live handle and `out` a valid pointer.
enum IawStatus iaw_experiment_n_trials(const struct IawExperiment *exp, size_t *out);

// Runs one trial and returns its result as a JSON document.
//
// # Safety
// `exp` must be a live handle and `out_json` a valid pointer. The returned
// string must be freed with [`iaw_string_free`].
enum IawStatus iaw_experiment_run_trial_json(const struct IawExperiment *exp,
                                             size_t trial_index,
                                             char **out_json);

// Runs every trial and returns the aggregated summary as JSON.
//
// # Safety
// As for [`iaw_experiment_run_trial_json`].
enum IawStatus iaw_experiment_run_summary_json(const struct IawExperiment *exp, char **out_json);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used again.
void iaw_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IAWLAN_H */
