#ifndef BOOSTCYCLE_H
#define BOOSTCYCLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BcStatus {
  BC_STATUS_OK = 0,
  BC_STATUS_NULL_POINTER = 1,
  BC_STATUS_INVALID_ARGUMENT = 2,
  BC_STATUS_PARSE = 3,
  BC_STATUS_ENGINE = 4,
  BC_STATUS_OUT_OF_RANGE = 5,
  BC_STATUS_PANIC = 6,
} BcStatus;

typedef enum BcMode {
  BC_MODE_FLOAT = 0,
  BC_MODE_EXACT = 1,
} BcMode;

typedef struct BcCycleReport BcCycleReport;

typedef struct BcPool BcPool;

typedef struct BcTrace BcTrace;

/**
 * Cycle detection settings. `has_burn_in == false` selects the default
 * burn-in of half the trace.
 */
typedef struct BcCycleConfig {
  double tol;
  size_t min_repeats;
  size_t burn_in;
  bool has_burn_in;
} BcCycleConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bc_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *bc_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void bc_string_free(char *s);

/**
 * Parses a pool: one dichotomy per line written with `+` and `-`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BcStatus bc_pool_parse(const char *text, struct BcPool **out);

/**
 * # Safety
 * `pool` must be null or a handle from [`bc_pool_parse`].
 */
void bc_pool_free(struct BcPool *pool);

/**
 * # Safety
 * `pool` must be a live handle and the out pointers valid.
 */
enum BcStatus bc_pool_shape(const struct BcPool *pool, size_t *n_points, size_t *n_rows);

/**
 * Runs boosting from uniform weights. `rule` is `optimal`,
 * `first-above:THETA` or `fixed:I,J,...`; null means `optimal`.
 *
 * # Safety
 * `pool` must be a live handle, `rule` null or NUL-terminated, `out` valid.
 */
enum BcStatus bc_run(const struct BcPool *pool,
                     const char *rule,
                     enum BcMode mode,
                     size_t iters,
                     struct BcTrace **out);

/**
 * # Safety
 * `trace` must be null or a handle from this library.
 */
void bc_trace_free(struct BcTrace *trace);

/**
 * Number of recorded steps.
 *
 * # Safety
 * `trace` must be a live handle and `len` valid.
 */
enum BcStatus bc_trace_len(const struct BcTrace *trace, size_t *len);

/**
 * Whether the run stopped before its budget (weak-learning failure or
 * perfect classification).
 *
 * # Safety
 * `trace` must be a live handle and `halted` valid.
 */
enum BcStatus bc_trace_halted(const struct BcTrace *trace, bool *halted);

/**
 * Edge and chosen pool row at step `k` (a position in the trace).
 *
 * # Safety
 * `trace` must be a live handle; out pointers may be null to skip them.
 */
enum BcStatus bc_trace_step(const struct BcTrace *trace, size_t k, double *edge, size_t *row);

/**
 * Edge at step `k` as text: `p/q` for exact traces, 12 significant digits
 * for float traces.
 *
 * # Safety
 * `trace` must be a live handle and `out` valid.
 */
enum BcStatus bc_trace_edge_text(const struct BcTrace *trace, size_t k, char **out);

/**
 * Copies the weights in force at step `k` into `buf`, which must hold the
 * number of points. Position `len` gives the weights after the last step.
 *
 * # Safety
 * `trace` must be a live handle and `buf` writable for `buf_len` doubles.
 */
enum BcStatus bc_trace_weights(const struct BcTrace *trace, size_t k, double *buf, size_t buf_len);

/**
 * Serializes the trace in the versioned JSON trace format.
 *
 * # Safety
 * `trace` must be a live handle and `out` valid.
 */
enum BcStatus bc_trace_to_json(const struct BcTrace *trace, char **out);

/**
 * Reads a trace from JSON text.
 *
 * # Safety
 * `text` must be NUL-terminated and `out` valid.
 */
enum BcStatus bc_trace_from_json(const char *text, struct BcTrace **out);

struct BcCycleConfig bc_cycle_config_default(void);

/**
 * Looks for a limit cycle. On success `*out` is a report handle, or null
 * when no cycle was found. A null `config` uses the defaults.
 *
 * # Safety
 * `trace` must be a live handle, `config` null or valid, `out` valid.
 */
enum BcStatus bc_detect_cycle(const struct BcTrace *trace,
                              const struct BcCycleConfig *config,
                              struct BcCycleReport **out);

/**
 * # Safety
 * `report` must be null or a handle from [`bc_detect_cycle`].
 */
void bc_cycle_free(struct BcCycleReport *report);

/**
 * Summary numbers of a cycle report. Any out pointer may be null.
 *
 * # Safety
 * `report` must be a live handle.
 */
enum BcStatus bc_cycle_summary(const struct BcCycleReport *report,
                               size_t *period,
                               size_t *edge_period,
                               size_t *phase,
                               double *mean_edge,
                               bool *nabla_holds);

/**
 * Edge value `i` of the cycle, `0 <= i < edge_period`.
 *
 * # Safety
 * `report` must be a live handle and `out` valid.
 */
enum BcStatus bc_cycle_edge_value(const struct BcCycleReport *report, size_t i, double *out);

/**
 * Farey word matching the cycle edges, or null in `*out` when none matched.
 *
 * # Safety
 * `report` must be a live handle and `out` valid.
 */
enum BcStatus bc_cycle_farey_word(const struct BcCycleReport *report, char **out);

/**
 * Periodic point of a word over `L`/`R`: its exact form (for example
 * `(-1/2+1/2*sqrt(5))`) and its value as a double. Either out pointer may be
 * null.
 *
 * # Safety
 * `word` must be NUL-terminated.
 */
enum BcStatus bc_farey_periodic_point(const char *word, char **exact, double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOOSTCYCLE_H */
