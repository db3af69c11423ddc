#ifndef AZPP_H
#define AZPP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum AzppStatus {
  AZPP_STATUS_OK = 0,
  AZPP_STATUS_NULL_POINTER = 1,
  AZPP_STATUS_INVALID_UTF8 = 2,
  AZPP_STATUS_PARSE_ERROR = 3,
  AZPP_STATUS_INVALID_CONFIG = 4,
  AZPP_STATUS_FINISHED = 5,
  AZPP_STATUS_OUT_OF_RANGE = 6,
  AZPP_STATUS_BUFFER_TOO_SMALL = 7,
  AZPP_STATUS_IO_ERROR = 8,
  AZPP_STATUS_PANIC = 9,
} AzppStatus;

typedef enum AzppMode {
  AZPP_MODE_QUIET = 0,
  AZPP_MODE_FIGHT = 1,
  AZPP_MODE_FLIGHT = 2,
} AzppMode;

/**
 * Opaque simulation handle.
 */
typedef struct AzppModel AzppModel;

/**
 * Grid-wide observables of the last executed tick. Tie statistics are NaN
 * when there are fewer than two agents.
 */
typedef struct AzppGlobalMetrics {
  uint64_t tick;
  uint64_t destroyed_count;
  uint64_t active_count;
  double avg_tie_strength;
  double tie_strength_dispersion;
  double mean_contagion;
  uint32_t n_attacks;
} AzppGlobalMetrics;

/**
 * One agent's current state.
 */
typedef struct AzppAgentMetrics {
  uint32_t agent_id;
  double affect;
  double probability;
  double contagion;
  double disposition;
  enum AzppMode mode;
  uint64_t x;
  uint64_t y;
  uint64_t radius;
  double damage;
} AzppAgentMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *azpp_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next call into the library from the same thread.
 */
const char *azpp_last_error_message(void);

/**
 * Create a model from a TOML configuration (NULL for all defaults).
 *
 * # Safety
 * `config_toml` must be NULL or a valid NUL-terminated string; `out` must
 * be a valid pointer.
 */
enum AzppStatus azpp_model_new(const char *config_toml, struct AzppModel **out);

/**
 * Release a model. NULL is ignored.
 *
 * # Safety
 * `model` must be NULL or a handle from `azpp_model_new` not yet freed.
 */
void azpp_model_free(struct AzppModel *model);

/**
 * Execute one tick. Returns `Finished` once the configured tick count has
 * been reached. `out` may be NULL.
 *
 * # Safety
 * `model` must be a live handle; `out` must be NULL or valid.
 */
enum AzppStatus azpp_model_step(struct AzppModel *model, struct AzppGlobalMetrics *out);

/**
 * Number of ticks executed so far.
 *
 * # Safety
 * `model` must be a live handle; `out` must be valid.
 */
enum AzppStatus azpp_model_tick(const struct AzppModel *model, uint64_t *out);

/**
 * # Safety
 * `model` must be a live handle; `out` must be valid.
 */
enum AzppStatus azpp_model_agent_count(const struct AzppModel *model, size_t *out);

/**
 * Current state of agent `index`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be valid.
 */
enum AzppStatus azpp_model_agent(const struct AzppModel *model,
                                 size_t index,
                                 struct AzppAgentMetrics *out);

/**
 * # Safety
 * `model` must be a live handle; `width` and `height` must be valid.
 */
enum AzppStatus azpp_model_grid_size(const struct AzppModel *model, size_t *width, size_t *height);

/**
 * Copy the grid row-major into `buf`: 0 Calm, 1 Active, 2 Destroyed.
 * `len` must be at least width × height.
 *
 * # Safety
 * `model` must be a live handle; `buf` must point to `len` writable bytes.
 */
enum AzppStatus azpp_model_grid_cells(const struct AzppModel *model, uint8_t *buf, size_t len);

/**
 * Run a configuration (NULL for defaults) to completion and write the full
 * set of outputs into `out_dir`.
 *
 * # Safety
 * `config_toml` must be NULL or a valid string; `out_dir` must be valid.
 */
enum AzppStatus azpp_run(const char *config_toml, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AZPP_H */
