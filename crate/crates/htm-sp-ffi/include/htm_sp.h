#ifndef HTM_SP_H
#define HTM_SP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible FFI call.
 */
typedef enum {
  HTM_SP_STATUS_OK = 0,
  HTM_SP_STATUS_NULL_ARGUMENT = 1,
  HTM_SP_STATUS_INVALID_CONFIG = 2,
  HTM_SP_STATUS_INVALID_INPUT = 3,
  HTM_SP_STATUS_IO_ERROR = 4,
  HTM_SP_STATUS_BUFFER_TOO_SMALL = 5,
  HTM_SP_STATUS_PANIC = 6,
} HtmSpStatus;

/**
 * Which backend executes a step.
 */
typedef enum {
  HTM_SP_BACKEND_SEQUENTIAL = 0,
  HTM_SP_BACKEND_PARALLEL = 1,
} HtmSpBackend;

/**
 * Opaque pooler handle.
 */
typedef struct HtmSp HtmSp;

/**
 * Plain-data mirror of the pooler configuration.
 */
typedef struct {
  uint64_t num_columns;
  uint64_t synapses_per_column;
  uint32_t min_overlap;
  uint64_t winners_set_size;
  double perm_increment;
  double perm_decrement;
  double initial_permanence;
  double connected_threshold;
  uint64_t initial_inhibition_radius;
  double max_boost;
  uint32_t duty_cycle_period;
  uint64_t input_size;
  uint64_t rng_seed;
} HtmSpConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent error on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *htm_sp_last_error(void);

/**
 * Fills `out` with the default configuration (2048 columns, 128 synapses,
 * min overlap 8, winners 40, 240x134 input).
 *
 * # Safety
 * `out` must point to writable memory for one `HtmSpConfig`.
 */
HtmSpStatus htm_sp_config_default(HtmSpConfig *out);

/**
 * Creates a pooler from `config`, storing the handle in `out`.
 *
 * # Safety
 * `config` must point to a valid `HtmSpConfig` and `out` to a writable
 * pointer slot. A returned handle must be released with [`htm_sp_free`].
 */
HtmSpStatus htm_sp_new(const HtmSpConfig *config, HtmSp **out);

/**
 * Releases a handle created by [`htm_sp_new`] or [`htm_sp_load`]. NULL is
 * ignored.
 *
 * # Safety
 * `sp` must be a pointer previously returned by this library and not yet
 * freed.
 */
void htm_sp_free(HtmSp *sp);

/**
 * Number of columns of the pooler behind `sp`.
 *
 * # Safety
 * `sp` must be a live handle; `out` must be writable.
 */
HtmSpStatus htm_sp_num_columns(const HtmSp *sp, uint64_t *out);

/**
 * Current inhibition radius.
 *
 * # Safety
 * `sp` must be a live handle; `out` must be writable.
 */
HtmSpStatus htm_sp_inhibition_radius(const HtmSp *sp, uint64_t *out);

/**
 * Number of compute steps processed so far.
 *
 * # Safety
 * `sp` must be a live handle; `out` must be writable.
 */
HtmSpStatus htm_sp_iteration(const HtmSp *sp, uint64_t *out);

/**
 * Runs one pooler step over `input_len` bits given as one byte per bit.
 *
 * Active column indices are written ascending into `active_out` (capacity
 * `active_capacity`); `active_len` receives the count. When the buffer is
 * too small, `active_len` still receives the required count and the call
 * returns `BufferTooSmall` without writing indices.
 *
 * # Safety
 * `sp` must be a live handle, `input` must hold `input_len` readable bytes,
 * `active_out` must hold `active_capacity` writable `u64` slots and
 * `active_len` must be writable.
 */
HtmSpStatus htm_sp_step(HtmSp *sp,
                        const uint8_t *input,
                        uintptr_t input_len,
                        bool learn,
                        HtmSpBackend backend,
                        uint64_t *active_out,
                        uintptr_t active_capacity,
                        uintptr_t *active_len);

/**
 * Writes a versioned snapshot of the pooler state to `path`.
 *
 * # Safety
 * `sp` must be a live handle; `path` must be a NUL-terminated string.
 */
HtmSpStatus htm_sp_save(const HtmSp *sp, const char *path);

/**
 * Restores a pooler from a snapshot written by [`htm_sp_save`].
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be a writable pointer
 * slot. A returned handle must be released with [`htm_sp_free`].
 */
HtmSpStatus htm_sp_load(const char *path, HtmSp **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HTM_SP_H */
