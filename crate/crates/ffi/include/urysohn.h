#ifndef URYSOHN_H
#define URYSOHN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  URY_STATUS_OK = 0,
  URY_STATUS_NULL_POINTER = 1,
  URY_STATUS_INVALID_ARGUMENT = 2,
  URY_STATUS_PARSE = 3,
  URY_STATUS_NOT_METRIC = 4,
  URY_STATUS_OUT_OF_RANGE = 5,
  URY_STATUS_SIZE_CAP_EXCEEDED = 6,
  URY_STATUS_FAILED = 7,
  URY_STATUS_PANIC = 8,
} UryStatus;

/**
 * Opaque handle to a finite metric space.
 */
typedef struct UrySpace UrySpace;

/**
 * Library version as a static NUL-terminated string. Do not free.
 */
const char *ury_version(void);

/**
 * Copy of the last error message on this thread, or NULL if the last call
 * succeeded. Free with `ury_string_free`.
 */
char *ury_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void ury_string_free(char *s);

/**
 * Parses a space from JSON and checks the metric axioms.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
UryStatus ury_space_from_json(const char *json, UrySpace **out);

/**
 * Serializes a space to JSON. Free the result with `ury_string_free`.
 *
 * # Safety
 * `space` must be a live handle; `out` must be writable.
 */
UryStatus ury_space_to_json(const UrySpace *space, char **out);

/**
 * Releases a space handle. NULL is ignored.
 *
 * # Safety
 * `space` must come from this library and must not be used afterwards.
 */
void ury_space_free(UrySpace *space);

/**
 * Number of points.
 *
 * # Safety
 * `space` must be a live handle; `out` must be writable.
 */
UryStatus ury_space_len(const UrySpace *space, size_t *out);

/**
 * Distance between points `i` and `j` as a reduced fraction.
 *
 * # Safety
 * `space` must be a live handle; `num` and `den` must be writable.
 */
UryStatus ury_space_distance(const UrySpace *space, size_t i, size_t j, int64_t *num, int64_t *den);

/**
 * Rounds every distance up to `[0,1]_m`.
 *
 * # Safety
 * `space` must be a live handle; `out` must be writable.
 */
UryStatus ury_space_ceil(const UrySpace *space, uint32_t m, UrySpace **out);

/**
 * Collapses every distance onto `[0,1]_m`.
 *
 * # Safety
 * `space` must be a live handle; `out` must be writable.
 */
UryStatus ury_space_collapse(const UrySpace *space, uint32_t m, UrySpace **out);

/**
 * Builds a finite approximation over the comma-separated `alphabet`.
 * `closed_after` receives the number of rounds after which nothing was
 * missing, or -1 if the build did not close.
 *
 * # Safety
 * `alphabet` must be a NUL-terminated string; `out` and `closed_after`
 * must be writable.
 */
UryStatus ury_build_approx(const char *alphabet,
                           size_t rounds,
                           size_t budget,
                           uint64_t seed,
                           size_t size_cap,
                           UrySpace **out,
                           int64_t *closed_after);

/**
 * Counts extension profiles over subspaces of at most `k` points that no
 * point realizes. A NULL `alphabet` uses the distances occurring in the space.
 *
 * # Safety
 * `space` must be a live handle; `alphabet` is NULL or NUL-terminated;
 * `count` must be writable.
 */
UryStatus ury_check_extension(const UrySpace *space, const char *alphabet, size_t k, size_t *count);

/**
 * Whether the comma-separated set satisfies the 4-values condition.
 *
 * # Safety
 * `set` must be a NUL-terminated string; `out` must be writable.
 */
UryStatus ury_four_values(const char *set, bool *out);

/**
 * Number of classes of `m`-element distance sets, in total and among those
 * satisfying the 4-values condition.
 *
 * # Safety
 * `total` and `satisfying` must be writable.
 */
UryStatus ury_classify_counts(size_t m, size_t *total, size_t *satisfying);

#endif  /* URYSOHN_H */
