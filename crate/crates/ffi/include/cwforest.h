#ifndef CWFOREST_H
#define CWFOREST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum CwStatus {
  CW_STATUS_OK = 0,
  /**
   * A row iterator has no further vertices.
   */
  CW_STATUS_DONE = 1,
  CW_STATUS_NULL_POINTER = 2,
  CW_STATUS_INVALID_UTF8 = 3,
  CW_STATUS_PARSE = 4,
  CW_STATUS_INVALID_ARGUMENT = 5,
  CW_STATUS_NOT_DESCENDANT = 6,
  CW_STATUS_DIGIT_BUDGET = 7,
  CW_STATUS_PANIC = 8,
} CwStatus;

typedef struct CwRational CwRational;

typedef struct CwRowIter CwRowIter;

typedef struct CwTree CwTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cw_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void cw_string_free(char *s);

/**
 * Parses `"a/b"` or `"a"`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum CwStatus cw_rational_parse(const char *text, struct CwRational **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum CwStatus cw_rational_new(uint64_t num, uint64_t den, struct CwRational **out);

/**
 * `"a/b"`; free with [`cw_string_free`]. Returns NULL for a NULL handle.
 *
 * # Safety
 * `x` must be NULL or a live handle.
 */
char *cw_rational_to_string(const struct CwRational *x);

/**
 * Three-way comparison: -1, 0 or 1. Returns 0 if either handle is NULL.
 *
 * # Safety
 * `a` and `b` must be NULL or live handles.
 */
int32_t cw_rational_cmp(const struct CwRational *a, const struct CwRational *b);

/**
 * # Safety
 * `x` must be NULL or a handle not yet freed.
 */
void cw_rational_free(struct CwRational *x);

/**
 * # Safety
 * `out` must be writable.
 */
enum CwStatus cw_tree_new(uint64_t u, uint64_t v, struct CwTree **out);

/**
 * # Safety
 * `t` must be NULL or a handle not yet freed.
 */
void cw_tree_free(struct CwTree *t);

/**
 * # Safety
 * Handles must be live; `left` and `right` must be writable.
 */
enum CwStatus cw_tree_children(const struct CwTree *t,
                               const struct CwRational *x,
                               struct CwRational **left,
                               struct CwRational **right);

/**
 * Writes the parent of `x`, or NULL when `x` is an orphan root.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CwStatus cw_tree_parent(const struct CwTree *t,
                             const struct CwRational *x,
                             struct CwRational **out);

/**
 * Root, depth and `L`/`R` path of `x`. The path string is owned by the caller.
 *
 * # Safety
 * Handles must be live; every output pointer must be writable.
 */
enum CwStatus cw_tree_locate(const struct CwTree *t,
                             const struct CwRational *x,
                             struct CwRational **root,
                             uint64_t *depth,
                             char **path);

/**
 * Whether `query` lies in the tree rooted at `ancestor`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CwStatus cw_tree_is_descendant(const struct CwTree *t,
                                    const struct CwRational *ancestor,
                                    const struct CwRational *query,
                                    bool *out);

/**
 * Depth of `query` below `ancestor`, or [`CwStatus::NotDescendant`].
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CwStatus cw_tree_depth(const struct CwTree *t,
                            const struct CwRational *ancestor,
                            const struct CwRational *query,
                            uint64_t *out);

/**
 * Canonical continued fraction of `x` as `"[q0,q1,...]"`.
 *
 * # Safety
 * `x` must be live; `out` must be writable.
 */
enum CwStatus cw_cf_encode(const struct CwRational *x, char **out);

/**
 * Value of a continued fraction written as `"[q0,q1,...]"`.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string; `out` must be writable.
 */
enum CwStatus cw_cf_decode(const char *text, struct CwRational **out);

/**
 * Left-to-right iterator over row `depth` of the tree rooted at `root`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CwStatus cw_row_iter_new(const struct CwTree *t,
                              const struct CwRational *root,
                              uint32_t depth,
                              struct CwRowIter **out);

/**
 * Writes the next vertex, or returns [`CwStatus::Done`] and writes NULL.
 *
 * # Safety
 * `it` must be live; `out` must be writable.
 */
enum CwStatus cw_row_iter_next(struct CwRowIter *it, struct CwRational **out);

/**
 * # Safety
 * `it` must be NULL or a handle not yet freed.
 */
void cw_row_iter_free(struct CwRowIter *it);

/**
 * Row aggregates as a JSON object. `precision_bits == 0` selects exact
 * sums; otherwise sums are enclosures at that precision. `workers == 0`
 * uses one thread.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum CwStatus cw_row_stats_json(const struct CwTree *t,
                                const struct CwRational *root,
                                uint32_t depth,
                                uint32_t precision_bits,
                                uint32_t workers,
                                char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CWFOREST_H */
