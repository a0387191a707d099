#ifndef RAINBOW_GAMES_H
#define RAINBOW_GAMES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum rg_status {
  RG_STATUS_OK = 0,
  RG_STATUS_NULL_POINTER = 1,
  RG_STATUS_INVALID_ARGUMENT = 2,
  RG_STATUS_PARSE_ERROR = 3,
  RG_STATUS_INVALID_STRUCTURE = 4,
  RG_STATUS_IO_ERROR = 5,
  RG_STATUS_INTERNAL = 6,
} rg_status;

/**
 * A complex algebra over a finite atom structure.
 */
typedef struct rg_algebra rg_algebra;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The message for the last failed call on this thread (or the broken law
 * after [`rg_algebra_check_axioms`] reports `false`), or null. Valid
 * until the next failing call on the same thread.
 */
const char *rg_last_error_message(void);

/**
 * Builds the rainbow algebra with `s` green and `t` red indices.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum rg_status rg_rainbow_new(uint32_t s, uint32_t t, struct rg_algebra **out);

/**
 * Loads a `.ras` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum rg_status rg_algebra_load_ras(const char *path, struct rg_algebra **out);

/**
 * Parses `.ras` text held in memory.
 *
 * # Safety
 * `src` must be a NUL-terminated string and `out` a valid pointer.
 */
enum rg_status rg_algebra_parse_ras(const char *src, struct rg_algebra **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `alg` must come from this library and not be used afterwards.
 */
void rg_algebra_free(struct rg_algebra *alg);

/**
 * Number of atoms, or 0 for a null handle.
 *
 * # Safety
 * `alg` must be null or a live handle.
 */
uint32_t rg_algebra_atom_count(const struct rg_algebra *alg);

/**
 * Sets `*ok` to whether the relation-algebra axioms hold. A failure message
 * naming the first broken law is left in the error slot when they do not.
 *
 * # Safety
 * `alg` must be a live handle and `ok` a valid pointer.
 */
enum rg_status rg_algebra_check_axioms(const struct rg_algebra *alg, bool *ok);

/**
 * `*out = x ; y`.
 *
 * # Safety
 * `alg` must be a live handle and `out` a valid pointer.
 */
enum rg_status rg_algebra_compose(const struct rg_algebra *alg,
                                  uint64_t x,
                                  uint64_t y,
                                  uint64_t *out);

/**
 * `*out = x˘`.
 *
 * # Safety
 * `alg` must be a live handle and `out` a valid pointer.
 */
enum rg_status rg_algebra_converse(const struct rg_algebra *alg, uint64_t x, uint64_t *out);

/**
 * Evaluates a first-order sentence, e.g. `E x . ~(x = 0) & x;x = x`.
 *
 * # Safety
 * `alg` must be a live handle, `formula` a NUL-terminated string and `out`
 * a valid pointer.
 */
enum rg_status rg_algebra_eval(const struct rg_algebra *alg, const char *formula, bool *out);

/**
 * For a rainbow algebra, whether it is predicted representable (`s <= t`).
 *
 * # Safety
 * `alg` must be a live handle and `out` a valid pointer.
 */
enum rg_status rg_algebra_predicted_representable(const struct rg_algebra *alg, bool *out);

/**
 * Solves the Seurat game `G_n(T, T')` with `|T| = t`, `|T'| = t2`; `*exists`
 * is true iff ∃ has a winning strategy.
 *
 * # Safety
 * `exists` must be a valid pointer.
 */
enum rg_status rg_seurat_solve(uint32_t t, uint32_t t2, uint32_t n, bool *exists);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RAINBOW_GAMES_H */
