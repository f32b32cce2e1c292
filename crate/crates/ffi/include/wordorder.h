/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef WORDORDER_H
#define WORDORDER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define WO_OBJECTIVE_UNCERTAINTY 0

#define WO_OBJECTIVE_PREDICTABILITY 1

#define WO_HILBERG_PURE 0

#define WO_HILBERG_RELAXED 1

// Result of every fallible call.
typedef enum WoStatus {
  WO_STATUS_OK = 0,
  WO_STATUS_NULL_POINTER = 1,
  WO_STATUS_INVALID_UTF8 = 2,
  WO_STATUS_BUFFER_TOO_SMALL = 3,
  WO_STATUS_INVALID_ARGUMENT = 4,
  // A library error; see the last error code.
  WO_STATUS_DOMAIN_ERROR = 5,
  WO_STATUS_PANIC = 6,
} WoStatus;

typedef enum WoUidClass {
  WO_UID_CLASS_FULL = 0,
  WO_UID_CLASS_STRONG = 1,
  WO_UID_CLASS_NEITHER = 2,
} WoUidClass;

// Opaque transition kernel on the ring of word orders.
typedef struct WoKernel WoKernel;

// Opaque joint sequence model.
typedef struct WoModel WoModel;

// Parameters of `a * i^-gamma + b`.
typedef struct WoHilbergFit {
  double a;
  double gamma;
  double b;
  double rms_residual;
} WoHilbergFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *wo_version(void);

// Code of the calling thread's last error, or NULL. Valid until the next
// failing call on the same thread.
const char *wo_last_error_code(void);

// Message of the calling thread's last error, or NULL.
const char *wo_last_error_message(void);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void wo_string_free(char *s);

// Parse a model file.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum WoStatus wo_model_from_json(const char *json, struct WoModel **out);

// Seeded random model with roles `target`, `context_1`, ….
//
// # Safety
// `sizes` must hold `n` elements; `out` must be writable.
enum WoStatus wo_model_random(const size_t *sizes, size_t n, uint64_t seed, struct WoModel **out);

// # Safety
// `model` must be NULL or a live handle.
void wo_model_free(struct WoModel *model);

// Serialize a model; free the result with `wo_string_free`.
//
// # Safety
// `model` must be a live handle; `out` must be writable.
enum WoStatus wo_model_to_json(const struct WoModel *model, char **out);

// # Safety
// `model` must be a live handle; `out` must be writable.
enum WoStatus wo_model_num_roles(const struct WoModel *model, size_t *out);

// `H(target | context)` in bits.
//
// # Safety
// `model` must be a live handle, `target` a string, `context` an array of
// `context_len` strings (may be NULL when empty), `out` writable.
enum WoStatus wo_conditional_entropy(const struct WoModel *model,
                                     const char *target,
                                     const char *const *context,
                                     size_t context_len,
                                     double *out);

// `I(target; new | given)` in bits.
//
// # Safety
// As for [`wo_conditional_entropy`].
enum WoStatus wo_conditional_mutual_information(const struct WoModel *model,
                                                const char *target,
                                                const char *new_role,
                                                const char *const *given,
                                                size_t given_len,
                                                double *out);

// Uncertainty (`WO_OBJECTIVE_UNCERTAINTY`) or predictability profile over
// placements `0..=n`. A NULL `order` with `order_len == 0` uses the
// model's role order.
//
// # Safety
// `model` must be a live handle; `order` an array of `order_len` strings;
// `out`/`len` follow the array protocol.
enum WoStatus wo_placement_profile(const struct WoModel *model,
                                   const char *const *order,
                                   size_t order_len,
                                   uint32_t objective_code,
                                   double *out,
                                   size_t *len);

// Optimal target placements, ascending.
//
// # Safety
// As for [`wo_placement_profile`].
enum WoStatus wo_optimal_placement(const struct WoModel *model,
                                   const char *const *order,
                                   size_t order_len,
                                   uint32_t objective_code,
                                   size_t *out,
                                   size_t *len);

// Sum of dependency lengths with the head at `head_pos` (1-based).
//
// # Safety
// `out` must be writable.
enum WoStatus wo_dependency_sum(size_t m, size_t head_pos, uint64_t *out);

// Cost of every head position under a transducer spec such as
// `"identity"`, `"square"` or `"exp:2"` (NULL means identity).
//
// # Safety
// `g` must be NULL or a string; `out`/`len` follow the array protocol.
enum WoStatus wo_dependency_landscape(size_t m, const char *g, double *out, size_t *len);

// Name of the word order at ring index `index` (0 = SOV), or NULL.
const char *wo_order_name(size_t index);

// # Safety
// `a` and `b` must be strings; `out` writable.
enum WoStatus wo_ring_distance(const char *a, const char *b, uint32_t *out);

// Predicted destinations as a bit mask over ring indices (bit 0 = SOV).
// `filter` may be NULL.
//
// # Safety
// `from` must be a string, `filter` NULL or a string, `out` writable.
enum WoStatus wo_predict(const char *from, bool use_ring, const char *filter, uint32_t *out);

// Parse a kernel (same JSON as the `kernel` field of a simulation config).
//
// # Safety
// `json` must be a string; `out` writable.
enum WoStatus wo_kernel_from_json(const char *json, struct WoKernel **out);

// # Safety
// `kernel` must be NULL or a live handle.
void wo_kernel_free(struct WoKernel *kernel);

// Row-major 6×6 transition matrix in ring order (36 values).
//
// # Safety
// `kernel` must be a live handle; `out`/`len` follow the array protocol.
enum WoStatus wo_kernel_transition_matrix(const struct WoKernel *kernel, double *out, size_t *len);

// Ensemble counts per step, `(steps + 1) * 6` values in ring order.
//
// # Safety
// `kernel` must be a live handle, `start` a string; `out`/`len` follow
// the array protocol.
enum WoStatus wo_evolve(const struct WoKernel *kernel,
                        const char *start,
                        size_t steps,
                        size_t ensemble_size,
                        uint64_t seed,
                        uint64_t *out,
                        size_t *len);

// Plug-in conditional entropy profile (positions 1, 2, …) of a text,
// tokenized on whitespace or, with `chars`, per character.
//
// # Safety
// `text` must be a string; `out`/`len` follow the array protocol.
enum WoStatus wo_rate_profile(const char *text,
                              bool chars,
                              size_t max_order,
                              double *out,
                              size_t *len);

// # Safety
// `model` must be a live handle; `out` writable.
enum WoStatus wo_uid_classify(const struct WoModel *model, size_t cap, enum WoUidClass *out);

// Fit `a i^-gamma (+ b)` to `values[k]` at position `k + 1`.
//
// # Safety
// `values` must hold `n` elements; `out` writable.
enum WoStatus wo_hilberg_fit(const double *values,
                             size_t n,
                             uint32_t variant,
                             struct WoHilbergFit *out);

// Largest value of a rate profile and its first position (1-based).
//
// # Safety
// `values` must hold `n` elements; `value` and `position` writable.
enum WoStatus wo_peak_cost(const double *values, size_t n, double *value, size_t *position);

// `ceil(-log2 p)` for each of `n` probabilities into `out` (`n` values).
//
// # Safety
// `probabilities` must hold `n` elements and `out` room for `n`.
enum WoStatus wo_optimal_lengths(const double *probabilities,
                                 size_t n,
                                 bool allow_full_reduction,
                                 uint32_t *out);

// Tie-corrected Kendall tau of `n` pairs `(x[k], y[k])`.
//
// # Safety
// `x` and `y` must hold `n` elements; `out` writable.
enum WoStatus wo_kendall_tau(const double *x, const double *y, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WORDORDER_H */
