#ifndef DETL_H
#define DETL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DetlStatus {
  DETL_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  DETL_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument is not UTF-8.
   */
  DETL_STATUS_INVALID_UTF8 = 2,
  /**
   * Parse, name, file or model error.
   */
  DETL_STATUS_ERROR = 3,
  /**
   * The tableau node limit was exceeded.
   */
  DETL_STATUS_RESOURCE_EXCEEDED = 4,
  /**
   * The library panicked; this is a bug.
   */
  DETL_STATUS_PANIC = 5,
} DetlStatus;

typedef enum DetlMode {
  DETL_MODE_DETL = 0,
  DETL_MODE_YDEL = 1,
  DETL_MODE_RDETL = 2,
} DetlMode;

typedef enum DetlTruth {
  DETL_TRUTH_FALSE = 0,
  DETL_TRUTH_TRUE = 1,
  /**
   * Restricted semantics only: the model or an action is out of scope.
   */
  DETL_TRUTH_NOT_IN_SCOPE = 2,
} DetlTruth;

/**
 * Opaque handle to a loaded workspace.
 */
typedef struct DetlWorkspace DetlWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Loads every `*.json` file of `dir`. Writes a new handle to `*out`.
 *
 * # Safety
 * `dir` must be a nul-terminated string and `out` a valid pointer.
 */
enum DetlStatus detl_workspace_load(const char *dir, struct DetlWorkspace **out);

/**
 * Loads a bundled fixture set, `"detl"` or `"ydel"`.
 *
 * # Safety
 * `name` must be a nul-terminated string and `out` a valid pointer.
 */
enum DetlStatus detl_workspace_fixtures(const char *name, struct DetlWorkspace **out);

/**
 * Releases a workspace. Null is ignored.
 *
 * # Safety
 * `ws` must come from this library and not be used afterwards.
 */
void detl_workspace_free(struct DetlWorkspace *ws);

/**
 * Evaluates `formula` at `world` of `model`. `max_nodes` bounds the
 * tableau used by restricted semantics; 0 means the default.
 *
 * # Safety
 * String arguments must be nul-terminated; `ws` and `out` valid.
 */
enum DetlStatus detl_eval(const struct DetlWorkspace *ws,
                          const char *model,
                          const char *world,
                          const char *formula,
                          enum DetlMode mode,
                          uint64_t max_nodes,
                          enum DetlTruth *out);

/**
 * Updates `model` with `action` and writes the canonical JSON document of
 * the result to `*out`. `DETL_MODE_RDETL` is rejected.
 *
 * # Safety
 * String arguments must be nul-terminated; `ws` and `out` valid.
 */
enum DetlStatus detl_update(const struct DetlWorkspace *ws,
                            const char *model,
                            const char *action,
                            enum DetlMode mode,
                            char **out);

/**
 * Checks one property of a model, or of an action given as `U` or `U@e`.
 * Writes whether it holds to `*holds` and, when `report` is not null, the
 * report line to `*report`.
 *
 * # Safety
 * String arguments must be nul-terminated; `ws` and `holds` valid.
 */
enum DetlStatus detl_check(const struct DetlWorkspace *ws,
                           const char *target,
                           const char *property,
                           bool *holds,
                           char **report);

/**
 * Writes an equivalent action-free formula to `*out`.
 *
 * # Safety
 * `formula` must be nul-terminated; `ws` and `out` valid.
 */
enum DetlStatus detl_reduce(const struct DetlWorkspace *ws, const char *formula, char **out);

/**
 * Decides validity over all models. On an invalid formula, and when
 * `countermodel` is not null, writes the countermodel document, pointed at
 * the refuting world, to `*countermodel`. `max_nodes` 0 means the default.
 *
 * # Safety
 * `formula` must be nul-terminated; `ws` and `valid` valid.
 */
enum DetlStatus detl_validity(const struct DetlWorkspace *ws,
                              const char *formula,
                              uint64_t max_nodes,
                              bool *valid,
                              char **countermodel);

/**
 * Whether `(model, world)` and `(other, other_world)` are bisimilar.
 *
 * # Safety
 * String arguments must be nul-terminated; `ws` and `out` valid.
 */
enum DetlStatus detl_bisimilar(const struct DetlWorkspace *ws,
                               const char *model,
                               const char *world,
                               const char *other,
                               const char *other_world,
                               bool *out);

/**
 * The message of the last failed call on this thread, or null. Owned by
 * the library; valid until the next call.
 */
const char *detl_last_error(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void detl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DETL_H */
