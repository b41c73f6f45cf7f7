#ifndef RCSPKIT_H
#define RCSPKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RcspStatus {
  RCSP_STATUS_OK = 0,
  RCSP_STATUS_NULL_POINTER = 1,
  RCSP_STATUS_INVALID_UTF8 = 2,
  RCSP_STATUS_PARSE_ERROR = 3,
  RCSP_STATUS_VALIDATION_ERROR = 4,
  RCSP_STATUS_CAP_EXCEEDED = 5,
  RCSP_STATUS_NO_METHOD = 6,
  RCSP_STATUS_PANIC = 7,
} RcspStatus;

typedef enum RcspMethod {
  RCSP_METHOD_GREEDY = 0,
  RCSP_METHOD_BFS = 1,
} RcspMethod;

typedef struct RcspInstance RcspInstance;

typedef struct RcspLanguage RcspLanguage;

typedef struct RcspRelation RcspRelation;

typedef struct RcspBooleanFlags {
  bool safely_or_free;
  bool safely_nand_free;
  bool safely_cw_bijunctive;
} RcspBooleanFlags;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *rcsp_last_error(void);

/**
 * Parses relation file text and returns the relation called `name`, or the
 * first one when `name` is null.
 *
 * # Safety
 * `text` and a non-null `name` must be NUL-terminated strings; `out` must be writable.
 */
enum RcspStatus rcsp_relation_parse(const char *text, const char *name, struct RcspRelation **out);

/**
 * # Safety
 * `relation` must come from [`rcsp_relation_parse`] and not be freed twice.
 */
void rcsp_relation_free(struct RcspRelation *relation);

/**
 * # Safety
 * `relation` must be a live handle and the out pointers writable.
 */
enum RcspStatus rcsp_relation_shape(const struct RcspRelation *relation,
                                    uint32_t *out_domain,
                                    uintptr_t *out_arity,
                                    uintptr_t *out_len);

/**
 * The safe Boolean properties of a relation over {0,1}.
 *
 * # Safety
 * `relation` must be a live handle and `out` writable.
 */
enum RcspStatus rcsp_relation_boolean_flags(const struct RcspRelation *relation,
                                            struct RcspBooleanFlags *out);

/**
 * Invariance under the ordered partial Maltsev operation of the order
 * listing `order[0] < order[1] < ...`.
 *
 * # Safety
 * `order` must point to `order_len` values; `relation` must be live and `out` writable.
 */
enum RcspStatus rcsp_relation_maltsev_invariant(const struct RcspRelation *relation,
                                                const uint32_t *order,
                                                uintptr_t order_len,
                                                bool *out);

/**
 * Whether the binary relation, read as a digraph, is totally rectangular.
 *
 * # Safety
 * `relation` must be live and `out` writable.
 */
enum RcspStatus rcsp_relation_totally_rectangular(const struct RcspRelation *relation, bool *out);

/**
 * Parses a language from either a relation file or instance-format text.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum RcspStatus rcsp_language_parse(const char *text, struct RcspLanguage **out);

/**
 * # Safety
 * `language` must come from [`rcsp_language_parse`] and not be freed twice.
 */
void rcsp_language_free(struct RcspLanguage *language);

/**
 * Complexity of reconfiguration over a Boolean language: `true` for
 * polynomial time, `false` for PSPACE-complete.
 *
 * # Safety
 * `language` must be live and `out` writable.
 */
enum RcspStatus rcsp_language_is_polynomial(const struct RcspLanguage *language, bool *out);

/**
 * The full classification report (`kv` selects key-value lines). Release
 * the string with [`rcsp_string_free`].
 *
 * # Safety
 * `language` must be live and `out` writable.
 */
enum RcspStatus rcsp_language_report(const struct RcspLanguage *language, bool kv, char **out);

/**
 * Searches for an order preserving the language. On success `*out_found`
 * tells whether one exists; if so the order is written to `out_order`
 * (least first), which must hold at least the domain size.
 *
 * # Safety
 * `out_order` must have room for `capacity` values; other pointers must be valid.
 */
enum RcspStatus rcsp_language_find_order(const struct RcspLanguage *language,
                                         uint32_t *out_order,
                                         uintptr_t capacity,
                                         bool *out_found);

/**
 * Parses an instance (domain, relations, constraints, start and target).
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` writable.
 */
enum RcspStatus rcsp_instance_parse(const char *text, struct RcspInstance **out);

/**
 * # Safety
 * `instance` must come from [`rcsp_instance_parse`] and not be freed twice.
 */
void rcsp_instance_free(struct RcspInstance *instance);

/**
 * Decides whether start and target are connected, with the greedy solver
 * when an order is available and the exhaustive search otherwise.
 *
 * # Safety
 * `instance` must be live and the out pointers writable.
 */
enum RcspStatus rcsp_instance_solve(const struct RcspInstance *instance,
                                    bool *out_connected,
                                    enum RcspMethod *out_method);

/**
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void rcsp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RCSPKIT_H */
