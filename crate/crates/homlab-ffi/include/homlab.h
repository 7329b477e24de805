#ifndef HOMLAB_H
#define HOMLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Winner reported by the game solvers.
 */
typedef enum {
  HOMLAB_OUTCOME_PURSUERS_WIN = 0,
  HOMLAB_OUTCOME_EVADER_WINS = 1,
  HOMLAB_OUTCOME_INCONCLUSIVE = 2,
} HomlabOutcome;

/**
 * Result of every fallible call.
 */
typedef enum {
  HOMLAB_STATUS_OK = 0,
  HOMLAB_STATUS_NULL_POINTER = 1,
  HOMLAB_STATUS_INVALID_UTF8 = 2,
  HOMLAB_STATUS_PARSE_ERROR = 3,
  HOMLAB_STATUS_INVALID_INPUT = 4,
  HOMLAB_STATUS_BUDGET_EXHAUSTED = 5,
  HOMLAB_STATUS_UNKNOWN_SUITE = 6,
  HOMLAB_STATUS_PANIC = 7,
} HomlabStatus;

/**
 * Opaque simple graph.
 */
typedef struct HomlabGraph HomlabGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 *
 * The pointer stays valid until the next call into the library from the same thread.
 */
const char *homlab_last_error(void);

/**
 * Parses a graph given as graph6 or as JSON.
 *
 * # Safety
 * `input` must be a valid NUL-terminated string and `out` a valid pointer to write to.
 */
HomlabStatus homlab_graph_parse(const char *input, HomlabGraph **out);

/**
 * Builds a graph from `edge_count` vertex pairs stored flat in `edges`.
 *
 * # Safety
 * `edges` must point to `2 * edge_count` readable values (it may be null when `edge_count` is 0);
 * `out` must be a valid pointer to write to.
 */
HomlabStatus homlab_graph_from_edges(size_t n,
                                     const size_t *edges,
                                     size_t edge_count,
                                     HomlabGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must come from this library and must not be used afterwards.
 */
void homlab_graph_free(HomlabGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t homlab_graph_order(const HomlabGraph *g);

/**
 * Number of edges, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t homlab_graph_size(const HomlabGraph *g);

/**
 * Writes the graph as JSON (`as_graph6 == false`) or graph6 into a new string.
 *
 * # Safety
 * `g` must be a live handle and `out` a valid pointer; free the result with `homlab_string_free`.
 */
HomlabStatus homlab_graph_to_string(const HomlabGraph *g, bool as_graph6, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void homlab_string_free(char *s);

/**
 * hom(pattern, target) as a decimal string, exact at any size.
 *
 * # Safety
 * Both handles must be live and `out` a valid pointer; free the result with `homlab_string_free`.
 */
HomlabStatus homlab_hom_count(const HomlabGraph *pattern, const HomlabGraph *target, char **out);

/**
 * Number of subgraphs of `target` isomorphic to `pattern`.
 *
 * # Safety
 * Both handles must be live and `out` a valid pointer; free the result with `homlab_string_free`.
 */
HomlabStatus homlab_sub_count(const HomlabGraph *pattern, const HomlabGraph *target, char **out);

/**
 * Writes whether the two graphs are isomorphic.
 *
 * # Safety
 * Both handles must be live and `out` a valid pointer.
 */
HomlabStatus homlab_are_isomorphic(const HomlabGraph *a, const HomlabGraph *b, bool *out);

/**
 * CFI graph over a connected base with the `twist_len` vertices in `twist` twisted.
 *
 * # Safety
 * `base` must be live, `twist` must point to `twist_len` readable values (null allowed when
 * `twist_len` is 0) and `out` must be a valid pointer.
 */
HomlabStatus homlab_cfi(const HomlabGraph *base,
                        const size_t *twist,
                        size_t twist_len,
                        HomlabGraph **out);

/**
 * Node searching with `k1` reusable and `k2` non-reusable searchers.
 *
 * # Safety
 * `g` must be live and `out` a valid pointer.
 */
HomlabStatus homlab_solve_ns(const HomlabGraph *g, size_t k1, size_t k2, HomlabOutcome *out);

/**
 * Cops and robber with `k1` reusable and `k2` non-reusable cops within `rounds` rounds.
 *
 * # Safety
 * `g` must be live and `out` a valid pointer.
 */
HomlabStatus homlab_solve_cr(const HomlabGraph *g,
                             size_t k1,
                             size_t k2,
                             size_t rounds,
                             HomlabOutcome *out);

/**
 * Runs a named suite. `instance` may be null to run all instances. The JSON report goes to
 * `report` (may be null to skip it) and the verdict to `passed`.
 *
 * # Safety
 * `name` must be a valid string, `instance` null or a valid string, `passed` a valid pointer and
 * `report` null or a valid pointer; free the report with `homlab_string_free`.
 */
HomlabStatus homlab_run_suite(const char *name,
                              uint64_t seed,
                              const char *instance,
                              bool *passed,
                              char **report);

/**
 * Parses graph6 only; JSON input is rejected.
 *
 * # Safety
 * `input` must be a valid NUL-terminated string and `out` a valid pointer to write to.
 */
HomlabStatus homlab_graph_from_graph6(const char *input, HomlabGraph **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOMLAB_H */
