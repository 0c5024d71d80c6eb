#ifndef CROSSKIT_H
#define CROSSKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CkStatus {
  CK_STATUS_OK = 0,
  CK_STATUS_NULL_ARGUMENT = 1,
  CK_STATUS_INVALID_UTF8 = 2,
  CK_STATUS_PARSE = 3,
  CK_STATUS_DOMAIN = 4,
  CK_STATUS_STRUCTURE = 5,
  CK_STATUS_BUDGET = 6,
  CK_STATUS_REGION = 7,
  CK_STATUS_IO = 8,
  CK_STATUS_JSON = 9,
  CK_STATUS_PANIC = 10,
} CkStatus;

typedef struct CkDrawing CkDrawing;

typedef struct CkEstimate CkEstimate;

typedef struct CkGraph CkGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *ck_version(void);

/**
 * Message of the last failed call on this thread, or null. Free with [`ck_string_free`].
 */
char *ck_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void ck_string_free(char *s);

/**
 * Parses the text (`n` then `u v [w]` lines) or JSON graph format.
 *
 * # Safety
 * `text` is a NUL-terminated string; `out` is writable.
 */
enum CkStatus ck_graph_parse(const char *text, struct CkGraph **out);

/**
 * Edgeless graph on `n` vertices.
 *
 * # Safety
 * `out` is writable.
 */
enum CkStatus ck_graph_new(size_t n, struct CkGraph **out);

/**
 * # Safety
 * `out` is writable.
 */
enum CkStatus ck_graph_complete(size_t n, struct CkGraph **out);

/**
 * `G(n, p)` with unit weights.
 *
 * # Safety
 * `out` is writable.
 */
enum CkStatus ck_graph_random(size_t n, double p, uint64_t seed, struct CkGraph **out);

/**
 * Sets the weight of `uv` to `num/den` in `[0, 1]`; zero removes the edge.
 *
 * # Safety
 * `g` is a live graph handle.
 */
enum CkStatus ck_graph_set_weight(struct CkGraph *g, size_t u, size_t v, int64_t num, int64_t den);

/**
 * # Safety
 * `g` is null or a live graph handle.
 */
size_t ck_graph_vertex_count(const struct CkGraph *g);

/**
 * # Safety
 * `g` is null or a live graph handle.
 */
size_t ck_graph_edge_count(const struct CkGraph *g);

/**
 * JSON form of the graph. Free with [`ck_string_free`].
 *
 * # Safety
 * `g` is a live graph handle; `out` is writable.
 */
enum CkStatus ck_graph_to_json(const struct CkGraph *g, char **out);

/**
 * # Safety
 * `g` is null or a handle from this library, not yet freed.
 */
void ck_graph_free(struct CkGraph *g);

/**
 * Exact crossing number with at most `nodes` search nodes. `*exact` is 0 when the
 * budget ran out and the value is only an upper bound. `drawing` may be null.
 *
 * # Safety
 * `g` is a live graph handle; `value` and `exact` are writable; `drawing` is null or writable.
 */
enum CkStatus ck_exact(const struct CkGraph *g,
                       uint64_t nodes,
                       uint64_t seed,
                       double *value,
                       int32_t *exact,
                       struct CkDrawing **drawing);

/**
 * Quotient estimate of `cr(G)`.
 *
 * # Safety
 * `g` is a live graph handle; `out` is writable.
 */
enum CkStatus ck_estimate(const struct CkGraph *g,
                          double epsilon,
                          size_t max_classes,
                          uint64_t seed,
                          struct CkEstimate **out);

/**
 * # Safety
 * `e` is null or a live estimate handle.
 */
double ck_estimate_value(const struct CkEstimate *e);

/**
 * `estimate / n⁴`.
 *
 * # Safety
 * `e` is null or a live estimate handle.
 */
double ck_estimate_normalized(const struct CkEstimate *e);

/**
 * # Safety
 * `e` is null or a live estimate handle.
 */
size_t ck_estimate_class_count(const struct CkEstimate *e);

/**
 * Class of each vertex; `classes` must hold one entry per vertex of the estimated graph.
 *
 * # Safety
 * `e` is a live estimate handle; `classes` points to `len` writable entries.
 */
enum CkStatus ck_estimate_classes(const struct CkEstimate *e, size_t *classes, size_t len);

/**
 * # Safety
 * `e` is a live estimate handle; `out` is writable.
 */
enum CkStatus ck_estimate_to_json(const struct CkEstimate *e, char **out);

/**
 * # Safety
 * `e` is null or a handle from this library, not yet freed.
 */
void ck_estimate_free(struct CkEstimate *e);

/**
 * Drawing of `G` from a blown-up quotient drawing, weights rounded to multiples of `1/q`.
 *
 * # Safety
 * `g` is a live graph handle; `out` is writable.
 */
enum CkStatus ck_draw(const struct CkGraph *g,
                      double epsilon,
                      uint64_t q,
                      uint64_t seed,
                      struct CkDrawing **out);

/**
 * # Safety
 * `d` is null or a live drawing handle.
 */
double ck_drawing_crossing_weight(const struct CkDrawing *d);

/**
 * Exact crossing weight as a decimal or `p/q` string. Free with [`ck_string_free`].
 *
 * # Safety
 * `d` is a live drawing handle; `out` is writable.
 */
enum CkStatus ck_drawing_crossing_weight_exact(const struct CkDrawing *d, char **out);

/**
 * Drawing document, with the construction report when the drawing came from [`ck_draw`].
 *
 * # Safety
 * `d` is a live drawing handle; `out` is writable.
 */
enum CkStatus ck_drawing_to_json(const struct CkDrawing *d, char **out);

/**
 * # Safety
 * `d` is a live drawing handle; `out` is writable.
 */
enum CkStatus ck_drawing_to_svg(const struct CkDrawing *d, char **out);

/**
 * # Safety
 * `d` is null or a handle from this library, not yet freed.
 */
void ck_drawing_free(struct CkDrawing *d);

/**
 * Convex-position probability of four uniform points of `region`
 * (`square`, `disk`, `triangle`, `annulus:R`, `boxes:...`, `parallelogram:a,b,c,d`)
 * with its 99% confidence radius.
 *
 * # Safety
 * `region` is a NUL-terminated string; `estimate` and `radius` are writable.
 */
enum CkStatus ck_sylvester(const char *region,
                           uint64_t samples,
                           uint64_t seed,
                           size_t threads,
                           double *estimate,
                           double *radius);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CROSSKIT_H */
