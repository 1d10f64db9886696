#ifndef HOMFLY_H
#define HOMFLY_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HomflyAlgorithm {
  HOMFLY_ALGORITHM_KAUFFMAN = 0,
  HOMFLY_ALGORITHM_FPT = 1,
} HomflyAlgorithm;

typedef enum HomflyRender {
  // `a^2 + a^-2 - z^2 - 1`
  HOMFLY_RENDER_HUMAN = 0,
  // JSON list of `[a, z, "coefficient"]` terms.
  HOMFLY_RENDER_JSON = 1,
} HomflyRender;

// Status codes returned by every function.
typedef enum HomflyStatus {
  HOMFLY_STATUS_OK = 0,
  HOMFLY_STATUS_NULL_ARGUMENT = 1,
  HOMFLY_STATUS_INVALID_UTF8 = 2,
  HOMFLY_STATUS_PARSE_ERROR = 3,
  HOMFLY_STATUS_NO_COMPONENTS = 4,
  HOMFLY_STATUS_WIDTH_BUDGET_EXCEEDED = 5,
  HOMFLY_STATUS_INTERNAL = 6,
} HomflyStatus;

// Opaque diagram handle.
typedef struct HomflyDiagram HomflyDiagram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses a PD code such as `X[1,5,2,4], X[3,1,4,6], X[5,3,6,2]`.
//
// # Safety
// `pd` must be a valid C string and `out` a valid pointer.
enum HomflyStatus homfly_diagram_from_pd(const char *pd, struct HomflyDiagram **out);

// Parses the JSON diagram format.
//
// # Safety
// `json` must be a valid C string and `out` a valid pointer.
enum HomflyStatus homfly_diagram_from_json(const char *json, struct HomflyDiagram **out);

// Releases a diagram. Null is ignored.
//
// # Safety
// `d` must come from this library and not be used afterwards.
void homfly_diagram_free(struct HomflyDiagram *d);

// Number of crossings, or -1 for a null handle.
//
// # Safety
// `d` must be null or a live handle.
int64_t homfly_diagram_crossings(const struct HomflyDiagram *d);

// Writhe through `out`.
//
// # Safety
// `d` must be a live handle and `out` a valid pointer.
enum HomflyStatus homfly_diagram_writhe(const struct HomflyDiagram *d, int64_t *out);

// Computes the polynomial and stores an owned string in `out`.
//
// `width_budget` bounds the DP table size; 0 selects the default. It is
// ignored by the Kauffman algorithm.
//
// # Safety
// `d` must be a live handle and `out` a valid pointer.
enum HomflyStatus homfly_compute(const struct HomflyDiagram *d,
                                 enum HomflyAlgorithm algorithm,
                                 enum HomflyRender render,
                                 uint64_t width_budget,
                                 char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void homfly_string_free(char *s);

// Message of the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *homfly_last_error(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HOMFLY_H */
