#ifndef KSPLIT_H
#define KSPLIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum KsStatus {
  KS_STATUS_OK = 0,
  KS_STATUS_INPUT_ERROR = 1,
  KS_STATUS_NUMERICAL_ERROR = 2,
  KS_STATUS_SLOPE_MISMATCH = 3,
  KS_STATUS_NULL_POINTER = 4,
  KS_STATUS_PANIC = 5,
} KsStatus;

// Opaque handle to a K-splitting record.
typedef struct KsRecord KsRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *ks_last_error(void);

void ks_string_free(char *s);

void ks_record_free(struct KsRecord *r);

// Parses and validates a record.
enum KsStatus ks_record_from_json(const char *json, struct KsRecord **out);

enum KsStatus ks_record_to_json(const struct KsRecord *r, char **out);

enum KsStatus ks_record_genus(const struct KsRecord *r, uint32_t *out);

enum KsStatus ks_record_slope(const struct KsRecord *r, int64_t *out);

enum KsStatus ks_k_stabilize(const struct KsRecord *r, struct KsRecord **out);

enum KsStatus ks_dehn_twist(const struct KsRecord *r, int64_t k, struct KsRecord **out);

enum KsStatus ks_connect_sum(const struct KsRecord *a,
                             const struct KsRecord *b,
                             struct KsRecord **out);

// Common K-stabilization. `traces_json`, if not null, receives
// `{"trace_a": ..., "trace_b": ...}`. Unequal slopes give
// `KS_STATUS_SLOPE_MISMATCH`.
enum KsStatus ks_common_stabilization(const struct KsRecord *a,
                                      const struct KsRecord *b,
                                      uint32_t extra_stabs,
                                      struct KsRecord **out,
                                      char **traces_json);

// Surface slope of a chart curve. `surface_json` is a graph file with
// optional `"tube"` settings, `curve_json` a chart curve. A non-positive
// `epsilon` selects the default pushoff distance.
enum KsStatus ks_surface_slope(const char *surface_json,
                               const char *curve_json,
                               double epsilon,
                               uint64_t seed,
                               int64_t *out);

// Linking number of two closed polygons of `n1` and `n2` vertices, given
// as packed `x, y, z` triples. Both engines must agree.
enum KsStatus ks_linking_number(const double *xyz1,
                                size_t n1,
                                const double *xyz2,
                                size_t n2,
                                uint64_t seed,
                                int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KSPLIT_H */
