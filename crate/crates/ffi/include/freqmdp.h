/* Copyright 2026 The freqmdp Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef FREQMDP_H
#define FREQMDP_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FreqmdpStatus {
  FREQMDP_STATUS_OK = 0,
  FREQMDP_STATUS_INVALID_ARGUMENT = 1,
  FREQMDP_STATUS_INCOMPATIBLE_SKETCH = 2,
  FREQMDP_STATUS_PROTOCOL_VIOLATION = 3,
  FREQMDP_STATUS_WRONG_PROTOCOL = 4,
  FREQMDP_STATUS_DECODE = 5,
  FREQMDP_STATUS_OVERFLOW = 6,
  FREQMDP_STATUS_NULL_POINTER = 7,
  FREQMDP_STATUS_BUFFER_TOO_SMALL = 8,
  FREQMDP_STATUS_PANIC = 9,
  FREQMDP_STATUS_OTHER = 10,
} FreqmdpStatus;

/**
 * Sums per-party noisy sketch estimates.
 */
typedef struct FreqmdpBasicAggregator FreqmdpBasicAggregator;

/**
 * Decodes and aggregates sparse one-item messages.
 */
typedef struct FreqmdpLdpAggregator FreqmdpLdpAggregator;

/**
 * Count sketch under construction.
 */
typedef struct FreqmdpSketch FreqmdpSketch;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message, NUL-terminated and
 * truncated to `cap`. Returns the full message length without the NUL.
 */
size_t freqmdp_last_error_message(char *buf, size_t cap);

/**
 * Empty sketch with `rows` seeded hash pairs over `[0, domain)`.
 */
enum FreqmdpStatus freqmdp_sketch_new(size_t rows,
                                      size_t width,
                                      uint64_t domain,
                                      uint64_t seed,
                                      struct FreqmdpSketch **out);

void freqmdp_sketch_free(struct FreqmdpSketch *sketch);

enum FreqmdpStatus freqmdp_sketch_update(struct FreqmdpSketch *sketch,
                                         uint64_t item,
                                         int64_t delta);

/**
 * Median-of-rows point estimate.
 */
enum FreqmdpStatus freqmdp_sketch_estimate(const struct FreqmdpSketch *sketch,
                                           uint64_t item,
                                           double *out);

/**
 * Serializes the exact (noiseless) sketch.
 */
enum FreqmdpStatus freqmdp_sketch_to_bytes(const struct FreqmdpSketch *sketch,
                                           uint8_t *buf,
                                           size_t cap,
                                           size_t *written);

enum FreqmdpStatus freqmdp_sketch_from_bytes(const uint8_t *bytes,
                                             size_t len,
                                             struct FreqmdpSketch **out);

/**
 * Adds two-sided geometric noise calibrated to `eps` and the sketch's
 * `2 * rows` sensitivity, then serializes. The handle is left unchanged.
 */
enum FreqmdpStatus freqmdp_sketch_privatize(const struct FreqmdpSketch *sketch,
                                            double eps,
                                            uint64_t noise_seed,
                                            uint8_t *buf,
                                            size_t cap,
                                            size_t *written);

enum FreqmdpStatus freqmdp_basic_aggregator_new(struct FreqmdpBasicAggregator **out);

void freqmdp_basic_aggregator_free(struct FreqmdpBasicAggregator *agg);

/**
 * Ingests one party's serialized noisy sketch.
 */
enum FreqmdpStatus freqmdp_basic_aggregator_ingest(struct FreqmdpBasicAggregator *agg,
                                                   uint64_t party,
                                                   const uint8_t *bytes,
                                                   size_t len);

enum FreqmdpStatus freqmdp_basic_aggregator_estimate(const struct FreqmdpBasicAggregator *agg,
                                                     uint64_t item,
                                                     double *out);

enum FreqmdpStatus freqmdp_ldp_width(double eps, size_t *out);

/**
 * Encodes one party's single item as an Elias-gamma bit string.
 * `written` receives the byte count, `bits` the exact bit length.
 */
enum FreqmdpStatus freqmdp_ldp_encode(uint64_t party,
                                      uint64_t item,
                                      double eps,
                                      uint64_t domain,
                                      uint64_t hash_seed,
                                      uint64_t noise_seed,
                                      uint8_t *buf,
                                      size_t cap,
                                      size_t *written,
                                      size_t *bits);

enum FreqmdpStatus freqmdp_ldp_aggregator_new(double eps,
                                              uint64_t domain,
                                              struct FreqmdpLdpAggregator **out);

void freqmdp_ldp_aggregator_free(struct FreqmdpLdpAggregator *agg);

enum FreqmdpStatus freqmdp_ldp_aggregator_ingest(struct FreqmdpLdpAggregator *agg,
                                                 uint64_t party,
                                                 uint64_t hash_seed,
                                                 const uint8_t *bytes,
                                                 size_t len);

enum FreqmdpStatus freqmdp_ldp_aggregator_estimate(const struct FreqmdpLdpAggregator *agg,
                                                   uint64_t item,
                                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREQMDP_H */
