#ifndef ENVCODE_H
#define ENVCODE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every function.
 */
typedef enum EnvcStatus {
  ENVC_STATUS_OK = 0,
  ENVC_STATUS_NULL_POINTER = 1,
  /**
   * An argument is outside the operation's domain.
   */
  ENVC_STATUS_DOMAIN = 2,
  /**
   * The container payload could not be decoded.
   */
  ENVC_STATUS_DECODE = 3,
  /**
   * The container header is malformed.
   */
  ENVC_STATUS_FORMAT = 4,
  /**
   * A size or arithmetic limit would be exceeded.
   */
  ENVC_STATUS_RESOURCE = 5,
  ENVC_STATUS_IO = 6,
  /**
   * An internal error was caught at the boundary.
   */
  ENVC_STATUS_INTERNAL = 7,
} EnvcStatus;

/**
 * Serialized container bytes.
 */
typedef struct EnvcBuffer EnvcBuffer;

/**
 * A decoded integer sequence.
 */
typedef struct EnvcSequence EnvcSequence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Encodes `len` positive integers with the scheduled cutoffs of a power-law
 * envelope `c_env·k^{-alpha}`.
 *
 * # Safety
 * `values` must point to `len` readable integers (or be null with `len == 0`)
 * and `out` must be a valid pointer.
 */
enum EnvcStatus envc_encode_fixed(const uint64_t *values,
                                  size_t len,
                                  double alpha,
                                  double c_env,
                                  struct EnvcBuffer **out);

/**
 * Encodes with the constant cutoff `ceil(mu · distinct count)`.
 *
 * # Safety
 * Same contract as [`envc_encode_fixed`].
 */
enum EnvcStatus envc_encode_adaptive(const uint64_t *values,
                                     size_t len,
                                     double mu,
                                     struct EnvcBuffer **out);

/**
 * # Safety
 * `buffer` must come from an encode call and not be freed.
 */
const uint8_t *envc_buffer_data(const struct EnvcBuffer *buffer);

/**
 * # Safety
 * `buffer` must come from an encode call and not be freed.
 */
size_t envc_buffer_len(const struct EnvcBuffer *buffer);

/**
 * # Safety
 * `buffer` must be null or come from an encode call; it is invalid afterwards.
 */
void envc_buffer_free(struct EnvcBuffer *buffer);

/**
 * Decodes a container.
 *
 * # Safety
 * `bytes` must point to `len` readable bytes (or be null with `len == 0`)
 * and `out` must be a valid pointer.
 */
enum EnvcStatus envc_decode(const uint8_t *bytes, size_t len, struct EnvcSequence **out);

/**
 * # Safety
 * `sequence` must come from [`envc_decode`] and not be freed.
 */
const uint64_t *envc_sequence_data(const struct EnvcSequence *sequence);

/**
 * # Safety
 * `sequence` must come from [`envc_decode`] and not be freed.
 */
size_t envc_sequence_len(const struct EnvcSequence *sequence);

/**
 * # Safety
 * `sequence` must be null or come from [`envc_decode`]; it is invalid afterwards.
 */
void envc_sequence_free(struct EnvcSequence *sequence);

/**
 * Regret upper bound in bits for the power-law envelope `1 ∧ c·k^{-alpha}`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum EnvcStatus envc_regret_upper_powerlaw(double alpha, double c, uint64_t n, double *out);

/**
 * Lower and upper leading redundancy terms in bits for the power-law class.
 * `lower_valid` is set to 0 when the lower bound's preconditions fail.
 *
 * # Safety
 * All output pointers must be valid.
 */
enum EnvcStatus envc_powerlaw_bounds(double alpha,
                                     double c,
                                     uint64_t n,
                                     double *lower,
                                     double *upper,
                                     int32_t *lower_valid);

/**
 * Static description of a status code.
 */
const char *envc_status_message(enum EnvcStatus status);

/**
 * Library version as a NUL-terminated string.
 */
const char *envc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENVCODE_H */
