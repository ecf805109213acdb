#ifndef TVWALK_H
#define TVWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TvStatus {
  TV_STATUS_OK = 0,
  TV_STATUS_NULL_POINTER = 1,
  TV_STATUS_INVALID_ARGUMENT = 2,
  TV_STATUS_DIMENSION_MISMATCH = 3,
  TV_STATUS_TOO_LARGE = 4,
  TV_STATUS_FORMAT = 5,
  TV_STATUS_BUFFER_TOO_SMALL = 6,
  TV_STATUS_INTERNAL = 7,
} TvStatus;

typedef enum TvVerdict {
  TV_VERDICT_ACCEPT = 0,
  TV_VERDICT_WRONG_ANSWER = 1,
  TV_VERDICT_TOO_SLOW = 2,
} TvVerdict;

/**
 * Opaque public key plus the secret move list behind it.
 */
typedef struct TvKeyPair TvKeyPair;

/**
 * Opaque square matrix over GF(2).
 */
typedef struct TvMatrix TvMatrix;

typedef struct TvOpCount {
  uint64_t bit_ops;
  uint64_t word_ops;
} TvOpCount;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *tv_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tv_version(void);

/**
 * `|GL_n(F_2)|`; fails with `TV_STATUS_TOO_LARGE` beyond 64 bits.
 */
enum TvStatus tv_group_order(uint32_t n, uint64_t *order);

/**
 * `|GL_n(F_2)| / 2^{n^2}`.
 */
double tv_invertible_fraction(uint32_t n);

enum TvStatus tv_matrix_identity(uint32_t n, struct TvMatrix **matrix);

/**
 * Parses the binary matrix file format from `len` bytes.
 */
enum TvStatus tv_matrix_from_bytes(const uint8_t *bytes, size_t len, struct TvMatrix **matrix);

/**
 * Serializes into `buf`. `*len` receives the required size; when `cap` is
 * too small nothing is written and `TV_STATUS_BUFFER_TOO_SMALL` is returned.
 */
enum TvStatus tv_matrix_to_bytes(const struct TvMatrix *matrix,
                                 uint8_t *buf,
                                 size_t cap,
                                 size_t *len);

/**
 * Row-major key with bit `i*n + j` set for entry `(i, j)`; needs `n*n <= 64`.
 */
enum TvStatus tv_matrix_encode_key(const struct TvMatrix *matrix, uint64_t *key);

enum TvStatus tv_matrix_decode_key(uint64_t key, uint32_t n, struct TvMatrix **matrix);

/**
 * Dimension, or 0 for NULL.
 */
uint32_t tv_matrix_dim(const struct TvMatrix *matrix);

enum TvStatus tv_matrix_get(const struct TvMatrix *matrix, uint32_t i, uint32_t j, uint8_t *bit);

enum TvStatus tv_matrix_rank(const struct TvMatrix *matrix, uint32_t *rank);

/**
 * Row `target` += row `source`.
 */
enum TvStatus tv_matrix_apply_transvection(struct TvMatrix *matrix,
                                           uint32_t target,
                                           uint32_t source);

void tv_matrix_free(struct TvMatrix *matrix);

/**
 * Runs the walk for `t` steps from the identity with the given seed.
 */
enum TvStatus tv_keygen(uint32_t n,
                        uint64_t t,
                        uint64_t seed,
                        bool lazy,
                        struct TvKeyPair **keypair);

/**
 * A fresh copy of the public key; free it with `tv_matrix_free`.
 */
enum TvStatus tv_keypair_public(const struct TvKeyPair *keypair, struct TvMatrix **matrix);

/**
 * Non-held steps in the secret, or 0 for NULL.
 */
uint64_t tv_keypair_move_count(const struct TvKeyPair *keypair);

void tv_keypair_free(struct TvKeyPair *keypair);

/**
 * Replays the secret moves on `x` (n bytes) and writes `A x` to `y`.
 */
enum TvStatus tv_respond_honest(const struct TvKeyPair *keypair,
                                const uint8_t *x,
                                size_t n,
                                uint8_t *y,
                                struct TvOpCount *ops);

/**
 * Computes `A x` from the public key alone.
 */
enum TvStatus tv_respond_dishonest(const struct TvMatrix *public_,
                                   const uint8_t *x,
                                   size_t n,
                                   uint8_t *y,
                                   struct TvOpCount *ops);

/**
 * Accepts iff `y = A x` and `bit_ops <= deadline_ops`.
 */
enum TvStatus tv_verify(const struct TvMatrix *public_,
                        const uint8_t *x,
                        const uint8_t *y,
                        size_t n,
                        uint64_t bit_ops,
                        uint64_t deadline_ops,
                        enum TvVerdict *verdict);

/**
 * Exact TV and l2 mixing times from the identity for `n <= 4`. A periodic
 * chain with `lazy` false fails with `TV_STATUS_INVALID_ARGUMENT`.
 */
enum TvStatus tv_mixing_times(uint32_t n, double eps, bool lazy, uint64_t *t_tv, uint64_t *t_l2);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TVWALK_H */
