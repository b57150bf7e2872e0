#ifndef CABLEKIN_H
#define CABLEKIN_H

/* Generated by cbindgen from cablekin-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of input features per prediction.
 */
#define CABLEKIN_NUM_FEATURES 7

/**
 * Number of predicted motor rotations.
 */
#define CABLEKIN_NUM_OUTPUTS 4

/**
 * Result of a C-ABI call.
 */
typedef enum CkStatus {
  CK_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  CK_STATUS_NULL_ARGUMENT = 1,
  /**
   * An argument violated its documented domain.
   */
  CK_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The bytes are not a valid model container.
   */
  CK_STATUS_PARSE_ERROR = 3,
  CK_STATUS_IO_ERROR = 4,
  /**
   * The target position lies outside the rig workspace.
   */
  CK_STATUS_WORKSPACE_VIOLATION = 5,
  /**
   * A numeric failure such as inconsistent cable lengths.
   */
  CK_STATUS_NUMERIC_ERROR = 6,
} CkStatus;

/**
 * An opaque loaded model (float or quantized).
 */
typedef struct CkModel CkModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a model container from a byte buffer.
 */
enum CkStatus cablekin_model_from_bytes(const uint8_t *data,
                                        size_t len,
                                        struct CkModel **out_model);

/**
 * Reads and parses a model container file (path is UTF-8).
 */
enum CkStatus cablekin_model_load(const char *path, struct CkModel **out_model);

/**
 * Releases a model handle. Null is a no-op.
 */
void cablekin_model_free(struct CkModel *model);

/**
 * Returns 1 when the model stores 8-bit weights, 0 for float weights and
 * -1 when the handle is null.
 */
int cablekin_model_is_quantized(const struct CkModel *model);

/**
 * Predicts the four motor rotations for one feature vector.
 * `features` must hold 7 doubles, `rotations_out` room for 4.
 */
enum CkStatus cablekin_model_predict(const struct CkModel *model,
                                     const double *features,
                                     double *rotations_out);

/**
 * Exact rotations from the closed-form kinematics: moving a point robot
 * from the rig's base pose `(B/2, D/2, H)` to `(x, y, z)` on a rig with
 * dimensions `B x D x H` and uniform winch radius `R`.
 */
enum CkStatus cablekin_exact_rotations(double breadth,
                                       double depth,
                                       double height,
                                       double radius,
                                       double x,
                                       double y,
                                       double z,
                                       double *rotations_out);

/**
 * Recovers the point-robot position from four cable lengths. `lengths`
 * must hold 4 doubles; the position is written as `x, y, z` into
 * `position_out` (3 doubles). `tol` is the relative residual tolerance on
 * squared lengths (pass 0 for the default 1e-6).
 */
enum CkStatus cablekin_forward_position(double breadth,
                                        double depth,
                                        double height,
                                        const double *lengths,
                                        double tol,
                                        double *position_out);

/**
 * A static, null-terminated description of a status code.
 */
const char *cablekin_status_message(enum CkStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CABLEKIN_H */
