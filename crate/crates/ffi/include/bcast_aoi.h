#ifndef BCAST_AOI_H
#define BCAST_AOI_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BcastPolicyKind {
  BCAST_POLICY_KIND_RANDOMIZED = 0,
  BCAST_POLICY_KIND_MAX_WEIGHT = 1,
} BcastPolicyKind;

typedef enum BcastStatus {
  BCAST_STATUS_OK = 0,
  BCAST_STATUS_NULL_POINTER = 1,
  BCAST_STATUS_INVALID_CHANNEL = 2,
  BCAST_STATUS_INVALID_WEIGHTS = 3,
  BCAST_STATUS_INVALID_STATE = 4,
  BCAST_STATUS_INVALID_CONFIG = 5,
  BCAST_STATUS_DEGENERATE = 6,
  BCAST_STATUS_NEVER_SERVED = 7,
  BCAST_STATUS_IO = 8,
  BCAST_STATUS_PANIC = 9,
} BcastStatus;

/**
 * Opaque channel handle.
 */
typedef struct BcastChannel BcastChannel;

/**
 * Opaque simulator handle.
 */
typedef struct BcastSimulator BcastSimulator;

/**
 * Ages `h1, h2` and overheard-packet ages `w1, w2` (0 when empty).
 */
typedef struct BcastState {
  uint64_t h1;
  uint64_t h2;
  uint64_t w1;
  uint64_t w2;
} BcastState;

typedef struct BcastSummary {
  double mean;
  /**
   * NaN when `reps == 1`.
   */
  double ci_halfwidth;
  double std_error;
  uint32_t reps;
} BcastSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread. Valid until the next failing
 * call on the same thread.
 */
const char *bcast_last_error_message(void);

/**
 * Channel with marginal erasure probabilities `eps1`, `eps2` and joint
 * erasure probability `eps12 <= min(eps1, eps2)`.
 */
enum BcastStatus bcast_channel_new(double eps1,
                                   double eps2,
                                   double eps12,
                                   struct BcastChannel **out);

void bcast_channel_free(struct BcastChannel *channel);

/**
 * Whether a joint erasure law with these marginals exists.
 */
bool bcast_channel_is_realizable(const struct BcastChannel *channel);

enum BcastStatus bcast_lower_bound(const struct BcastChannel *channel, double alpha1, double *out);

/**
 * `mu` points to three action probabilities.
 */
enum BcastStatus bcast_randomized_ewsaoi(const struct BcastChannel *channel,
                                         double alpha1,
                                         const double *mu,
                                         double *out);

/**
 * Best randomized policy; with `coded == false` the third probability is
 * fixed at zero. `out_mu` receives three values.
 */
enum BcastStatus bcast_optimize_randomized(const struct BcastChannel *channel,
                                           double alpha1,
                                           bool coded,
                                           double tolerance,
                                           double *out_mu,
                                           double *out_value);

/**
 * Max-Weight upper bound at the given `mu`.
 */
enum BcastStatus bcast_mw_upper_bound(const struct BcastChannel *channel,
                                      double alpha1,
                                      const double *mu,
                                      double *out);

enum BcastStatus bcast_min_mw_upper_bound(const struct BcastChannel *channel,
                                          double alpha1,
                                          double tolerance,
                                          double *out_mu,
                                          double *out_value);

/**
 * One slot of the age dynamics. `action` is 1, 2 or 3; `z1`, `z2` tell
 * whether each user received the transmission.
 */
enum BcastStatus bcast_state_step(const struct BcastState *state,
                                  uint8_t action,
                                  bool z1,
                                  bool z2,
                                  struct BcastState *out);

/**
 * Max-Weight action number (1, 2 or 3) for `state`; `coded == false`
 * restricts the choice to 1 and 2.
 */
enum BcastStatus bcast_mw_choose(const struct BcastChannel *channel,
                                 double alpha1,
                                 const struct BcastState *state,
                                 bool coded,
                                 uint8_t *out_action);

/**
 * `mu` is read only for randomized policies and may be null otherwise.
 */
enum BcastStatus bcast_simulator_new(const struct BcastChannel *channel,
                                     double alpha1,
                                     enum BcastPolicyKind kind,
                                     bool coded,
                                     const double *mu,
                                     uint64_t horizon,
                                     uint32_t reps,
                                     uint64_t seed,
                                     struct BcastSimulator **out);

void bcast_simulator_free(struct BcastSimulator *sim);

/**
 * Starts from state `initial` (null means `(1,1,0,0)`).
 */
enum BcastStatus bcast_simulator_set_initial(struct BcastSimulator *sim,
                                             const struct BcastState *initial);

/**
 * Runs all replicates. Identical handles give identical summaries.
 */
enum BcastStatus bcast_simulator_run(const struct BcastSimulator *sim, struct BcastSummary *out);

/**
 * Static name of a status code.
 */
const char *bcast_status_name(enum BcastStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BCAST_AOI_H */
