#ifndef RCLAB_H
#define RCLAB_H

/* Generated by cbindgen from the rclab-ffi crate; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RclabStatus {
  /**
   * The call succeeded and any out parameters were written.
   */
  RCLAB_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  RCLAB_STATUS_NULL_POINTER = 1,
  /**
   * An argument was rejected; `rclab_last_error` says why.
   */
  RCLAB_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation ran but a verified constraint was violated.
   */
  RCLAB_STATUS_CONSTRAINT_FAILED = 3,
  /**
   * An internal panic was caught at the boundary.
   */
  RCLAB_STATUS_PANIC = 4,
  /**
   * A string argument was not valid UTF-8.
   */
  RCLAB_STATUS_UTF8 = 5,
} RclabStatus;

/**
 * Opaque circuit handle.
 */
typedef struct RclabCircuit RclabCircuit;

/**
 * Opaque realizability-report handle.
 */
typedef struct RclabReport RclabReport;

/**
 * Headline measurements of a verified embedding.
 */
typedef struct RclabEmbedStats {
  /**
   * Latest firing tick of any gate.
   */
  int64_t makespan;
  /**
   * Largest L-infinity distance of any placed site from the center.
   */
  int64_t radius;
  /**
   * Number of placed gates, leveling buffers included.
   */
  size_t size;
  /**
   * Peak per-tick signal crossings of the causal sphere.
   */
  uint64_t maxcut;
} RclabEmbedStats;

/**
 * Capacity-model parameters; a plain value struct, no handle needed.
 */
typedef struct RclabAttentionParams {
  /**
   * Lattice dimension, at least 1.
   */
  uint32_t d;
  double heads;
  double kappa;
  double c_head;
  double k_d;
  double eta_d;
  double t_env;
} RclabAttentionParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; never freed by
 * the caller.
 */
const char *rclab_version(void);

/**
 * Copy the calling thread's last error message into `buf` (truncated
 * to `cap` bytes including the terminating NUL) and return the full
 * message length excluding the NUL.  `buf` may be NULL to query the
 * length alone.  The message is replaced by every non-OK call on the
 * same thread.
 */
size_t rclab_last_error(char *buf, size_t cap);

/**
 * Build the n-input parity-tree circuit.  On success the caller owns
 * the handle and must release it with `rclab_circuit_free`.
 */
enum RclabStatus rclab_parity_circuit(uint32_t n, struct RclabCircuit **out);

/**
 * Parse a circuit from its text encoding.  On success the caller owns
 * the handle and must release it with `rclab_circuit_free`.
 */
enum RclabStatus rclab_circuit_decode(const char *text, struct RclabCircuit **out);

/**
 * Serialize a circuit to its text encoding.  On success `*out` is a
 * NUL-terminated string the caller must release with
 * `rclab_string_free`.
 */
enum RclabStatus rclab_circuit_encode(const struct RclabCircuit *circuit, char **out);

/**
 * Number of gates; 0 when the handle is NULL.
 */
size_t rclab_circuit_gate_count(const struct RclabCircuit *circuit);

/**
 * Number of input gates; 0 when the handle is NULL.
 */
size_t rclab_circuit_input_count(const struct RclabCircuit *circuit);

/**
 * Number of output ports; 0 when the handle is NULL.
 */
size_t rclab_circuit_output_count(const struct RclabCircuit *circuit);

/**
 * Release a circuit handle; NULL is ignored.
 */
void rclab_circuit_free(struct RclabCircuit *circuit);

/**
 * Release a string produced by this library; NULL is ignored.
 */
void rclab_string_free(char *s);

/**
 * Embed a circuit into the d-dimensional lattice, verify every causal
 * constraint, and report the embedding's measurements.  `greedy`
 * selects the greedy placer instead of the layered-shell placer.
 * Returns `ConstraintFailed` if verification finds any violation; the
 * stats are only written on `Ok`.
 */
enum RclabStatus rclab_embed_circuit(const struct RclabCircuit *circuit,
                                     uint32_t d,
                                     bool greedy,
                                     struct RclabEmbedStats *out);

/**
 * Run the parity-family realizability sweep with the layered-shell
 * placer over `sizes` and return a report handle the caller must
 * release with `rclab_report_free`.  A sweep whose laws fail still
 * returns `Ok`; interrogate the report getters.
 */
enum RclabStatus rclab_check_parity(uint32_t d,
                                    const uint32_t *sizes,
                                    size_t n_sizes,
                                    struct RclabReport **out);

/**
 * Fitted log-size versus log-makespan slope; NaN when the handle is
 * NULL.
 */
double rclab_report_size_slope(const struct RclabReport *report);

/**
 * Fitted log-maxcut versus log-makespan slope; NaN when the handle is
 * NULL.
 */
double rclab_report_width_slope(const struct RclabReport *report);

/**
 * Fitted packing constant of the minimum-time law; NaN when the
 * handle is NULL.
 */
double rclab_report_k_fit(const struct RclabReport *report);

/**
 * Whether every law in the sweep passed; false when the handle is
 * NULL.
 */
bool rclab_report_pass(const struct RclabReport *report);

/**
 * Release a report handle; NULL is ignored.
 */
void rclab_report_free(struct RclabReport *report);

/**
 * Normalized capacity parameters for dimension `d`: every constant 1.
 */
enum RclabStatus rclab_attention_defaults(uint32_t d, struct RclabAttentionParams *out);

/**
 * Information a T-tick computation can move across its boundary, in
 * bits.
 */
enum RclabStatus rclab_cut_capacity(const struct RclabAttentionParams *params,
                                    double t,
                                    double *out);

/**
 * Joint minimum time for moving `i_star` bits across the boundary and
 * dissipating `e_req` bits of erasure: the larger of the throughput
 * and Landauer bounds.
 */
enum RclabStatus rclab_min_time(const struct RclabAttentionParams *params,
                                double i_star,
                                double e_req,
                                double *out);

/**
 * Minimum over the tail t in [T/2, T] of the fraction of the crossing
 * bound achieved by the thin-annulus outflow construction.
 */
enum RclabStatus rclab_annulus_min_fraction(uint32_t d, double eps, uint32_t ticks, double *out);

/**
 * Total erasures (bits) a T-tick, d-dimensional computation may
 * perform inside the dissipation budget: eta * T^d / (d * T_env).
 */
enum RclabStatus rclab_erasure_budget(double t, uint32_t d, double eta, double t_env, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RCLAB_H */
