#ifndef WPCOOP_H
#define WPCOOP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Protocol selector for sweep rows.
 */
typedef enum WpcProtocol {
  WPC_PROTOCOL_EC = 0,
  WPC_PROTOCOL_DC = 1,
} WpcProtocol;

/**
 * Result code of every fallible call.
 */
typedef enum WpcStatus {
  WPC_STATUS_OK = 0,
  WPC_STATUS_NULL_POINTER = 1,
  /**
   * A number is out of range or the configuration is inconsistent.
   */
  WPC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * An allocation violates a time or power constraint.
   */
  WPC_STATUS_INFEASIBLE = 3,
  /**
   * A row index past the end of a sweep.
   */
  WPC_STATUS_OUT_OF_RANGE = 4,
  /**
   * Unexpected failure, including a caught panic.
   */
  WPC_STATUS_INTERNAL = 5,
} WpcStatus;

/**
 * Validated network configuration.
 */
typedef struct WpcConfig WpcConfig;

/**
 * Rows of a finished sweep.
 */
typedef struct WpcSweep WpcSweep;

/**
 * Physical parameters of the three-node network.
 */
typedef struct WpcNetworkParams {
  /**
   * AP to source distance in metres.
   */
  double d_as;
  /**
   * Source to relay distance in metres; the relay sits on the AP-source line.
   */
  double d_sr;
  double alpha;
  /**
   * Energy-harvesting efficiency.
   */
  double eta;
  double n0_dbm;
  double p_a_max;
  double p_r_max;
  /**
   * Average-to-peak power ratio.
   */
  double mu;
  bool reciprocal_channels;
} WpcNetworkParams;

/**
 * Power gains of one fading block.
 */
typedef struct WpcGains {
  double h_as;
  double h_rs;
  double h_sa;
  double h_sr;
  double h_ra;
} WpcGains;

typedef struct WpcEcAllocation {
  double p_a;
  double p_r;
  double tau1;
  double tau2;
} WpcEcAllocation;

typedef struct WpcEcResult {
  struct WpcEcAllocation alloc;
  double throughput;
  double z_star;
  double tau1_uncapped;
  bool capped;
} WpcEcResult;

typedef struct WpcDcAllocation {
  double p_a;
  double p_r_d;
  double p_r_u;
  double tau1;
  double tau2;
} WpcDcAllocation;

typedef struct WpcDcResult {
  struct WpcDcAllocation alloc;
  double throughput;
  /**
   * Inner case that produced the optimum: 1, 2 or 3.
   */
  uint8_t inner_case;
  /**
   * Relay uplink-to-downlink energy ratio; NaN when not a free variable.
   */
  double t_star;
} WpcDcResult;

typedef struct WpcSweepRow {
  double sweep_value;
  double mu;
  enum WpcProtocol protocol;
  double mean_throughput;
  double std_error;
  uint64_t n;
  uint64_t seed;
} WpcSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or null if
 * none occurred. The pointer stays valid until the next failing call on
 * the same thread.
 */
const char *wpc_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *wpc_status_name(enum WpcStatus status);

/**
 * Default network parameters.
 */
struct WpcNetworkParams wpc_network_params_default(void);

/**
 * Validates `params` and stores a new configuration handle in `*out`.
 *
 * # Safety
 * `params` must point to a valid `WpcNetworkParams` and `out` to writable
 * storage for one pointer. Release the handle with [`wpc_config_free`].
 */
enum WpcStatus wpc_config_new(const struct WpcNetworkParams *params, struct WpcConfig **out);

/**
 * Like [`wpc_config_new`] but with both peak powers set to `p_avg / mu`.
 *
 * # Safety
 * Same contract as [`wpc_config_new`].
 */
enum WpcStatus wpc_config_with_average_power(const struct WpcNetworkParams *params,
                                             double p_avg,
                                             double mu,
                                             struct WpcConfig **out);

/**
 * Releases a configuration handle. Null is ignored.
 *
 * # Safety
 * `config` must be null or a handle from this library not yet freed.
 */
void wpc_config_free(struct WpcConfig *config);

/**
 * Draws the gains of fading block `block` under `seed`.
 *
 * # Safety
 * `config` must be a live handle and `out` writable.
 */
enum WpcStatus wpc_sample_gains(const struct WpcConfig *config,
                                uint64_t seed,
                                uint64_t block,
                                struct WpcGains *out);

/**
 * Optimal E-C allocation for one block.
 *
 * # Safety
 * `config` must be a live handle, `gains` valid and `out` writable.
 */
enum WpcStatus wpc_optimize_ec(const struct WpcConfig *config,
                               const struct WpcGains *gains,
                               struct WpcEcResult *out);

/**
 * Optimal D-C allocation for one block.
 *
 * # Safety
 * `config` must be a live handle, `gains` valid and `out` writable.
 */
enum WpcStatus wpc_optimize_dc(const struct WpcConfig *config,
                               const struct WpcGains *gains,
                               struct WpcDcResult *out);

/**
 * E-C throughput of a given allocation; fails with `Infeasible` if it
 * breaks a constraint.
 *
 * # Safety
 * All pointers must be valid; `out` writable.
 */
enum WpcStatus wpc_ec_throughput(const struct WpcConfig *config,
                                 const struct WpcGains *gains,
                                 const struct WpcEcAllocation *alloc,
                                 double *out);

/**
 * D-C throughput of a given allocation; fails with `Infeasible` if it
 * breaks a constraint.
 *
 * # Safety
 * All pointers must be valid; `out` writable.
 */
enum WpcStatus wpc_dc_throughput(const struct WpcConfig *config,
                                 const struct WpcGains *gains,
                                 const struct WpcDcAllocation *alloc,
                                 double *out);

/**
 * Monte Carlo mean throughput of both protocols for every average power in
 * `powers` and every ratio in `mus`. Geometry and noise come from `base`.
 *
 * # Safety
 * `powers` and `mus` must point to `n_powers` and `n_mus` doubles, `base`
 * must be a live handle and `out` writable. Release the result with
 * [`wpc_sweep_free`].
 */
enum WpcStatus wpc_sweep_power(const struct WpcConfig *base,
                               const double *powers,
                               size_t n_powers,
                               const double *mus,
                               size_t n_mus,
                               size_t realizations,
                               uint64_t seed,
                               struct WpcSweep **out);

/**
 * Like [`wpc_sweep_power`] but over source-relay distances, keeping the
 * average powers of `base`.
 *
 * # Safety
 * Same contract as [`wpc_sweep_power`].
 */
enum WpcStatus wpc_sweep_distance(const struct WpcConfig *base,
                                  const double *distances,
                                  size_t n_distances,
                                  const double *mus,
                                  size_t n_mus,
                                  size_t realizations,
                                  uint64_t seed,
                                  struct WpcSweep **out);

/**
 * Number of rows in a sweep; zero for null.
 *
 * # Safety
 * `sweep` must be null or a live handle.
 */
size_t wpc_sweep_len(const struct WpcSweep *sweep);

/**
 * Copies row `index` into `*out`. Rows are ordered by protocol (E-C
 * first), then `mu`, then sweep value.
 *
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
enum WpcStatus wpc_sweep_row(const struct WpcSweep *sweep, size_t index, struct WpcSweepRow *out);

/**
 * Releases a sweep handle. Null is ignored.
 *
 * # Safety
 * `sweep` must be null or a handle from this library not yet freed.
 */
void wpc_sweep_free(struct WpcSweep *sweep);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* WPCOOP_H */
