#ifndef SATQ_H
#define SATQ_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SatqStatus {
  SATQ_STATUS_OK = 0,
  SATQ_STATUS_NULL_POINTER = 1,
  SATQ_STATUS_INVALID_ARGUMENT = 2,
  SATQ_STATUS_CONFIG = 3,
  SATQ_STATUS_NO_PATH = 4,
  SATQ_STATUS_BUFFER_TOO_SMALL = 5,
  SATQ_STATUS_SIMULATION = 6,
  SATQ_STATUS_PANIC = 7,
} SatqStatus;

/**
 * Opaque scenario configuration.
 */
typedef struct SatqConfig SatqConfig;

/**
 * Opaque undirected weighted graph.
 */
typedef struct SatqGraph SatqGraph;

/**
 * Aggregate Monte Carlo results.
 */
typedef struct SatqStats {
  double mean_f_eff;
  double mean_r_eff_bps;
  double mean_path_len;
  double mean_key_rate_bps;
  double perf_index;
  double std_f_eff;
  double std_r_eff_bps;
  double std_path_len;
  double std_key_rate_bps;
  double availability;
  double qber_compliant_fraction;
  double mean_density_per_km3;
  size_t n_routes;
  size_t n_requests;
  size_t run_count;
} SatqStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next `satq_*` call on the same thread.
 */
const char *satq_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *satq_version(void);

/**
 * One round of recurrence purification.
 */
double satq_purify(double fidelity);

/**
 * QBER implied by a fidelity.
 */
double satq_qber(double fidelity);

/**
 * Secure key rate for an end-to-end fidelity and bottleneck rate.
 */
double satq_secure_key_rate(double fidelity, double rate_bps);

/**
 * Free-space geometric loss in dB.
 *
 * # Safety
 * `out_db` must be valid for writes.
 */
enum SatqStatus satq_geometric_loss_db(double distance_km, double wavelength_m, double *out_db);

/**
 * Create a configuration holding the built-in defaults.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SatqStatus satq_config_default(struct SatqConfig **out);

/**
 * Parse a TOML configuration of `len` bytes.
 *
 * # Safety
 * `toml` must point to `len` readable bytes; `out` must be valid for writes.
 */
enum SatqStatus satq_config_from_toml(const char *toml, size_t len, struct SatqConfig **out);

/**
 * Apply one `section.key=value` override. The configuration is left
 * unchanged when the result does not validate.
 *
 * # Safety
 * `config` must be a live handle; `assignment` a NUL-terminated string.
 */
enum SatqStatus satq_config_set(struct SatqConfig *config, const char *assignment);

/**
 * # Safety
 * `config` must be NULL or a handle not yet freed.
 */
void satq_config_free(struct SatqConfig *config);

/**
 * Run the configured Monte Carlo experiment on `threads` workers.
 *
 * # Safety
 * `config` must be a live handle; `out` must be valid for writes.
 */
enum SatqStatus satq_monte_carlo(const struct SatqConfig *config,
                                 size_t threads,
                                 struct SatqStats *out);

/**
 * Empty graph on `n_nodes` nodes.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SatqStatus satq_graph_new(size_t n_nodes, struct SatqGraph **out);

/**
 * Insert or replace the undirected edge `{i, j}`.
 *
 * # Safety
 * `graph` must be a live handle.
 */
enum SatqStatus satq_graph_add_edge(struct SatqGraph *graph, size_t i, size_t j, double cost);

/**
 * # Safety
 * `graph` must be NULL or a handle not yet freed.
 */
void satq_graph_free(struct SatqGraph *graph);

/**
 * Minimum-cost path from `s` to `d`. Node ids are written to `nodes_out`
 * and the node count to `len_out`; on `BUFFER_TOO_SMALL` `len_out` still
 * holds the required capacity. `cost_out` may be NULL.
 *
 * # Safety
 * `graph` must be a live handle, `nodes_out` valid for `capacity` writes,
 * `len_out` valid for writes.
 */
enum SatqStatus satq_shortest_path(const struct SatqGraph *graph,
                                   size_t s,
                                   size_t d,
                                   size_t *nodes_out,
                                   size_t capacity,
                                   size_t *len_out,
                                   double *cost_out);

/**
 * Next-best simple path after the optimal one; same buffer contract as
 * [`satq_shortest_path`].
 *
 * # Safety
 * As for [`satq_shortest_path`].
 */
enum SatqStatus satq_second_path(const struct SatqGraph *graph,
                                 size_t s,
                                 size_t d,
                                 size_t *nodes_out,
                                 size_t capacity,
                                 size_t *len_out,
                                 double *cost_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SATQ_H */
