#ifndef FREIGHT_ASSIGN_H
#define FREIGHT_ASSIGN_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum FaStatus {
  FA_STATUS_OK = 0,
  FA_STATUS_NULL_POINTER = 1,
  FA_STATUS_INVALID_UTF8 = 2,
  FA_STATUS_IO = 3,
  FA_STATUS_INVALID_NETWORK = 4,
  FA_STATUS_INVALID_DEMAND = 5,
  FA_STATUS_UNREACHABLE = 6,
  FA_STATUS_INVALID_CONFIG = 7,
  FA_STATUS_NOT_FOUND = 8,
  FA_STATUS_BUFFER_TOO_SMALL = 9,
  FA_STATUS_INVALID_ARGUMENT = 10,
  FA_STATUS_SOLVER = 11,
  FA_STATUS_PANIC = 12,
} FaStatus;

typedef enum FaAlgorithm {
  FA_ALGORITHM_GRADIENT_PROJECTION = 0,
  FA_ALGORITHM_FRANK_WOLFE = 1,
} FaAlgorithm;

typedef struct FaDemand FaDemand;

typedef struct FaNetwork FaNetwork;

typedef struct FaResult FaResult;

// Solver settings. Start from [`fa_solver_config_default`].
typedef struct FaSolverConfig {
  double step_size;
  double rel_gap_tol;
  uint64_t max_iterations;
  double beta;
  double intermodal_road_factor;
  double intermodal_rail_factor;
  bool normalization;
} FaSolverConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null if none. The
// pointer stays valid until the next failing call on this thread.
const char *fa_last_error_message(void);

// Reads a network from a directory of `nodes.csv` and `links.csv` or
// from a `.json` file, and validates it.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable pointer.
enum FaStatus fa_network_load(const char *path, struct FaNetwork **out);

// # Safety
// `net` must come from [`fa_network_load`] and not be freed twice. Null
// is ignored.
void fa_network_free(struct FaNetwork *net);

// Number of links, or 0 for a null handle.
//
// # Safety
// `net` must be null or a live network handle.
size_t fa_network_link_count(const struct FaNetwork *net);

// Position of link `id` in flow arrays.
//
// # Safety
// `net` must be a live handle, `id` a NUL-terminated string and `out` a
// writable pointer.
enum FaStatus fa_network_link_index(const struct FaNetwork *net, const char *id, size_t *out);

// Reads a demand table CSV with columns origin, destination, q_truck,
// q_rail and q_intermodal.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a writable pointer.
enum FaStatus fa_demand_load(const char *path, struct FaDemand **out);

// # Safety
// `demand` must come from [`fa_demand_load`] and not be freed twice.
// Null is ignored.
void fa_demand_free(struct FaDemand *demand);

struct FaSolverConfig fa_solver_config_default(void);

// Solves for user equilibrium. A null `config` uses the defaults. Hitting
// the iteration limit is not a failure; check [`fa_result_converged`].
//
// # Safety
// `net` and `demand` must be live handles, `config` null or valid, and
// `out` a writable pointer.
enum FaStatus fa_solve(const struct FaNetwork *net,
                       const struct FaDemand *demand,
                       const struct FaSolverConfig *config,
                       enum FaAlgorithm algorithm,
                       struct FaResult **out);

// # Safety
// `result` must come from [`fa_solve`] and not be freed twice. Null is
// ignored.
void fa_result_free(struct FaResult *result);

// # Safety
// `result` must be null or a live result handle.
enum FaAlgorithm fa_result_algorithm(const struct FaResult *result);

// # Safety
// `result` must be null or a live result handle.
uint64_t fa_result_iterations(const struct FaResult *result);

// # Safety
// `result` must be null or a live result handle.
bool fa_result_converged(const struct FaResult *result);

// Objective in vehicle-hours per day and demand-normalized hours.
//
// # Safety
// `result` must be a live handle; `raw` and `normalized` writable or
// null.
enum FaStatus fa_result_objective(const struct FaResult *result, double *raw, double *normalized);

// Copies link flows in network link order into `buf`, which must hold
// [`fa_network_link_count`] values.
//
// # Safety
// `result` must be a live handle and `buf` valid for `len` writes.
enum FaStatus fa_result_link_flows(const struct FaResult *result, double *buf, size_t len);

// Flow on link `id`.
//
// # Safety
// `result` must be a live handle, `id` a NUL-terminated string and `out`
// a writable pointer.
enum FaStatus fa_result_link_flow(const struct FaResult *result, const char *id, double *out);

// Road travel time in hours at flow `x`.
//
// # Safety
// `out` must be a writable pointer.
enum FaStatus fa_road_time(double t0, double capacity, double x, double *out);

// Integral of the road travel time from 0 to `x`.
//
// # Safety
// `out` must be a writable pointer.
enum FaStatus fa_road_time_integral(double t0, double capacity, double x, double *out);

// Rail travel time in hours with own-direction flow `x` and opposing
// flow `x_opp` on the shared track.
//
// # Safety
// `out` must be a writable pointer.
enum FaStatus fa_rail_time(double t0,
                           double capacity,
                           double beta,
                           double x,
                           double x_opp,
                           double *out);

// Integral of the rail travel time from 0 to combined flow `y`.
//
// # Safety
// `out` must be a writable pointer.
enum FaStatus fa_rail_time_integral(double t0, double capacity, double beta, double y, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FREIGHT_ASSIGN_H */
