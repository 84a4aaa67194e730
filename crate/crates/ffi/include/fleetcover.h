#ifndef FLEETCOVER_H
#define FLEETCOVER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. The nonzero values match the exit codes of the command line
// tool, with `INTERNAL` added for panics and invalid handles.
typedef enum FcStatus {
  FC_STATUS_OK = 0,
  FC_STATUS_INVALID_ARGUMENT = 1,
  FC_STATUS_INFEASIBLE_WORKSPACE = 2,
  FC_STATUS_UNREACHABLE = 3,
  FC_STATUS_PARSE_ERROR = 4,
  FC_STATUS_INTERNAL = 5,
} FcStatus;

// The plans, metrics and allocation of one planner run.
typedef struct FcPlanResult FcPlanResult;

// A planning problem: region, exclusion zones and parameters.
typedef struct FcScenario FcScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none failed.
// The pointer stays valid until the next failing call on the same thread.
const char *fc_last_error_message(void);

// Loads a GeoJSON scenario file and its `<stem>.config.json` sidecar.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum FcStatus fc_scenario_load(const char *path, struct FcScenario **out);

// One of the scenarios compiled into the library ("rect", "cape", ...).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum FcStatus fc_scenario_bundled(const char *name, struct FcScenario **out);

// Scenario from GeoJSON text and an optional JSON parameter object with the
// same keys as a sidecar file. `config_json` may be null, but the swath
// width must then be set before the call succeeds, so pass at least
// `{"swath_width": w}`.
//
// # Safety
// `geojson` and a non-null `config_json` must be NUL-terminated strings;
// `out` must be a valid pointer.
enum FcStatus fc_scenario_from_geojson(const char *geojson,
                                       const char *config_json,
                                       struct FcScenario **out);

// # Safety
// `sc` must be a handle from this library or null.
enum FcStatus fc_scenario_set_robots(struct FcScenario *sc, size_t n_robots);

// # Safety
// `sc` must be a handle from this library or null.
enum FcStatus fc_scenario_set_swath_width(struct FcScenario *sc, double width);

// Buffer distance as a multiple of the swath width.
//
// # Safety
// `sc` must be a handle from this library or null.
enum FcStatus fc_scenario_set_buffer_scale(struct FcScenario *sc, double scale);

// # Safety
// `sc` must be a handle from this library or null.
enum FcStatus fc_scenario_set_depot(struct FcScenario *sc, double x, double y);

// # Safety
// `sc` must be a handle from this library or null.
enum FcStatus fc_scenario_set_seed(struct FcScenario *sc, uint64_t seed);

// Sweep direction strategy: "mar", "scan", "pca" or "minwidth".
//
// # Safety
// `sc` must be a handle from this library or null; `name` must be a
// NUL-terminated string.
enum FcStatus fc_scenario_set_orientation(struct FcScenario *sc, const char *name);

// # Safety
// `sc` must be a handle from this library or null, and not used afterwards.
void fc_scenario_free(struct FcScenario *sc);

// Runs the planner. The scenario is not modified and may be reused.
//
// # Safety
// `sc` must be a handle from this library; `out` must be a valid pointer.
enum FcStatus fc_plan(const struct FcScenario *sc, struct FcPlanResult **out);

// Number of robots with a plan; 0 for a null handle.
//
// # Safety
// `r` must be a handle from this library or null.
size_t fc_result_robot_count(const struct FcPlanResult *r);

// # Safety
// `r` must be a handle from this library; `out` must be a valid pointer.
enum FcStatus fc_result_waypoint_count(const struct FcPlanResult *r, size_t robot, size_t *out);

// Copies the waypoints of one robot as interleaved x, y pairs into `xy`,
// which must hold `2 * capacity` doubles. Fails without writing if the
// plan has more than `capacity` waypoints.
//
// # Safety
// `r` must be a handle from this library and `xy` must point to
// `2 * capacity` writable doubles.
enum FcStatus fc_result_copy_waypoints(const struct FcPlanResult *r,
                                       size_t robot,
                                       double *xy,
                                       size_t capacity);

// Fleet energy in Wh; NaN for a null handle.
//
// # Safety
// `r` must be a handle from this library or null.
double fc_result_total_energy_wh(const struct FcPlanResult *r);

// The metrics document written by the command line tool, as a new string
// to be released with `fc_string_free`. Null on failure.
//
// # Safety
// `r` must be a handle from this library or null.
char *fc_result_metrics_json(const struct FcPlanResult *r);

// # Safety
// `r` must be a handle from this library or null, and not used afterwards.
void fc_result_free(struct FcPlanResult *r);

// # Safety
// `s` must be a string returned by this library or null.
void fc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLEETCOVER_H */
